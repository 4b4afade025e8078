#pragma once

// Experiment layer: dataset generation, JSON-configured chain runs with CSV
// traces and summary records, multi-seed IAT/efficiency studies, and the
// local-mode escape experiment comparing burn-ins with and without
// split-merge moves.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "diagnostics.hpp"
#include "model.hpp"
#include "weights.hpp"

namespace oasmix {

// --- Seeding -----------------------------------------------------------------

// splitmix64 step; decorrelates derived seeds (e.g. dataset vs chain streams).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// --- Dataset specification ----------------------------------------------------

// One of the named benchmark mixtures, an inline custom mixture, the galaxy
// velocities file (82 lines enforced), or an arbitrary numeric text file.
struct DatasetSpec {
  std::string name = "lepto";  // lepto|bimodal|mix|trimodal|bimodal_sm|custom|galaxy|file
  int n = 100;                 // sample size for mixture draws
  MixtureSpec custom;          // used when name == "custom"
  std::string path;            // used when name == "galaxy" or "file"
  double scale = 1.0;          // loaded file values are multiplied by this

  bool from_file() const { return name == "galaxy" || name == "file"; }
  // Resolves the generating mixture; throws for file-backed specs.
  MixtureSpec mixture() const;
  void validate() const;
};

// Draws spec.n iid values from the configured mixture (reproducible under
// seed) or loads the configured file (seed unused).
Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed);

// Parses a bare dataset object (the "dataset" value of the config schema).
DatasetSpec dataset_spec_from_json(const std::string& text);

// --- Experiment configuration ---------------------------------------------------

bool sampler_token_valid(const std::string& sampler);

// Parses "dp:1.0", "py:0.5:0.5", "esb:1:1", "gp:1:1" (also bare "dp" etc.
// with default parameters 1.0, and sigma 0.5 for "py").
MixingPrior parse_prior_token(const std::string& token);
std::string prior_token(const MixingPrior& prior);

struct ExperimentConfig {
  DatasetSpec dataset;
  MixingPrior prior = MixingPrior::dp(1.0);
  std::string sampler = "oas";  // oas | oas_collapsed | ooas | marginal |
                                // splitmerge_standalone | oas_with_splitmerge
  long iterations = 200000;     // retained draws
  long burn_in = 10000;         // discarded initial iterations
  std::uint64_t seed = 1;
  int scans = 10;               // restricted Gibbs scans per split-merge move
  std::string output;           // trace CSV path; empty disables file output

  // Rejects negative lengths, unknown sampler tokens, and incompatible
  // sampler/prior pairs (the marginal sampler needs a DP or PY prior).
  void validate() const;
};

// Strict JSON parsing: unknown keys are errors. See README for the schema.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

// --- Chain execution -------------------------------------------------------------

struct ChainResult {
  std::vector<TraceRow> rows;  // one row per retained iteration
  double seconds = 0.0;        // total kernel wall time, burn-in included

  std::vector<double> k_series() const;
  std::vector<double> deviance_series() const;
  std::map<std::string, double> partition_freq() const;
};

// Runs the configured sampler on y; every random choice derives from
// cfg.seed. When acc is non-null each retained iteration is accumulated
// into the density estimate.
ChainResult run_chain(const ExperimentConfig& cfg, const std::vector<double>& y,
                      DensityAccumulator* acc = nullptr);

// --- Summaries --------------------------------------------------------------------

struct RunSummary {
  std::string sampler;
  long iterations = 0;  // retained draws the summary is computed from
  long burn_in = 0;
  IatResult tau_k;              // IAT of the k_n series
  IatResult tau_dev;            // IAT of the deviance series
  double seconds_per_iter = 0;  // mean kernel wall time per iteration
  std::string reference;        // sampler the efficiency ratios compare against
  double efficiency_k = 0;      // (tau_k * t) / (tau_k_ref * t_ref); < 1 is better
  double efficiency_dev = 0;

  bool has_iat() const;  // false when the series was too short or constant
};

// IATs are computed when at least 100 retained draws exist and the series is
// not constant; otherwise tau/se are NaN (serialized as null).
RunSummary summarize_chain(const ExperimentConfig& cfg, const ChainResult& res);
void attach_reference(RunSummary& s, const RunSummary& ref);
std::string summary_to_json(const RunSummary& s);

// The dataset a full experiment run uses: cfg.dataset realized from cfg.seed,
// so `generate` with the same spec and seed reproduces the run's data.
Dataset experiment_dataset(const ExperimentConfig& cfg);

// Generates the dataset, runs the chain, writes the trace CSV to cfg.output
// and the summary record to cfg.output + ".summary.json" (no files when
// cfg.output is empty), and returns the summary.
RunSummary run_experiment(const ExperimentConfig& cfg);

// --- Multi-seed IAT / efficiency study (tables 1 and 2) -----------------------------

struct IatStudy {
  DatasetSpec dataset;
  MixingPrior prior;
  std::vector<std::string> samplers;      // efficiency reference must be listed
  std::string reference = "oas";
  std::vector<std::uint64_t> chain_seeds;
  // summaries[seed_index][sampler_index]; efficiency ratios attached.
  std::vector<std::vector<RunSummary>> summaries;
  // Seeds whose tau_k is strictly increasing across the sampler list order.
  int ordering_hits = 0;
  // Seeds where the last listed sampler has efficiency_k > 1 and the first
  // listed sampler has efficiency_k < 1 (both relative to the reference).
  int efficiency_hits = 0;
};

// One shared dataset (drawn from dataset_seed), n_seeds independent chains
// per sampler with chain seed = chain_seed0 XOR replicate (1-based), spread
// over `workers` threads. Deterministic in (seeds, config); thread schedule
// does not affect results.
IatStudy run_iat_study(const DatasetSpec& dataset, const MixingPrior& prior,
                       const std::vector<std::string>& samplers, long iterations,
                       long burn_in, std::uint64_t dataset_seed,
                       std::uint64_t chain_seed0, int n_seeds, int workers);

// The study behind the table presets: lepto (n=100), DP(1), samplers
// marginal/oas/ooas, 10 chain seeds.
IatStudy run_table12_study(long iterations, long burn_in, std::uint64_t seed,
                           int workers);

std::string table1_csv(const IatStudy& s);  // per-seed IATs + ordering verdict
std::string table2_csv(const IatStudy& s);  // per-seed efficiency ratios + verdict

// --- Local-mode escape experiment (table 3 / density figure) -------------------------

struct LocalModeConfig {
  DatasetSpec dataset;  // a mixture spec (not file-backed)
  MixingPrior prior = MixingPrior::dp(1.0);
  int replicates = 20;
  int scans = 10;           // restricted scans per split-merge move
  long burn_without = 110;  // burn-in sweeps, no split-merge arm
  long burn_with = 10;      // burn-in iterations, split-merge arm
  long retained = 100;      // post burn-in sweeps (no split-merge in either arm)
  int grid_points = 512;
  std::uint64_t seed = 1;
  int workers = 1;
  // Base measure for this experiment (location is always the replicate's data
  // mean). The component-mean prior is kept nearly flat so that fresh-component
  // births during plain sweeps stay rare and the single-block start is a real
  // trap over a run this short, while the precision prior concentrates around
  // the component scale so that a proposed two-block split of the data is not
  // priced out; both are needed for the escape-rate contrast to be measurable.
  double base_lambda0 = 1e-4;
  double base_a0 = 2.0;
  double base_b0 = 0.2;
  void validate() const;
};

struct LocalModeResult {
  std::vector<double> tv_with;  // per-replicate density TV distances
  std::vector<double> tv_without;
  double mean_with = 0, se_with = 0;
  double mean_without = 0, se_without = 0;
  PairedTTest test;  // one-sided: mean(tv_with) < mean(tv_without)
  // Density-figure data from the first replicate.
  std::vector<double> grid_x, f_true, fhat_with, fhat_without;
};

// Per replicate (1-based index t): a master RNG seeded seed XOR t draws a
// fresh dataset and the two arm seeds. Both arms start from all allocations
// in one block. Arm "without": burn_without plain sweeps. Arm "with":
// burn_with iterations of split-merge move + sweep. Both arms then retain
// `retained` plain sweeps into a density estimate compared against the truth.
LocalModeResult local_mode_experiment(const LocalModeConfig& cfg);

// CSV with header x,f,fhat_with,fhat_without.
void write_density_grid_csv(const std::string& path, const LocalModeResult& r);
std::string local_mode_csv(
    const std::vector<std::pair<std::string, LocalModeResult>>& cases);

// --- Oracle cross-check (CLI `oracle-check`) -------------------------------------------

// Runs every compatible sampler on a 5-point bimodal dataset under the given
// prior and reports the total variation distance of its empirical partition
// law from the exact one (DP/PY: enumerated posterior; general priors are
// rejected since no exact law is available here).
std::map<std::string, double> oracle_check(const MixingPrior& prior,
                                           long iterations, long burn_in,
                                           std::uint64_t seed, int workers);

// --- Worker pool -----------------------------------------------------------------------

// Runs job(0..count-1) across min(workers, count) threads. The caller's jobs
// must write to disjoint slots. Rethrows the first job exception.
void parallel_for(int count, int workers, const std::function<void(int)>& job);

}  // namespace oasmix
