#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "sampler_baselines.hpp"
#include "sampler_oas.hpp"
#include "split_merge.hpp"

namespace oasmix {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Salt that separates a config's dataset stream from its chain stream.
constexpr std::uint64_t kDatasetSalt = 0xD5;

NormalGammaBase default_base(const std::vector<double>& y) {
  Dataset d;
  d.y = y;
  NormalGammaBase base;
  base.mu0 = d.mean();
  base.lambda0 = 0.01;
  base.a0 = 0.5;
  base.b0 = 0.5;
  return base;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known)
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

double sample_se(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

double sample_mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  return mean / static_cast<double>(x.size());
}

IatResult iat_or_nan(const std::vector<double>& x) {
  IatResult r;
  r.tau = kNaN;
  r.se = kNaN;
  r.cutoff = 0;
  if (x.size() < 100) return r;
  try {
    r = iat(x);
  } catch (const std::invalid_argument&) {
    // constant series: IAT undefined
  }
  return r;
}

json iat_to_json(const IatResult& r) {
  if (!std::isfinite(r.tau)) return nullptr;
  json j;
  j["tau"] = r.tau;
  j["se"] = std::isfinite(r.se) ? json(r.se) : json(nullptr);
  j["cutoff"] = r.cutoff;
  return j;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + salt + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// --- Dataset specification ------------------------------------------------------

MixtureSpec DatasetSpec::mixture() const {
  if (from_file())
    throw std::invalid_argument("dataset '" + name + "' is file-backed; it has no generating mixture");
  if (name == "custom") {
    custom.validate();
    return custom;
  }
  return named_mixture(name);
}

void DatasetSpec::validate() const {
  if (from_file()) {
    if (path.empty())
      throw std::invalid_argument("dataset '" + name + "' requires a path");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw std::invalid_argument("dataset scale must be positive and finite");
    return;
  }
  if (n < 0) throw std::invalid_argument("dataset n must be nonnegative");
  (void)mixture();  // resolves the name and validates custom weights
}

Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.from_file())
    return load_numeric_file(spec.path, spec.scale, spec.name == "galaxy" ? 82 : -1);
  Rng rng(seed);
  Dataset d;
  d.y = sample_mixture(spec.mixture(), spec.n, rng);
  return d;
}

namespace {

DatasetSpec dataset_spec_from_json_obj(const json& d) {
  if (!d.is_object()) throw std::invalid_argument("config: 'dataset' must be an object");
  require_keys(d, "'dataset'", {"name", "n", "weights", "means", "sds", "path", "scale"});
  DatasetSpec spec;
  spec.name = d.value("name", spec.name);
  spec.n = d.value("n", spec.n);
  spec.path = d.value("path", spec.path);
  spec.scale = d.value("scale", spec.scale);
  if (spec.name == "custom") {
    if (!d.contains("weights") || !d.contains("means") || !d.contains("sds"))
      throw std::invalid_argument("config: custom dataset needs 'weights', 'means' and 'sds'");
    spec.custom.w = d["weights"].get<std::vector<double>>();
    spec.custom.mu = d["means"].get<std::vector<double>>();
    spec.custom.sd = d["sds"].get<std::vector<double>>();
  } else if (d.contains("weights") || d.contains("means") || d.contains("sds")) {
    throw std::invalid_argument("config: 'weights'/'means'/'sds' are only valid for name=custom");
  }
  return spec;
}

}  // namespace

DatasetSpec dataset_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("dataset spec: invalid JSON: ") + e.what());
  }
  DatasetSpec spec;
  try {
    spec = dataset_spec_from_json_obj(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("dataset spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

// --- Experiment configuration -----------------------------------------------------

bool sampler_token_valid(const std::string& sampler) {
  return sampler == "oas" || sampler == "oas_collapsed" || sampler == "ooas" ||
         sampler == "marginal" || sampler == "splitmerge_standalone" ||
         sampler == "oas_with_splitmerge";
}

MixingPrior parse_prior_token(const std::string& token) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : token) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  const std::string& kind = parts[0];
  auto num = [&](std::size_t i, double dflt) {
    if (parts.size() <= i) return dflt;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(parts[i], &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("prior token '" + token + "': bad number '" + parts[i] + "'");
    }
    if (pos != parts[i].size())
      throw std::invalid_argument("prior token '" + token + "': bad number '" + parts[i] + "'");
    return v;
  };
  auto arity = [&](std::size_t max_parts) {
    if (parts.size() > max_parts)
      throw std::invalid_argument("prior token '" + token + "': too many fields");
  };
  MixingPrior p;
  if (kind == "dp") {
    arity(2);
    p = MixingPrior::dp(num(1, 1.0));
  } else if (kind == "py") {
    arity(3);
    p = MixingPrior::py(num(1, 0.5), num(2, 1.0));
  } else if (kind == "esb") {
    arity(3);
    p = MixingPrior::esb(num(1, 1.0), num(2, 1.0));
  } else if (kind == "gp") {
    arity(3);
    p = MixingPrior::gp(num(1, 1.0), num(2, 1.0));
  } else {
    throw std::invalid_argument("prior token '" + token + "': unknown kind '" + kind +
                                "' (expected dp|py|esb|gp)");
  }
  p.validate();
  return p;
}

std::string prior_token(const MixingPrior& prior) {
  char buf[96];
  switch (prior.kind) {
    case PriorKind::kDP:
      std::snprintf(buf, sizeof(buf), "dp:%.17g", prior.beta);
      break;
    case PriorKind::kPY:
      std::snprintf(buf, sizeof(buf), "py:%.17g:%.17g", prior.sigma, prior.beta);
      break;
    case PriorKind::kESB:
      std::snprintf(buf, sizeof(buf), "esb:%.17g:%.17g", prior.a, prior.b);
      break;
    case PriorKind::kGP:
      std::snprintf(buf, sizeof(buf), "gp:%.17g:%.17g", prior.a, prior.b);
      break;
  }
  return buf;
}

void ExperimentConfig::validate() const {
  dataset.validate();
  prior.validate();
  if (!sampler_token_valid(sampler))
    throw std::invalid_argument(
        "unknown sampler '" + sampler +
        "' (expected oas|oas_collapsed|ooas|marginal|splitmerge_standalone|oas_with_splitmerge)");
  if (iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
  if (scans < 0) throw std::invalid_argument("scans must be nonnegative");
  if (sampler == "marginal" && !prior.size_biased())
    throw std::invalid_argument("the marginal sampler requires a DP or PY prior; prior '" +
                                prior.name() + "' has no tractable predictive rule");
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  require_keys(j, "the top level",
               {"dataset", "prior", "sampler", "iterations", "burn_in", "seed", "scans", "output"});
  ExperimentConfig cfg;
  try {
    if (j.contains("dataset")) cfg.dataset = dataset_spec_from_json_obj(j["dataset"]);
    if (j.contains("prior")) {
      const json& p = j["prior"];
      if (p.is_string()) {
        cfg.prior = parse_prior_token(p.get<std::string>());
      } else if (p.is_object()) {
        require_keys(p, "'prior'", {"kind", "beta", "sigma", "a", "b"});
        if (!p.contains("kind")) throw std::invalid_argument("config: prior needs a 'kind'");
        const std::string kind = p["kind"].get<std::string>();
        if (kind == "dp") {
          if (p.contains("sigma") || p.contains("a") || p.contains("b"))
            throw std::invalid_argument("config: dp prior takes only 'beta'");
          cfg.prior = MixingPrior::dp(p.value("beta", 1.0));
        } else if (kind == "py") {
          if (p.contains("a") || p.contains("b"))
            throw std::invalid_argument("config: py prior takes 'sigma' and 'beta'");
          cfg.prior = MixingPrior::py(p.value("sigma", 0.5), p.value("beta", 1.0));
        } else if (kind == "esb") {
          if (p.contains("sigma") || p.contains("beta"))
            throw std::invalid_argument("config: esb prior takes 'a' and 'b'");
          cfg.prior = MixingPrior::esb(p.value("a", 1.0), p.value("b", 1.0));
        } else if (kind == "gp") {
          if (p.contains("sigma") || p.contains("beta"))
            throw std::invalid_argument("config: gp prior takes 'a' and 'b'");
          cfg.prior = MixingPrior::gp(p.value("a", 1.0), p.value("b", 1.0));
        } else {
          throw std::invalid_argument("config: unknown prior kind '" + kind + "'");
        }
      } else {
        throw std::invalid_argument("config: 'prior' must be an object or a token string");
      }
    }
    cfg.sampler = j.value("sampler", cfg.sampler);
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.burn_in = j.value("burn_in", cfg.burn_in);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.scans = j.value("scans", cfg.scans);
    cfg.output = j.value("output", cfg.output);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json d;
  d["name"] = cfg.dataset.name;
  if (cfg.dataset.from_file()) {
    d["path"] = cfg.dataset.path;
    d["scale"] = cfg.dataset.scale;
  } else {
    d["n"] = cfg.dataset.n;
  }
  if (cfg.dataset.name == "custom") {
    d["weights"] = cfg.dataset.custom.w;
    d["means"] = cfg.dataset.custom.mu;
    d["sds"] = cfg.dataset.custom.sd;
  }
  json p;
  switch (cfg.prior.kind) {
    case PriorKind::kDP:
      p["kind"] = "dp";
      p["beta"] = cfg.prior.beta;
      break;
    case PriorKind::kPY:
      p["kind"] = "py";
      p["sigma"] = cfg.prior.sigma;
      p["beta"] = cfg.prior.beta;
      break;
    case PriorKind::kESB:
      p["kind"] = "esb";
      p["a"] = cfg.prior.a;
      p["b"] = cfg.prior.b;
      break;
    case PriorKind::kGP:
      p["kind"] = "gp";
      p["a"] = cfg.prior.a;
      p["b"] = cfg.prior.b;
      break;
  }
  json j;
  j["dataset"] = d;
  j["prior"] = p;
  j["sampler"] = cfg.sampler;
  j["iterations"] = cfg.iterations;
  j["burn_in"] = cfg.burn_in;
  j["seed"] = cfg.seed;
  j["scans"] = cfg.scans;
  j["output"] = cfg.output;
  return j.dump(2) + "\n";
}

// --- Chain execution ----------------------------------------------------------------

std::vector<double> ChainResult::k_series() const {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = static_cast<double>(rows[i].k);
  return out;
}

std::vector<double> ChainResult::deviance_series() const {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].deviance;
  return out;
}

std::map<std::string, double> ChainResult::partition_freq() const {
  std::map<std::string, double> freq;
  if (rows.empty()) return freq;
  for (const TraceRow& r : rows) freq[r.partition] += 1.0;
  for (auto& kv : freq) kv.second /= static_cast<double>(rows.size());
  return freq;
}

ChainResult run_chain(const ExperimentConfig& cfg, const std::vector<double>& y,
                      DensityAccumulator* acc) {
  cfg.validate();
  if (y.empty()) throw std::invalid_argument("run_chain: empty dataset");
  using clock = std::chrono::steady_clock;
  Rng rng(cfg.seed);

  OasConfig ocfg;
  ocfg.base = default_base(y);
  ocfg.prior = cfg.prior;
  ocfg.collapsed = cfg.sampler == "oas_collapsed";
  ocfg.validate();

  ChainResult out;
  out.rows.reserve(static_cast<std::size_t>(cfg.iterations));
  const long total = cfg.burn_in + cfg.iterations;
  long long total_ns = 0;

  auto record = [&](long t, long long ns, int k, double dev, std::string sig) {
    total_ns += ns;
    if (t < cfg.burn_in) return;
    TraceRow row;
    row.iter = t - cfg.burn_in + 1;
    row.k = k;
    row.deviance = dev;
    row.partition = std::move(sig);
    row.wall_ns = ns;
    out.rows.push_back(std::move(row));
  };

  if (cfg.sampler == "marginal") {
    MarginalState st = init_marginal_one_block(y, ocfg.base, rng);
    for (long t = 0; t < total; ++t) {
      const auto t0 = clock::now();
      marginal_sweep(st, y, cfg.prior, ocfg.base, rng);
      const auto t1 = clock::now();
      record(t, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count(), st.k(),
             deviance(y, st.counts, st.comps), partition_signature(st.c));
      if (acc && t >= cfg.burn_in) acc->add(st.counts, st.comps);
    }
  } else {
    OasState st = init_one_block(y, ocfg, rng);
    const bool sm_only = cfg.sampler == "splitmerge_standalone";
    const bool sm_then_sweep = cfg.sampler == "oas_with_splitmerge";
    const bool original = cfg.sampler == "ooas";
    for (long t = 0; t < total; ++t) {
      const auto t0 = clock::now();
      if (sm_only) {
        split_merge_move(st, y, ocfg, cfg.scans, rng);
      } else if (sm_then_sweep) {
        split_merge_move(st, y, ocfg, cfg.scans, rng);
        oas_sweep(st, y, ocfg, rng);
      } else if (original) {
        ooas_sweep(st, y, ocfg, rng);
      } else {
        oas_sweep(st, y, ocfg, rng);
      }
      const auto t1 = clock::now();
      record(t, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count(),
             st.alloc.k(), deviance(y, st.alloc.counts, st.comps),
             partition_signature(st.alloc.d, st.order));
      if (acc && t >= cfg.burn_in) acc->add(st.alloc.counts, st.comps);
    }
  }
  out.seconds = static_cast<double>(total_ns) * 1e-9;
  return out;
}

// --- Summaries ---------------------------------------------------------------------

bool RunSummary::has_iat() const {
  return std::isfinite(tau_k.tau) && std::isfinite(tau_dev.tau);
}

RunSummary summarize_chain(const ExperimentConfig& cfg, const ChainResult& res) {
  RunSummary s;
  s.sampler = cfg.sampler;
  s.iterations = static_cast<long>(res.rows.size());
  s.burn_in = cfg.burn_in;
  const long total = cfg.burn_in + s.iterations;
  s.seconds_per_iter = total > 0 ? res.seconds / static_cast<double>(total) : 0.0;
  s.tau_k = iat_or_nan(res.k_series());
  s.tau_dev = iat_or_nan(res.deviance_series());
  s.efficiency_k = kNaN;
  s.efficiency_dev = kNaN;
  return s;
}

void attach_reference(RunSummary& s, const RunSummary& ref) {
  s.reference = ref.sampler;
  s.efficiency_k = kNaN;
  s.efficiency_dev = kNaN;
  if (s.seconds_per_iter > 0.0 && ref.seconds_per_iter > 0.0) {
    if (std::isfinite(s.tau_k.tau) && std::isfinite(ref.tau_k.tau))
      s.efficiency_k =
          efficiency_ratio(s.tau_k.tau, s.seconds_per_iter, ref.tau_k.tau, ref.seconds_per_iter);
    if (std::isfinite(s.tau_dev.tau) && std::isfinite(ref.tau_dev.tau))
      s.efficiency_dev = efficiency_ratio(s.tau_dev.tau, s.seconds_per_iter, ref.tau_dev.tau,
                                          ref.seconds_per_iter);
  }
}

std::string summary_to_json(const RunSummary& s) {
  json j;
  j["sampler"] = s.sampler;
  j["iterations"] = s.iterations;
  j["burn_in"] = s.burn_in;
  j["tau_k"] = iat_to_json(s.tau_k);
  j["tau_deviance"] = iat_to_json(s.tau_dev);
  j["seconds_per_iteration"] = s.seconds_per_iter;
  if (!s.reference.empty()) {
    j["reference"] = s.reference;
    j["efficiency_k"] = std::isfinite(s.efficiency_k) ? json(s.efficiency_k) : json(nullptr);
    j["efficiency_deviance"] =
        std::isfinite(s.efficiency_dev) ? json(s.efficiency_dev) : json(nullptr);
  }
  return j.dump(2) + "\n";
}

Dataset experiment_dataset(const ExperimentConfig& cfg) {
  return generate_dataset(cfg.dataset, cfg.seed);
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset data = experiment_dataset(cfg);
  ChainResult res = run_chain(cfg, data.y);
  RunSummary s = summarize_chain(cfg, res);
  if (!cfg.output.empty()) {
    write_trace_csv(cfg.output, res.rows);
    const std::string spath = cfg.output + ".summary.json";
    std::ofstream out(spath);
    if (!out) throw std::runtime_error("cannot write summary file: " + spath);
    out << summary_to_json(s);
    if (!out) throw std::runtime_error("error writing summary file: " + spath);
  }
  return s;
}

// --- Multi-seed IAT / efficiency study ------------------------------------------------

IatStudy run_iat_study(const DatasetSpec& dataset, const MixingPrior& prior,
                       const std::vector<std::string>& samplers, long iterations,
                       long burn_in, std::uint64_t dataset_seed,
                       std::uint64_t chain_seed0, int n_seeds, int workers) {
  if (samplers.empty()) throw std::invalid_argument("run_iat_study: no samplers");
  if (n_seeds < 1) throw std::invalid_argument("run_iat_study: need at least one seed");
  const Dataset data = generate_dataset(dataset, dataset_seed);

  IatStudy study;
  study.dataset = dataset;
  study.prior = prior;
  study.samplers = samplers;
  study.chain_seeds.resize(static_cast<std::size_t>(n_seeds));
  for (int r = 0; r < n_seeds; ++r)
    study.chain_seeds[static_cast<std::size_t>(r)] =
        chain_seed0 ^ static_cast<std::uint64_t>(r + 1);
  study.summaries.assign(static_cast<std::size_t>(n_seeds),
                         std::vector<RunSummary>(samplers.size()));

  const int ns = static_cast<int>(samplers.size());
  parallel_for(n_seeds * ns, workers, [&](int id) {
    const std::size_t ri = static_cast<std::size_t>(id / ns);
    const std::size_t si = static_cast<std::size_t>(id % ns);
    ExperimentConfig cfg;
    cfg.dataset = dataset;
    cfg.prior = prior;
    cfg.sampler = samplers[si];
    cfg.iterations = iterations;
    cfg.burn_in = burn_in;
    cfg.seed = study.chain_seeds[ri];
    const ChainResult res = run_chain(cfg, data.y);
    study.summaries[ri][si] = summarize_chain(cfg, res);
  });

  std::size_t ref_idx = samplers.size();
  for (std::size_t i = 0; i < samplers.size(); ++i)
    if (samplers[i] == study.reference) ref_idx = i;
  for (auto& row : study.summaries) {
    if (ref_idx < row.size()) {
      const RunSummary ref = row[ref_idx];
      for (auto& s : row) attach_reference(s, ref);
    }
    bool increasing = row.size() >= 2;
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      const double a = row[i].tau_k.tau;
      const double b = row[i + 1].tau_k.tau;
      increasing = increasing && std::isfinite(a) && std::isfinite(b) && a < b;
    }
    if (increasing) ++study.ordering_hits;
    if (ref_idx < row.size() && row.size() >= 2) {
      const double first = row.front().efficiency_k;
      const double last = row.back().efficiency_k;
      if (std::isfinite(first) && std::isfinite(last) && first < 1.0 && last > 1.0)
        ++study.efficiency_hits;
    }
  }
  return study;
}

IatStudy run_table12_study(long iterations, long burn_in, std::uint64_t seed, int workers) {
  DatasetSpec ds;
  ds.name = "lepto";
  ds.n = 100;
  return run_iat_study(ds, MixingPrior::dp(1.0), {"marginal", "oas", "ooas"}, iterations,
                       burn_in, seed, seed, 10, workers);
}

std::string table1_csv(const IatStudy& s) {
  std::ostringstream out;
  out << "seed,sampler,tau_k,tau_k_se,tau_dev,tau_dev_se,seconds_per_iteration\n";
  for (std::size_t r = 0; r < s.summaries.size(); ++r) {
    for (const RunSummary& run : s.summaries[r]) {
      out << s.chain_seeds[r] << ',' << run.sampler << ',' << fmt(run.tau_k.tau) << ','
          << fmt(run.tau_k.se) << ',' << fmt(run.tau_dev.tau) << ',' << fmt(run.tau_dev.se)
          << ',' << fmt(run.seconds_per_iter) << '\n';
    }
  }
  out << "# tau_k ordering (";
  for (std::size_t i = 0; i < s.samplers.size(); ++i)
    out << (i ? " < " : "") << s.samplers[i];
  out << "): " << s.ordering_hits << "/" << s.summaries.size() << " seeds\n";
  return out.str();
}

std::string table2_csv(const IatStudy& s) {
  std::ostringstream out;
  out << "seed,sampler,reference,efficiency_k,efficiency_dev\n";
  for (std::size_t r = 0; r < s.summaries.size(); ++r) {
    for (const RunSummary& run : s.summaries[r]) {
      out << s.chain_seeds[r] << ',' << run.sampler << ',' << run.reference << ','
          << fmt(run.efficiency_k) << ',' << fmt(run.efficiency_dev) << '\n';
    }
  }
  if (!s.samplers.empty()) {
    out << "# efficiency_k direction (" << s.samplers.front() << " < 1 and "
        << s.samplers.back() << " > 1 vs " << s.reference << "): " << s.efficiency_hits << "/"
        << s.summaries.size() << " seeds\n";
  }
  return out.str();
}

// --- Local-mode escape experiment -----------------------------------------------------

void LocalModeConfig::validate() const {
  dataset.validate();
  if (dataset.from_file())
    throw std::invalid_argument("local-mode experiment needs a mixture dataset (the true density)");
  if (dataset.n < 1) throw std::invalid_argument("local-mode experiment needs data");
  prior.validate();
  if (replicates < 0) throw std::invalid_argument("replicates must be nonnegative");
  if (scans < 0) throw std::invalid_argument("scans must be nonnegative");
  if (burn_without < 0 || burn_with < 0) throw std::invalid_argument("burn-ins must be nonnegative");
  if (retained < 1) throw std::invalid_argument("need at least one retained iteration");
  if (grid_points < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (!(base_lambda0 > 0) || !(base_a0 > 0) || !(base_b0 > 0))
    throw std::invalid_argument("base measure hyperparameters must be positive");
}

LocalModeResult local_mode_experiment(const LocalModeConfig& cfg) {
  cfg.validate();
  const MixtureSpec truth = cfg.dataset.mixture();
  const Grid grid = make_grid(truth, cfg.grid_points);

  LocalModeResult result;
  result.tv_with.assign(static_cast<std::size_t>(cfg.replicates), 0.0);
  result.tv_without.assign(static_cast<std::size_t>(cfg.replicates), 0.0);
  if (cfg.replicates == 0) return result;
  result.grid_x = grid.x;
  result.f_true = mixture_density_on_grid(truth, grid);

  parallel_for(cfg.replicates, cfg.workers, [&](int t) {
    Rng master(cfg.seed ^ static_cast<std::uint64_t>(t + 1));
    std::vector<double> y = sample_mixture(truth, cfg.dataset.n, master);
    const std::uint64_t seed_without = master.raw();
    const std::uint64_t seed_with = master.raw();

    Dataset d;
    d.y = y;
    OasConfig ocfg;
    ocfg.base = NormalGammaBase{d.mean(), cfg.base_lambda0, cfg.base_a0, cfg.base_b0};
    ocfg.prior = cfg.prior;

    auto run_arm = [&](bool with_sm, std::uint64_t arm_seed,
                       std::vector<double>* fhat_out) {
      Rng rng(arm_seed);
      OasState st = init_one_block(y, ocfg, rng);  // every allocation starts at 1
      if (with_sm) {
        for (long b = 0; b < cfg.burn_with; ++b) {
          split_merge_move(st, y, ocfg, cfg.scans, rng);
          oas_sweep(st, y, ocfg, rng);
        }
      } else {
        for (long b = 0; b < cfg.burn_without; ++b) oas_sweep(st, y, ocfg, rng);
      }
      DensityAccumulator acc(grid);
      for (long m = 0; m < cfg.retained; ++m) {
        oas_sweep(st, y, ocfg, rng);
        acc.add(st.alloc.counts, st.comps);
      }
      const std::vector<double> fhat = acc.average();
      if (fhat_out) *fhat_out = fhat;
      return total_variation(truth, grid, fhat);
    };

    result.tv_without[static_cast<std::size_t>(t)] =
        run_arm(false, seed_without, t == 0 ? &result.fhat_without : nullptr);
    result.tv_with[static_cast<std::size_t>(t)] =
        run_arm(true, seed_with, t == 0 ? &result.fhat_with : nullptr);
  });

  result.mean_with = sample_mean(result.tv_with);
  result.se_with = sample_se(result.tv_with);
  result.mean_without = sample_mean(result.tv_without);
  result.se_without = sample_se(result.tv_without);
  if (cfg.replicates >= 2) result.test = paired_one_sided(result.tv_with, result.tv_without);
  return result;
}

void write_density_grid_csv(const std::string& path, const LocalModeResult& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write density grid file: " + path);
  out << "x,f,fhat_with,fhat_without\n";
  const bool have_estimates =
      r.fhat_with.size() == r.grid_x.size() && r.fhat_without.size() == r.grid_x.size();
  char buf[160];
  for (std::size_t i = 0; i < r.grid_x.size() && have_estimates; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", r.grid_x[i], r.f_true[i],
                  r.fhat_with[i], r.fhat_without[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("error writing density grid file: " + path);
}

std::string local_mode_csv(
    const std::vector<std::pair<std::string, LocalModeResult>>& cases) {
  std::ostringstream out;
  out << "case,replicates,mean_tv_with,se_tv_with,mean_tv_without,se_tv_without,tstat,pvalue\n";
  for (const auto& [name, r] : cases) {
    out << name << ',' << r.tv_with.size() << ',' << fmt(r.mean_with) << ',' << fmt(r.se_with)
        << ',' << fmt(r.mean_without) << ',' << fmt(r.se_without) << ',' << fmt(r.test.tstat)
        << ',' << fmt(r.test.pvalue) << '\n';
  }
  return out.str();
}

// --- Oracle cross-check ------------------------------------------------------------------

std::map<std::string, double> oracle_check(const MixingPrior& prior, long iterations,
                                           long burn_in, std::uint64_t seed, int workers) {
  prior.validate();
  if (!prior.size_biased())
    throw std::invalid_argument("oracle-check requires a DP or PY prior; no exact partition law"
                                " is computed for prior '" + prior.name() + "'");
  DatasetSpec spec;
  spec.name = "bimodal";
  spec.n = 5;
  const Dataset data = generate_dataset(spec, mix_seed(seed, kDatasetSalt));
  const auto exact = exact_partition_posterior(data.y, prior, default_base(data.y));

  const std::vector<std::string> samplers = {"oas", "oas_collapsed", "ooas", "marginal",
                                             "splitmerge_standalone"};
  std::vector<double> tv(samplers.size(), 0.0);
  parallel_for(static_cast<int>(samplers.size()), workers, [&](int i) {
    ExperimentConfig cfg;
    cfg.dataset = spec;
    cfg.prior = prior;
    cfg.sampler = samplers[static_cast<std::size_t>(i)];
    cfg.iterations = iterations;
    cfg.burn_in = burn_in;
    cfg.seed = seed ^ static_cast<std::uint64_t>(i + 1);
    const ChainResult res = run_chain(cfg, data.y);
    tv[static_cast<std::size_t>(i)] = partition_tv(exact, res.partition_freq());
  });
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < samplers.size(); ++i) out[samplers[i]] = tv[i];
  return out;
}

// --- Worker pool ---------------------------------------------------------------------------

void parallel_for(int count, int workers, const std::function<void(int)>& job) {
  if (count < 0) throw std::invalid_argument("parallel_for: negative job count");
  if (workers < 1) throw std::invalid_argument("parallel_for: workers must be >= 1");
  if (count == 0) return;
  const int nthreads = std::min(workers, count);
  if (nthreads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace oasmix
