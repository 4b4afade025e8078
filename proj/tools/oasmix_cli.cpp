// Command-line front end for the oasmix shared library. Only the C API is
// used for sampling work; CLI11 handles argument parsing and nlohmann/json
// merges config files with flag overrides.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "oasmix.h"

namespace {

using nlohmann::json;

// Machine-parsable single-line error on stderr; returns the exit code.
int die(const std::string& message, int code) {
  json e;
  e["error"] = message;
  e["code"] = code;
  std::cerr << e.dump() << "\n";
  return code;
}

int die_api(int rc) { return die(oasmix_last_error(), rc); }

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  long iters = 0;
  long burnin = 0;
  std::string sampler;
  std::string prior;
  std::string output;
  int workers = 1;
  double scale_galaxy = 1.0;
};

void add_common_flags(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config_path, "JSON config file (flags override its fields)");
  cmd->add_option("--seed", f->seed, "RNG seed");
  cmd->add_option("--iters", f->iters, "retained iterations")->check(CLI::NonNegativeNumber);
  cmd->add_option("--burnin", f->burnin, "burn-in iterations")->check(CLI::NonNegativeNumber);
  cmd->add_option("--sampler", f->sampler,
                  "oas|oas_collapsed|ooas|marginal|splitmerge_standalone|oas_with_splitmerge");
  cmd->add_option("--prior", f->prior, "prior token, e.g. dp:1, py:0.5:0.5, esb:1:1, gp:1:1");
  cmd->add_option("--workers", f->workers, "worker threads for replicated commands")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--scale-galaxy", f->scale_galaxy,
                  "multiplier applied to file-backed dataset values");
}

// Loads the config file (empty object when none) and applies flag overrides.
json merged_config(const CLI::App* cmd, const CommonFlags& f) {
  json cfg = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + f.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    cfg = json::parse(ss.str());  // parse_error propagates
    if (!cfg.is_object()) throw std::runtime_error(f.config_path + ": top level must be an object");
  }
  if (cmd->count("--seed")) cfg["seed"] = f.seed;
  if (cmd->count("--iters")) cfg["iterations"] = f.iters;
  if (cmd->count("--burnin")) cfg["burn_in"] = f.burnin;
  if (cmd->count("--sampler")) cfg["sampler"] = f.sampler;
  if (cmd->count("--prior")) cfg["prior"] = f.prior;
  if (cmd->count("--scale-galaxy")) cfg["dataset"]["scale"] = f.scale_galaxy;
  return cfg;
}

int cmd_generate(const CLI::App* cmd, const CommonFlags& f, const std::string& out_path) {
  const json cfg = merged_config(cmd, f);
  const json spec = cfg.contains("dataset") ? cfg["dataset"] : json::object();
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{1});
  oasmix_dataset* ds = nullptr;
  int rc = oasmix_dataset_generate(spec.dump().c_str(), seed, &ds);
  if (rc != OASMIX_OK) return die_api(rc);
  rc = oasmix_dataset_save(ds, out_path.c_str());
  size_t n = 0;
  oasmix_dataset_size(ds, &n);
  oasmix_dataset_free(ds);
  if (rc != OASMIX_OK) return die_api(rc);
  std::cout << "wrote " << n << " values to " << out_path << "\n";
  return 0;
}

int cmd_run(const CLI::App* cmd, const CommonFlags& f) {
  json cfg = merged_config(cmd, f);
  if (cmd->count("--output")) cfg["output"] = f.output;
  char* summary = nullptr;
  const int rc = oasmix_run_experiment(cfg.dump().c_str(), &summary);
  if (rc != OASMIX_OK) return die_api(rc);
  std::cout << summary;
  oasmix_string_free(summary);
  return 0;
}

int cmd_reproduce(const CLI::App* cmd, const CommonFlags& f, const std::string& which,
                  int replicates, const std::string& grid_dir) {
  const std::uint64_t seed = cmd->count("--seed") ? f.seed : 1;
  char* csv = nullptr;
  int rc = OASMIX_EINVAL;
  if (which == "table1" || which == "table2") {
    const long iters = cmd->count("--iters") ? f.iters : 200000;
    const long burnin = cmd->count("--burnin") ? f.burnin : 10000;
    rc = oasmix_reproduce_table12(which == "table1" ? 1 : 2, iters, burnin, seed, f.workers,
                                  &csv);
  } else if (which == "table3") {
    rc = oasmix_reproduce_table3(replicates, seed, f.workers,
                                 grid_dir.empty() ? nullptr : grid_dir.c_str(), &csv);
  } else {
    return die("unknown table '" + which + "' (expected table1|table2|table3)", OASMIX_EINVAL);
  }
  if (rc != OASMIX_OK) return die_api(rc);
  std::cout << csv;
  oasmix_string_free(csv);
  return 0;
}

int cmd_oracle_check(const CLI::App* cmd, const CommonFlags& f) {
  const std::string prior = cmd->count("--prior") ? f.prior : "dp:1";
  const long iters = cmd->count("--iters") ? f.iters : 200000;
  const long burnin = cmd->count("--burnin") ? f.burnin : 10000;
  const std::uint64_t seed = cmd->count("--seed") ? f.seed : 1;
  char* csv = nullptr;
  const int rc = oasmix_oracle_check(prior.c_str(), iters, burnin, seed, f.workers, &csv);
  if (rc != OASMIX_OK) return die_api(rc);
  std::cout << csv;
  oasmix_string_free(csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oasmix: ordered allocation sampling for Bayesian nonparametric mixtures"};
  app.set_version_flag("--version", std::string(oasmix_version()));
  app.require_subcommand(1);

  CommonFlags fgen, frun, frep, fora;
  std::string gen_out, rep_which, rep_grid_dir;
  int rep_replicates = 20;

  CLI::App* gen = app.add_subcommand("generate", "draw a dataset and write it to a file");
  add_common_flags(gen, &fgen);
  gen->add_option("output", gen_out, "destination file (one value per line)")->required();

  CLI::App* run = app.add_subcommand("run", "run one configured chain; prints the summary");
  add_common_flags(run, &frun);
  run->add_option("--output", frun.output, "trace CSV path (summary JSON written next to it)");

  CLI::App* rep = app.add_subcommand("reproduce", "desk-scale study presets");
  add_common_flags(rep, &frep);
  rep->add_option("table", rep_which, "table1|table2|table3")->required();
  rep->add_option("--replicates", rep_replicates, "table3 replicate count")
      ->check(CLI::NonNegativeNumber);
  rep->add_option("--grid-dir", rep_grid_dir, "table3: directory for density grid CSVs");

  CLI::App* ora = app.add_subcommand("oracle-check",
                                     "empirical vs exact partition law for every sampler");
  add_common_flags(ora, &fora);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return die(e.what(), e.get_exit_code() == 0 ? 1 : e.get_exit_code());
  }

  try {
    if (gen->parsed()) return cmd_generate(gen, fgen, gen_out);
    if (run->parsed()) return cmd_run(run, frun);
    if (rep->parsed()) return cmd_reproduce(rep, frep, rep_which, rep_replicates, rep_grid_dir);
    if (ora->parsed()) return cmd_oracle_check(ora, fora);
  } catch (const json::exception& e) {
    return die(std::string("config: ") + e.what(), OASMIX_EINVAL);
  } catch (const std::exception& e) {
    return die(e.what(), OASMIX_EFAIL);
  }
  return die("no subcommand", 1);
}
