#include "oasmix.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "model.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs the body, translating exceptions into error classes: bad inputs and
// configs come through as invalid_argument (OASMIX_EINVAL), file problems as
// runtime_error (OASMIX_EIO), anything else as OASMIX_EFAIL.
template <typename Fn>
int guarded(Fn&& body) {
  try {
    body();
  } catch (const std::invalid_argument& e) {
    return fail(OASMIX_EINVAL, e.what());
  } catch (const std::runtime_error& e) {
    return fail(OASMIX_EIO, e.what());
  } catch (const std::exception& e) {
    return fail(OASMIX_EFAIL, e.what());
  } catch (...) {
    return fail(OASMIX_EFAIL, "unknown failure");
  }
  g_last_error.clear();
  return OASMIX_OK;
}

int require(bool ok, const char* what) {
  return ok ? OASMIX_OK : fail(OASMIX_EINVAL, std::string("null or invalid argument: ") + what);
}

int emit(char** out, const std::string& s) {
  *out = dup_string(s);
  return *out ? OASMIX_OK : fail(OASMIX_EFAIL, "out of memory");
}

}  // namespace

struct oasmix_dataset {
  oasmix::Dataset data;
};

struct oasmix_run {
  oasmix::ExperimentConfig config;
  oasmix::ChainResult result;
  oasmix::RunSummary summary;
};

extern "C" {

const char* oasmix_last_error(void) { return g_last_error.c_str(); }

const char* oasmix_version(void) { return "0.1.0"; }

void oasmix_string_free(char* s) { delete[] s; }

// ---- Datasets ------------------------------------------------------------------

int oasmix_dataset_generate(const char* spec_json, uint64_t seed, oasmix_dataset** out) {
  if (int rc = require(spec_json && out, "oasmix_dataset_generate")) return rc;
  *out = nullptr;
  return guarded([&] {
    const oasmix::DatasetSpec spec = oasmix::dataset_spec_from_json(spec_json);
    auto handle = new oasmix_dataset{oasmix::generate_dataset(spec, seed)};
    *out = handle;
  });
}

int oasmix_dataset_size(const oasmix_dataset* ds, size_t* out) {
  if (int rc = require(ds && out, "oasmix_dataset_size")) return rc;
  *out = ds->data.y.size();
  return OASMIX_OK;
}

int oasmix_dataset_values(const oasmix_dataset* ds, double* buf, size_t len) {
  if (int rc = require(ds && buf, "oasmix_dataset_values")) return rc;
  if (len != ds->data.y.size())
    return fail(OASMIX_EINVAL, "oasmix_dataset_values: len must equal the dataset size");
  std::memcpy(buf, ds->data.y.data(), len * sizeof(double));
  return OASMIX_OK;
}

int oasmix_dataset_save(const oasmix_dataset* ds, const char* path) {
  if (int rc = require(ds && path, "oasmix_dataset_save")) return rc;
  return guarded([&] { oasmix::save_numeric_file(path, ds->data.y); });
}

void oasmix_dataset_free(oasmix_dataset* ds) { delete ds; }

// ---- Chain runs -----------------------------------------------------------------

static int run_new_impl(const char* config_json, const double* y, size_t n,
                        oasmix_run** out) {
  *out = nullptr;
  return guarded([&] {
    auto run = std::unique_ptr<oasmix_run>(new oasmix_run);
    run->config = oasmix::config_from_json(config_json);
    std::vector<double> data;
    if (y) {
      data.assign(y, y + n);
    } else {
      data = oasmix::experiment_dataset(run->config).y;
    }
    run->result = oasmix::run_chain(run->config, data);
    run->summary = oasmix::summarize_chain(run->config, run->result);
    *out = run.release();
  });
}

int oasmix_run_new(const char* config_json, oasmix_run** out) {
  if (int rc = require(config_json && out, "oasmix_run_new")) return rc;
  return run_new_impl(config_json, nullptr, 0, out);
}

int oasmix_run_new_with_data(const char* config_json, const double* y, size_t n,
                             oasmix_run** out) {
  if (int rc = require(config_json && y && out && n > 0, "oasmix_run_new_with_data")) return rc;
  return run_new_impl(config_json, y, n, out);
}

int oasmix_run_length(const oasmix_run* r, long* out) {
  if (int rc = require(r && out, "oasmix_run_length")) return rc;
  *out = static_cast<long>(r->result.rows.size());
  return OASMIX_OK;
}

static int row_at(const oasmix_run* r, long i, const oasmix::TraceRow** row) {
  if (!r) return fail(OASMIX_EINVAL, "null run handle");
  if (i < 0 || i >= static_cast<long>(r->result.rows.size()))
    return fail(OASMIX_EINVAL, "draw index out of range");
  *row = &r->result.rows[static_cast<size_t>(i)];
  return OASMIX_OK;
}

int oasmix_run_k_at(const oasmix_run* r, long i, int* out) {
  if (int rc = require(out != nullptr, "oasmix_run_k_at")) return rc;
  const oasmix::TraceRow* row = nullptr;
  if (int rc = row_at(r, i, &row)) return rc;
  *out = row->k;
  return OASMIX_OK;
}

int oasmix_run_deviance_at(const oasmix_run* r, long i, double* out) {
  if (int rc = require(out != nullptr, "oasmix_run_deviance_at")) return rc;
  const oasmix::TraceRow* row = nullptr;
  if (int rc = row_at(r, i, &row)) return rc;
  *out = row->deviance;
  return OASMIX_OK;
}

int oasmix_run_partition_at(const oasmix_run* r, long i, char** out) {
  if (int rc = require(out != nullptr, "oasmix_run_partition_at")) return rc;
  const oasmix::TraceRow* row = nullptr;
  if (int rc = row_at(r, i, &row)) return rc;
  return emit(out, row->partition);
}

int oasmix_run_summary(const oasmix_run* r, char** summary_json) {
  if (int rc = require(r && summary_json, "oasmix_run_summary")) return rc;
  return emit(summary_json, oasmix::summary_to_json(r->summary));
}

void oasmix_run_free(oasmix_run* r) { delete r; }

int oasmix_run_experiment(const char* config_json, char** summary_json) {
  if (int rc = require(config_json && summary_json, "oasmix_run_experiment")) return rc;
  *summary_json = nullptr;
  return guarded([&] {
    const oasmix::ExperimentConfig cfg = oasmix::config_from_json(config_json);
    const oasmix::RunSummary s = oasmix::run_experiment(cfg);
    char* text = dup_string(oasmix::summary_to_json(s));
    if (!text) throw std::bad_alloc();
    *summary_json = text;
  });
}

// ---- Reproduction presets -----------------------------------------------------------

int oasmix_reproduce_table12(int table, long iterations, long burn_in, uint64_t seed,
                             int workers, char** csv) {
  if (int rc = require(csv != nullptr, "oasmix_reproduce_table12")) return rc;
  if (table != 1 && table != 2)
    return fail(OASMIX_EINVAL, "oasmix_reproduce_table12: table must be 1 or 2");
  *csv = nullptr;
  return guarded([&] {
    const oasmix::IatStudy study =
        oasmix::run_table12_study(iterations, burn_in, seed, workers);
    const std::string text =
        table == 1 ? oasmix::table1_csv(study) : oasmix::table2_csv(study);
    char* dup = dup_string(text);
    if (!dup) throw std::bad_alloc();
    *csv = dup;
  });
}

int oasmix_reproduce_table3(int replicates, uint64_t seed, int workers,
                            const char* grid_dir, char** csv) {
  if (int rc = require(csv != nullptr, "oasmix_reproduce_table3")) return rc;
  *csv = nullptr;
  return guarded([&] {
    oasmix::LocalModeConfig base;
    base.replicates = replicates;
    base.workers = workers;

    oasmix::LocalModeConfig dp = base;
    dp.dataset.name = "trimodal";
    dp.prior = oasmix::MixingPrior::dp(1.0);
    dp.seed = oasmix::mix_seed(seed, 1);

    oasmix::LocalModeConfig gp = base;
    gp.dataset.name = "bimodal_sm";
    gp.prior = oasmix::MixingPrior::gp(1.0, 1.0);
    gp.seed = oasmix::mix_seed(seed, 2);

    const oasmix::LocalModeResult rdp = oasmix::local_mode_experiment(dp);
    const oasmix::LocalModeResult rgp = oasmix::local_mode_experiment(gp);
    if (grid_dir && *grid_dir) {
      const std::string dir(grid_dir);
      oasmix::write_density_grid_csv(dir + "/density_dp_trimodal.csv", rdp);
      oasmix::write_density_grid_csv(dir + "/density_gp_bimodal_sm.csv", rgp);
    }
    const std::string text =
        oasmix::local_mode_csv({{"dp_trimodal", rdp}, {"gp_bimodal_sm", rgp}});
    char* dup = dup_string(text);
    if (!dup) throw std::bad_alloc();
    *csv = dup;
  });
}

int oasmix_oracle_check(const char* prior_token, long iterations, long burn_in,
                        uint64_t seed, int workers, char** csv) {
  if (int rc = require(prior_token && csv, "oasmix_oracle_check")) return rc;
  *csv = nullptr;
  return guarded([&] {
    const oasmix::MixingPrior prior = oasmix::parse_prior_token(prior_token);
    const auto tv = oasmix::oracle_check(prior, iterations, burn_in, seed, workers);
    std::string text = "sampler,tv_to_exact\n";
    char buf[96];
    for (const auto& [sampler, dist] : tv) {
      std::snprintf(buf, sizeof(buf), "%s,%.6g\n", sampler.c_str(), dist);
      text += buf;
    }
    char* dup = dup_string(text);
    if (!dup) throw std::bad_alloc();
    *csv = dup;
  });
}

}  // extern "C"
