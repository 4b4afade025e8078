/* oasmix - posterior inference for Bayesian nonparametric Gaussian mixtures.
 *
 * C interface to the sampler library. All functions returning int yield
 * OASMIX_OK on success; on failure they return an error class and leave a
 * human-readable message in oasmix_last_error() (per thread). Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with oasmix_string_free. Handles are opaque and must be released
 * with their matching _free function.
 */
#ifndef OASMIX_H
#define OASMIX_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define OASMIX_OK 0     /* success */
#define OASMIX_EINVAL 1 /* invalid argument, config, or incompatible request */
#define OASMIX_EIO 2    /* a file could not be read or written */
#define OASMIX_EFAIL 3  /* internal failure */

/* Message describing the calling thread's most recent failure ("" if none).
 * The pointer stays valid until the next failing oasmix_* call on the same
 * thread. */
const char* oasmix_last_error(void);

/* Semantic version of the library. */
const char* oasmix_version(void);

/* Releases a string returned by this library. NULL is a no-op. */
void oasmix_string_free(char* s);

/* ---- Datasets -------------------------------------------------------------
 * spec_json follows the "dataset" object of the experiment config schema
 * (see README), e.g. {"name":"lepto","n":100} or
 * {"name":"custom","n":50,"weights":[1.0],"means":[0.0],"sds":[1.0]} or
 * {"name":"galaxy","path":"galaxies.txt","scale":0.001}.
 */
typedef struct oasmix_dataset oasmix_dataset;

int oasmix_dataset_generate(const char* spec_json, uint64_t seed, oasmix_dataset** out);
int oasmix_dataset_size(const oasmix_dataset* ds, size_t* out);
/* Copies exactly `len` values; len must equal the dataset size. */
int oasmix_dataset_values(const oasmix_dataset* ds, double* buf, size_t len);
/* Writes one value per line with full precision. */
int oasmix_dataset_save(const oasmix_dataset* ds, const char* path);
void oasmix_dataset_free(oasmix_dataset* ds);

/* ---- Chain runs ------------------------------------------------------------
 * config_json follows the experiment config schema. oasmix_run_new draws the
 * dataset named in the config; oasmix_run_new_with_data runs on caller data
 * instead. Both keep results in memory only (the config's "output" field is
 * ignored here); use oasmix_run_experiment for file emission.
 */
typedef struct oasmix_run oasmix_run;

int oasmix_run_new(const char* config_json, oasmix_run** out);
int oasmix_run_new_with_data(const char* config_json, const double* y, size_t n,
                             oasmix_run** out);
/* Number of retained draws. */
int oasmix_run_length(const oasmix_run* r, long* out);
/* Per-draw monitored values, index 0 <= i < length. */
int oasmix_run_k_at(const oasmix_run* r, long i, int* out);
int oasmix_run_deviance_at(const oasmix_run* r, long i, double* out);
/* Canonical partition signature of draw i, e.g. "{1,3}{2}". */
int oasmix_run_partition_at(const oasmix_run* r, long i, char** out);
/* Summary record (IATs, mean seconds per iteration) as JSON. */
int oasmix_run_summary(const oasmix_run* r, char** summary_json);
void oasmix_run_free(oasmix_run* r);

/* Full experiment: draws the dataset, runs the chain, writes the trace CSV
 * and summary JSON to the config's output path (when set), and returns the
 * summary record. */
int oasmix_run_experiment(const char* config_json, char** summary_json);

/* ---- Reproduction presets ---------------------------------------------------
 * Each returns a CSV table through csv (caller-owned).
 */

/* Multi-seed IAT study (table = 1) or efficiency-ratio study (table = 2):
 * lepto data, DP(1) prior, samplers marginal/oas/ooas, 10 chains. */
int oasmix_reproduce_table12(int table, long iterations, long burn_in, uint64_t seed,
                             int workers, char** csv);

/* Local-mode escape comparison on the two benchmark cases (DP(1)/trimodal and
 * GP(1,1)/bimodal_sm). When grid_dir is non-NULL, writes one density-grid CSV
 * per case into that directory. */
int oasmix_reproduce_table3(int replicates, uint64_t seed, int workers,
                            const char* grid_dir, char** csv);

/* Empirical-vs-exact partition law check for every compatible sampler on a
 * 5-point dataset; prior_token e.g. "dp:1" or "py:0.5:0.5". */
int oasmix_oracle_check(const char* prior_token, long iterations, long burn_in,
                        uint64_t seed, int workers, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* OASMIX_H */
