/* C interface to the regenid system-identification library.
 *
 * Every function returns RG_OK or an error code; on failure
 * rg_last_error() returns a thread-local description of the most
 * recent failure. Handles are opaque and must be released with the
 * matching _free function. All paths are UTF-8.
 */
#ifndef REGENID_H
#define REGENID_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rg_status {
  RG_OK = 0,
  RG_ERR_INVALID_ARGUMENT = 1,
  RG_ERR_SHAPE_MISMATCH = 2,
  RG_ERR_IO = 3,
  RG_ERR_NUMERIC = 4,
  RG_ERR_INTERNAL = 5
} rg_status;

/* Experiment configuration handle. */
typedef struct rg_config rg_config;

/* Description of the last error on this thread; empty string if none. */
const char* rg_last_error(void);

/* Defaults for one benchmark: "lgssm", "narendra_li" or "wh_surrogate". */
rg_status rg_config_default(const char* benchmark, rg_config** out);

/* Parses an INI-style config file. */
rg_status rg_config_load(const char* path, rg_config** out);

/* Applies one dotted key, e.g. "experiment.seed" or "train.max_epochs". */
rg_status rg_config_set(rg_config* cfg, const char* dotted_key, const char* value);

/* Writes the fully materialized config (defaults included). */
rg_status rg_config_save(const rg_config* cfg, const char* path);

void rg_config_free(rg_config* cfg);

/* Simulates the configured benchmark into out_dir/dataset.csv. */
rg_status rg_simulate(const rg_config* cfg, const char* out_dir);

/* Trains the configured model ensemble on a dataset CSV; writes
 * checkpoints and per-member training histories into out_dir. */
rg_status rg_train(const rg_config* cfg, const char* dataset_csv, const char* out_dir);

/* Evaluates one checkpoint on a dataset's test split; writes report.csv
 * plus one-step and free-run prediction series. */
rg_status rg_evaluate(const char* checkpoint, const char* dataset_csv,
                      const char* out_dir);

/* Correlates student and teacher representations over the test split.
 * baseline_checkpoint may be NULL. */
rg_status rg_analyze(const char* checkpoint, const char* baseline_checkpoint,
                     const char* dataset_csv, const char* out_dir);

/* Architecture search over the configured depth/width grid. */
rg_status rg_gridsearch(const rg_config* cfg, const char* dataset_csv,
                        const char* out_dir);

/* Runs all three benchmarks end to end and writes the summary table,
 * full report and representation analysis. overrides may be NULL; when
 * given, its seed, ensemble size, thread count, training budget and
 * sample counts replace the per-benchmark defaults. */
rg_status rg_reproduce(const char* out_dir, const rg_config* overrides);

#ifdef __cplusplus
}
#endif

#endif /* REGENID_H */
