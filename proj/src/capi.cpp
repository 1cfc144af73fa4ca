#include "regenid.h"

#include <string>

#include "core/experiment.hpp"

struct rg_config {
  regenid::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

rg_status status_of(regenid::ErrCode code) {
  switch (code) {
    case regenid::ErrCode::invalid_argument: return RG_ERR_INVALID_ARGUMENT;
    case regenid::ErrCode::shape_mismatch: return RG_ERR_SHAPE_MISMATCH;
    case regenid::ErrCode::io: return RG_ERR_IO;
    case regenid::ErrCode::numeric: return RG_ERR_NUMERIC;
    case regenid::ErrCode::internal: return RG_ERR_INTERNAL;
  }
  return RG_ERR_INTERNAL;
}

template <class Fn>
rg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RG_OK;
  } catch (const regenid::Error& e) {
    g_last_error = e.what();
    return status_of(e.code);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RG_ERR_INTERNAL;
  }
}

rg_status require(bool ok, const char* msg) {
  if (ok) return RG_OK;
  g_last_error = msg;
  return RG_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* rg_last_error(void) { return g_last_error.c_str(); }

rg_status rg_config_default(const char* benchmark, rg_config** out) {
  if (rg_status s = require(benchmark && out, "rg_config_default: null argument"))
    return s;
  *out = nullptr;
  return guarded([&] {
    *out = new rg_config{regenid::default_experiment_config(benchmark)};
  });
}

rg_status rg_config_load(const char* path, rg_config** out) {
  if (rg_status s = require(path && out, "rg_config_load: null argument")) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new rg_config{regenid::load_experiment_config(path)};
  });
}

rg_status rg_config_set(rg_config* cfg, const char* dotted_key, const char* value) {
  if (rg_status s = require(cfg && dotted_key && value, "rg_config_set: null argument"))
    return s;
  return guarded([&] { regenid::apply_config_override(cfg->cfg, dotted_key, value); });
}

rg_status rg_config_save(const rg_config* cfg, const char* path) {
  if (rg_status s = require(cfg && path, "rg_config_save: null argument")) return s;
  return guarded([&] { regenid::write_experiment_config(cfg->cfg, path); });
}

void rg_config_free(rg_config* cfg) { delete cfg; }

rg_status rg_simulate(const rg_config* cfg, const char* out_dir) {
  if (rg_status s = require(cfg && out_dir, "rg_simulate: null argument")) return s;
  return guarded([&] { regenid::cmd_simulate(cfg->cfg, out_dir); });
}

rg_status rg_train(const rg_config* cfg, const char* dataset_csv, const char* out_dir) {
  if (rg_status s = require(cfg && dataset_csv && out_dir, "rg_train: null argument"))
    return s;
  return guarded([&] { regenid::cmd_train(cfg->cfg, dataset_csv, out_dir); });
}

rg_status rg_evaluate(const char* checkpoint, const char* dataset_csv,
                      const char* out_dir) {
  if (rg_status s =
          require(checkpoint && dataset_csv && out_dir, "rg_evaluate: null argument"))
    return s;
  return guarded([&] { regenid::cmd_evaluate(checkpoint, dataset_csv, out_dir); });
}

rg_status rg_analyze(const char* checkpoint, const char* baseline_checkpoint,
                     const char* dataset_csv, const char* out_dir) {
  if (rg_status s =
          require(checkpoint && dataset_csv && out_dir, "rg_analyze: null argument"))
    return s;
  return guarded([&] {
    regenid::cmd_analyze(checkpoint, dataset_csv, out_dir,
                         baseline_checkpoint ? baseline_checkpoint : "");
  });
}

rg_status rg_gridsearch(const rg_config* cfg, const char* dataset_csv,
                        const char* out_dir) {
  if (rg_status s =
          require(cfg && dataset_csv && out_dir, "rg_gridsearch: null argument"))
    return s;
  return guarded([&] { regenid::cmd_gridsearch(cfg->cfg, dataset_csv, out_dir); });
}

rg_status rg_reproduce(const char* out_dir, const rg_config* overrides) {
  if (rg_status s = require(out_dir != nullptr, "rg_reproduce: null argument")) return s;
  return guarded([&] {
    regenid::cmd_reproduce(out_dir, overrides ? &overrides->cfg : nullptr);
  });
}

}  // extern "C"
