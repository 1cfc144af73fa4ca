#pragma once

#include <string>

#include "core/trainer.hpp"

namespace regenid {

// Declarative experiment description. Parsed from an INI-style file with
// sections [experiment], [data], [model], [train], [grid]; see
// default_experiment_config() for the full key set and defaults.
struct ExperimentConfig {
  // [experiment]
  std::string benchmark = "lgssm";  // lgssm | narendra_li | wh_surrogate | csv
  std::string model = "regenerative";  // model kind trained by cmd_train
  uint64_t seed = 1;
  int ensemble = 5;
  int threads = 1;
  std::string dataset_path;  // for benchmark = csv

  // [data]
  size_t samples = 50000;       // train + validation region
  size_t test_samples = 2000;
  double input_low = -2.5;
  double input_high = 2.5;
  bool noise = true;
  double nl_noise_std = 0.1;    // Narendra-Li measurement noise (1.0 = classical)
  double wh_f0 = 0.0;
  double wh_f1 = 0.3;
  double wh_band_lo = 0.001;
  double wh_band_hi = 0.3;
  int wh_tones = 40;
  double train_frac = 0.8;      // train share of the non-test region

  // [model]
  ModelSpec spec;

  // [train]
  TrainConfig train;

  // [grid]
  std::vector<int> grid_depths{1, 2, 3, 4, 5};
  std::vector<int> grid_widths{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  int grid_epochs = 30;

  void validate() const;
};

// Paper-protocol settings for one benchmark (architecture tuples, lags,
// excitations).
ExperimentConfig default_experiment_config(const std::string& benchmark);

ExperimentConfig load_experiment_config(const std::string& path);

// Applies a dotted key, e.g. "train.seed" or "experiment.ensemble".
// Unknown keys raise an error naming the key.
void apply_config_override(ExperimentConfig& cfg, const std::string& dotted_key,
                           const std::string& value);

// Materializes every key (defaults included) for run provenance.
void write_experiment_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace regenid
