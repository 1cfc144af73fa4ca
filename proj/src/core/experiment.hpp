#pragma once

#include <string>

#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/metrics.hpp"

namespace regenid {

// Simulates the configured benchmark: an excitation for the train+val
// region, a benchmark-specific test excitation appended after it, one
// continuous pass through the simulator. Noise stops at the test boundary
// so the held-out segment is the clean response.
IoDataset make_dataset(const ExperimentConfig& cfg);

// Trains an ensemble of cfg.ensemble members with derived seeds. Members
// run in parallel when threads > 1 with results identical to sequential.
std::vector<TrainedPair> train_ensemble(const ExperimentConfig& cfg, const IoDataset& ds,
                                        ModelKind kind);

// One evaluation row per (mode, reference) combination.
std::vector<ReportRow> evaluate_rows(const std::string& experiment,
                                     const std::string& model_name,
                                     std::vector<TrainedPair>& members,
                                     const IoDataset& ds);

// phi_T over the test window (posterior-mean latents), repr x T.
Tensor teacher_phi_series(TrainedPair& regen, const IoDataset& ds);
// phi_S (or the baseline's last hidden layer) over the test window.
Tensor student_phi_series(TrainedPair& pair, const IoDataset& ds);

// CLI-facing commands. Every command is deterministic for a fixed seed and
// writes only into out_dir.
void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_train(const ExperimentConfig& cfg, const std::string& dataset_csv,
               const std::string& out_dir);
void cmd_evaluate(const std::string& checkpoint, const std::string& dataset_csv,
                  const std::string& out_dir);
void cmd_analyze(const std::string& checkpoint, const std::string& dataset_csv,
                 const std::string& out_dir, const std::string& baseline_checkpoint = "");
void cmd_gridsearch(const ExperimentConfig& cfg, const std::string& dataset_csv,
                    const std::string& out_dir);

// Runs all three benchmarks end to end and emits the summary table
// (table1.csv), the full report, and correlation summaries. `overrides`
// (optional) replaces the per-benchmark default configs' seed/ensemble/
// threads and training budget, for scaled-down runs.
void cmd_reproduce(const std::string& out_dir, const ExperimentConfig* overrides = nullptr);

}  // namespace regenid
