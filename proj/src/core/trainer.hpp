#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>

#include "core/benchmarks.hpp"
#include "core/student.hpp"
#include "core/teacher.hpp"

namespace regenid {

struct LossWeights {
  double alpha1 = 1.0;  // student NLL
  double alpha2 = 1.0;  // teacher NLL + KL
  double alpha3 = 1.0;  // representation alignment

  void validate() const {
    const bool finite = std::isfinite(alpha1) && std::isfinite(alpha2) && std::isfinite(alpha3);
    if (!finite || alpha1 < 0 || alpha2 < 0 || alpha3 < 0 || alpha1 + alpha2 + alpha3 <= 0)
      throw Error(ErrCode::invalid_argument,
                  "LossWeights: need finite nonnegative weights, at least one positive");
  }
};

enum class AlignVariant { distance, correlation };
enum class ModelKind { baseline, regenerative };

struct ModelSpec {
  ModelKind kind = ModelKind::regenerative;
  LagSpec lags;
  std::vector<int> student_hidden;   // last entry is the representation width
  std::vector<int> baseline_hidden;  // used when kind == baseline
  int gru_hidden = 0;
  int z_dim = 0;                     // 0 -> same as gru_hidden
  std::vector<int> proj_hidden;

  void validate() const;
  const std::vector<int>& hidden() const {
    return kind == ModelKind::baseline ? baseline_hidden : student_hidden;
  }
  int repr_dim() const { return hidden().back(); }
  std::string architecture() const;  // e.g. 15-60-30-1
  bool operator==(const ModelSpec&) const = default;
};

struct TrainConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int max_epochs = 200;
  int patience = 10;
  int subseq_len = 64;
  int batch_size = 32;
  uint64_t seed = 1;
  AlignVariant align = AlignVariant::distance;
  LossWeights weights;

  void validate() const;
};

struct Standardizer {
  double u_mean = 0.0, u_std = 1.0;
  double y_mean = 0.0, y_std = 1.0;

  static Standardizer from_range(const IoDataset& ds, const SplitRange& r);
  std::vector<double> standardize_u(std::span<const double> u) const;
  std::vector<double> standardize_y(std::span<const double> y) const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_elbo = 0.0;  // teacher negative ELBO part (regenerative only)
};

// Jointly trained teacher/student with the shared head, or a standalone
// baseline when spec.kind == baseline (the "student" then holds the
// baseline stack and the head is private).
struct TrainedPair {
  ModelSpec spec;
  TrainConfig cfg;
  Standardizer stats;
  std::unique_ptr<Teacher> teacher;  // null for baseline
  Student student;
  GaussianHead head;                 // theta_C, shared between both paths
  std::vector<EpochStats> history;
  double best_val = 0.0;
  int best_epoch = -1;

  TrainedPair() = default;
  TrainedPair(const ModelSpec& s, const TrainConfig& c);

  std::vector<Param*> params();
  int student_param_count() const;   // inference-time parameters (theta_S + theta_C)
  int total_param_count() const;
  std::vector<Tensor> snapshot();
  void restore(const std::vector<Tensor>& snap);
};

// alpha3 penalty between representations: squared distance or negative
// inner product, summed over all entries.
NodeId align_loss(Graph& g, NodeId phi_t, NodeId phi_s, AlignVariant variant);

// (1/T) sum_t [ a1 nll(y_t | student_t) + a2 (nll(y_t | teacher_t) + kl_t)
//               + a3 align(phi_T(t), phi_S(t)) ], averaged over the batch.
NodeId joint_loss(Graph& g, const RolloutResult& teacher_out,
                  const std::vector<StudentForward>& student_out,
                  const std::vector<NodeId>& y_targets, const LossWeights& w,
                  AlignVariant variant);

struct AdamState {
  long t = 0;
};

// Bias-corrected Adam update over grads accumulated in the params; grads are
// cleared afterwards.
void adam_step(AdamState& state, std::span<Param* const> params, const TrainConfig& cfg);

TrainedPair fit(const IoDataset& ds, const ModelSpec& spec, const TrainConfig& cfg);

// De-standardized predictive series for the test range of the dataset
// (lags warm up on the samples preceding it).
GaussianSeries evaluate_pair(TrainedPair& pair, const IoDataset& ds, PredictMode mode);

// Pointwise mean of member means; variances combined as the moment-matched
// mixture variance. Members must share one spec.
GaussianSeries ensemble_average(std::span<TrainedPair* const> members,
                                const IoDataset& ds, PredictMode mode);

struct GridCandidate {
  std::vector<int> hidden;
};
struct RankedCandidate {
  GridCandidate cand;
  double score = 0.0;
};
using GridScorer = std::function<double(const GridCandidate&)>;

// True when `student` is an order-preserving subsequence of `baseline`
// (the H_S subset-of-H_B constraint).
bool is_width_subset(const std::vector<int>& student, const std::vector<int>& baseline);

// Trains each candidate for `budget_epochs` and ranks ascending by the
// validation criterion (negative ELBO for teacher-bearing specs, plain
// validation loss otherwise). A custom scorer replaces training.
std::vector<RankedCandidate> grid_search(const IoDataset& ds,
                                         const std::vector<GridCandidate>& grid,
                                         const ModelSpec& spec, TrainConfig cfg,
                                         int budget_epochs,
                                         const GridScorer& scorer = nullptr);

// The paper-style grid: one candidate per (depth, width) with halving widths.
std::vector<GridCandidate> make_width_grid(const std::vector<int>& depths,
                                           const std::vector<int>& widths);

}  // namespace regenid
