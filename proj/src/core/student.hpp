#pragma once

#include <span>
#include <vector>

#include "core/nets.hpp"

namespace regenid {

struct LagSpec {
  int n_b = 0;  // input lags
  int n_a = 0;  // output lags

  bool operator==(const LagSpec&) const = default;
  int max_lag() const { return n_b > n_a ? n_b : n_a; }
  int dim() const { return n_b + n_a; }  // scalar channels
  void validate() const {
    if (n_b < 0 || n_a < 0 || n_b + n_a < 1)
      throw Error(ErrCode::invalid_argument, "LagSpec: need n_b, n_a >= 0 and n_b + n_a >= 1");
  }
};

// x_t = [u_{t-n_b}, ..., u_{t-1}, y_{t-n_a}, ..., y_{t-1}], oldest first.
std::vector<double> build_lag_vector(std::span<const double> u,
                                     std::span<const double> y, size_t t,
                                     const LagSpec& spec);

// One column per time index; dim() x ts.size().
Tensor build_lag_matrix(std::span<const double> u, std::span<const double> y,
                        std::span<const size_t> ts, const LagSpec& spec);

// Shallow lag-vector predictor (theta_S). The Gaussian head is shared with
// the teacher and owned by the model pair.
struct Student {
  std::vector<DenseLayer> stack;  // lag dim -> ... -> repr dim, tanh
  int in_dim = 0;
  int repr_dim = 0;

  Student() = default;
  Student(int in, const std::vector<int>& widths, CounterRng& rng,
          const std::string& prefix = "student");

  std::vector<Param*> params();
  int param_count() const;
  void zero();
};

struct StudentForward {
  NodeId phi = -1;
  GaussNodes out;
};

StudentForward student_forward(Graph& g, Student& s, GaussianHead& head, NodeId x);

enum class PredictMode { one_step, free_run };

struct GaussianSeries {
  size_t start = 0;               // first predicted time index
  std::vector<double> mean;
  std::vector<double> var;
};

// Predicts y_t for t = max_lag .. len-1. In free-run mode the y-lag slots
// are fed with the model's own past mean predictions, seeded with measured
// outputs for the first max_lag steps. Operates in whatever units the
// series are given in.
GaussianSeries predict_series(Student& s, GaussianHead& head,
                              std::span<const double> u,
                              std::span<const double> y, const LagSpec& spec,
                              PredictMode mode);

}  // namespace regenid
