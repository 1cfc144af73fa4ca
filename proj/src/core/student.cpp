#include "core/student.hpp"

namespace regenid {

std::vector<double> build_lag_vector(std::span<const double> u,
                                     std::span<const double> y, size_t t,
                                     const LagSpec& spec) {
  spec.validate();
  if (t < static_cast<size_t>(spec.max_lag()))
    throw Error(ErrCode::invalid_argument,
                "build_lag_vector: t=" + std::to_string(t) +
                    " below max lag " + std::to_string(spec.max_lag()));
  if (t > u.size() || t > y.size())
    throw Error(ErrCode::invalid_argument, "build_lag_vector: series too short");
  std::vector<double> x;
  x.reserve(spec.dim());
  for (int k = spec.n_b; k >= 1; --k) x.push_back(u[t - k]);
  for (int k = spec.n_a; k >= 1; --k) x.push_back(y[t - k]);
  return x;
}

Tensor build_lag_matrix(std::span<const double> u, std::span<const double> y,
                        std::span<const size_t> ts, const LagSpec& spec) {
  Tensor x(spec.dim(), static_cast<int>(ts.size()));
  for (size_t j = 0; j < ts.size(); ++j) {
    const auto col = build_lag_vector(u, y, ts[j], spec);
    for (int i = 0; i < spec.dim(); ++i) x.at(i, static_cast<int>(j)) = col[i];
  }
  return x;
}

Student::Student(int in, const std::vector<int>& widths, CounterRng& rng,
                 const std::string& prefix)
    : in_dim(in) {
  if (widths.empty())
    throw Error(ErrCode::invalid_argument, "Student: need at least one width");
  int d = in;
  for (size_t i = 0; i < widths.size(); ++i) {
    stack.emplace_back(prefix + "." + std::to_string(i), d, widths[i],
                       Activation::tanh, rng);
    d = widths[i];
  }
  repr_dim = widths.back();
}

std::vector<Param*> Student::params() {
  std::vector<Param*> out;
  for (auto& l : stack) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  return out;
}

int Student::param_count() const {
  int n = 0;
  for (const auto& l : stack) n += l.param_count();
  return n;
}

void Student::zero() {
  for (auto& l : stack) l.zero();
}

StudentForward student_forward(Graph& g, Student& s, GaussianHead& head, NodeId x) {
  NodeId phi = x;
  for (auto& l : s.stack) phi = dense_forward(g, l, phi);
  return {phi, head_forward(g, head, phi)};
}

GaussianSeries predict_series(Student& s, GaussianHead& head,
                              std::span<const double> u,
                              std::span<const double> y, const LagSpec& spec,
                              PredictMode mode) {
  spec.validate();
  const size_t lag = static_cast<size_t>(spec.max_lag());
  if (u.size() != y.size())
    throw Error(ErrCode::invalid_argument, "predict_series: u/y length mismatch");
  if (y.size() <= lag)
    throw Error(ErrCode::invalid_argument, "predict_series: series shorter than max lag");

  GaussianSeries out;
  out.start = lag;
  const size_t n = y.size();

  if (mode == PredictMode::one_step) {
    // Batched evaluation; indices are independent given measured lags.
    constexpr size_t kBatch = 256;
    for (size_t t0 = lag; t0 < n; t0 += kBatch) {
      const size_t t1 = std::min(n, t0 + kBatch);
      std::vector<size_t> ts(t1 - t0);
      for (size_t i = 0; i < ts.size(); ++i) ts[i] = t0 + i;
      Graph g;
      auto fwd = student_forward(g, s, head, g.input(build_lag_matrix(u, y, ts, spec)));
      const Tensor& mu = g.value(fwd.out.mean);
      const Tensor& lv = g.value(fwd.out.logvar);
      for (int j = 0; j < mu.cols; ++j) {
        out.mean.push_back(mu.at(0, j));
        out.var.push_back(std::exp(lv.at(0, j)));
      }
    }
  } else {
    std::vector<double> y_fb(y.begin(), y.begin() + lag);  // measured seed
    for (size_t t = lag; t < n; ++t) {
      Graph g;
      auto x = build_lag_vector(u, y_fb, t, spec);
      auto fwd = student_forward(g, s, head, g.input(Tensor::colvec(std::move(x))));
      const double mu = g.value(fwd.out.mean).data[0];
      out.mean.push_back(mu);
      out.var.push_back(std::exp(g.value(fwd.out.logvar).data[0]));
      y_fb.push_back(mu);
    }
  }
  return out;
}

}  // namespace regenid
