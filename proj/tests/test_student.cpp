#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "core/student.hpp"
#include "doctest.h"

using namespace regenid;

namespace {

std::vector<double> random_series(size_t n, CounterRng& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_uniform(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("lag vector widths for the benchmark lag settings") {
  CHECK(LagSpec{10, 5}.dim() == 15);
  CHECK(LagSpec{20, 20}.dim() == 40);
  CHECK(LagSpec{20, 5}.max_lag() == 20);
}

TEST_CASE("lag vector layout: inputs oldest-first, then outputs oldest-first") {
  std::vector<double> u{10, 11, 12, 13, 14, 15};
  std::vector<double> y{20, 21, 22, 23, 24, 25};
  LagSpec spec{3, 2};
  std::vector<double> x = build_lag_vector(u, y, 5, spec);
  CHECK(x == std::vector<double>{12, 13, 14, 23, 24});
}

TEST_CASE("lag vector below the maximum lag is a boundary error") {
  std::vector<double> u(10, 0.0), y(10, 0.0);
  LagSpec spec{4, 2};
  CHECK_NOTHROW(build_lag_vector(u, y, 4, spec));
  CHECK_THROWS_AS(build_lag_vector(u, y, 3, spec), Error);
}

TEST_CASE("lag matrix stacks one column per requested index") {
  CounterRng rng(1);
  std::vector<double> u = random_series(30, rng);
  std::vector<double> y = random_series(30, rng);
  LagSpec spec{3, 3};
  std::vector<size_t> ts{5, 9, 20};
  Tensor m = build_lag_matrix(u, y, ts, spec);
  CHECK(m.rows == 6);
  CHECK(m.cols == 3);
  for (size_t j = 0; j < ts.size(); ++j) {
    std::vector<double> col = build_lag_vector(u, y, ts[j], spec);
    for (int i = 0; i < 6; ++i) CHECK(m.at(i, static_cast<int>(j)) == col[i]);
  }
}

TEST_CASE("zero-parameter student predicts a standard normal everywhere") {
  CounterRng rng(2);
  Student s(4, {5, 3}, rng);
  s.zero();
  GaussianHead head("head", 3, 1, rng);
  head.zero();
  Graph g;
  Tensor x(4, 2);
  x.data = {1.0, -2.0, 0.5, 3.0, -1.0, 0.0, 2.0, 4.0};
  StudentForward out = student_forward(g, s, head, g.input(x));
  for (int j = 0; j < 2; ++j) {
    CHECK(g.value(out.out.mean).at(0, j) == doctest::Approx(0.0));
    CHECK(std::exp(g.value(out.out.logvar).at(0, j)) == doctest::Approx(1.0));
  }
}

TEST_CASE("representation width follows the configured stack") {
  CounterRng rng(3);
  Student s(15, {30}, rng);
  GaussianHead head("head", 30, 1, rng);
  Graph g;
  StudentForward out = student_forward(g, s, head, g.input(Tensor(15, 1)));
  CHECK(g.value(out.phi).rows == 30);
}

TEST_CASE("student forward passes a gradient check") {
  CounterRng rng(4);
  Student s(5, {6, 3}, rng);
  GaussianHead head("head", 3, 1, rng);
  Tensor x(5, 2);
  for (double& v : x.data) v = rng.next_uniform(-1.0, 1.0);
  std::vector<Param*> params = s.params();
  for (Param* p : head.params()) params.push_back(p);
  auto build = [&](Graph& g) {
    StudentForward out = student_forward(g, s, head, g.input(x));
    return g.add(g.sum(g.square(out.out.mean)), g.sum(g.exp(out.out.logvar)));
  };
  CHECK(gradient_check(build, params, 1e-5, 1e-4).pass);
}

TEST_CASE("one-step prediction on self-generated data has zero residuals") {
  CounterRng rng(5);
  LagSpec spec{3, 2};
  Student s(spec.dim(), {6, 4}, rng);
  GaussianHead head("head", 4, 1, rng);

  std::vector<double> u = random_series(60, rng);
  std::vector<double> y(60, 0.0);
  for (size_t t = static_cast<size_t>(spec.max_lag()); t < y.size(); ++t) {
    std::vector<size_t> idx{t};
    Graph g;
    StudentForward out =
        student_forward(g, s, head, g.input(build_lag_matrix(u, y, idx, spec)));
    y[t] = g.value(out.out.mean).data[0];
  }
  GaussianSeries pred = predict_series(s, head, u, y, spec, PredictMode::one_step);
  CHECK(pred.start == static_cast<size_t>(spec.max_lag()));
  for (size_t i = 0; i < pred.mean.size(); ++i)
    CHECK(pred.mean[i] == doctest::Approx(y[pred.start + i]).epsilon(1e-12));
}

TEST_CASE("free-run equals one-step when there is no output feedback") {
  CounterRng rng(6);
  LagSpec spec{4, 0};
  Student s(spec.dim(), {5}, rng);
  GaussianHead head("head", 5, 1, rng);
  std::vector<double> u = random_series(50, rng);
  std::vector<double> y = random_series(50, rng);
  GaussianSeries a = predict_series(s, head, u, y, spec, PredictMode::one_step);
  GaussianSeries b = predict_series(s, head, u, y, spec, PredictMode::free_run);
  CHECK(a.mean == b.mean);
  CHECK(a.var == b.var);
}

TEST_CASE("series shorter than the maximum lag are rejected") {
  CounterRng rng(7);
  LagSpec spec{6, 6};
  Student s(spec.dim(), {4}, rng);
  GaussianHead head("head", 4, 1, rng);
  std::vector<double> u(5, 0.0), y(5, 0.0);
  CHECK_THROWS_AS(predict_series(s, head, u, y, spec, PredictMode::one_step), Error);
}

TEST_CASE("one-step prediction is shift-equivariant under a prepended warmup") {
  CounterRng rng(8);
  LagSpec spec{3, 3};
  Student s(spec.dim(), {5}, rng);
  GaussianHead head("head", 5, 1, rng);
  std::vector<double> u = random_series(40, rng);
  std::vector<double> y = random_series(40, rng);
  GaussianSeries base = predict_series(s, head, u, y, spec, PredictMode::one_step);

  const size_t k = 7;
  std::vector<double> u2(k, 0.33), y2(k, -0.2);
  u2.insert(u2.end(), u.begin(), u.end());
  y2.insert(y2.end(), y.begin(), y.end());
  GaussianSeries shifted = predict_series(s, head, u2, y2, spec, PredictMode::one_step);
  // Windows that lie fully inside the original data coincide after the shift.
  for (size_t t = spec.max_lag(); t < 40; ++t) {
    const double orig = base.mean[t - base.start];
    const double moved = shifted.mean[t + k - shifted.start];
    CHECK(orig == doctest::Approx(moved).epsilon(1e-14));
  }
}

TEST_CASE("free-run feeds back its own predictions") {
  CounterRng rng(9);
  LagSpec spec{2, 2};
  Student s(spec.dim(), {4}, rng);
  GaussianHead head("head", 4, 1, rng);
  std::vector<double> u = random_series(30, rng);
  std::vector<double> y = random_series(30, rng);
  GaussianSeries fr = predict_series(s, head, u, y, spec, PredictMode::free_run);
  // Reproduce by hand: measured outputs seed the first max_lag entries.
  std::vector<double> fb(y.begin(), y.begin() + spec.max_lag());
  for (size_t t = static_cast<size_t>(spec.max_lag()); t < y.size(); ++t) {
    std::vector<size_t> idx{t};
    Graph g;
    StudentForward out =
        student_forward(g, s, head, g.input(build_lag_matrix(u, fb, idx, spec)));
    fb.push_back(g.value(out.out.mean).data[0]);
  }
  for (size_t i = 0; i < fr.mean.size(); ++i)
    CHECK(fr.mean[i] == doctest::Approx(fb[fr.start + i]).epsilon(1e-12));
}
