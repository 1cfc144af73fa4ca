#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace regenid;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("rmse hand values and error cases") {
  std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(rmse(a, a) == 0.0);
  std::vector<double> zeros{0.0, 0.0}, ones{1.0, 1.0};
  CHECK(rmse(zeros, ones) == doctest::Approx(1.0));
  std::vector<double> empty;
  CHECK_THROWS_AS(rmse(empty, empty), Error);
  CHECK_THROWS_AS(rmse(a, zeros), Error);
}

TEST_CASE("rmse is invariant under simultaneous permutation") {
  CounterRng rng(1);
  std::vector<double> t(50), p(50);
  for (size_t i = 0; i < 50; ++i) {
    t[i] = rng.next_normal();
    p[i] = rng.next_normal();
  }
  const double base = rmse(t, p);
  std::vector<double> t2(t.rbegin(), t.rend()), p2(p.rbegin(), p.rend());
  CHECK(rmse(t2, p2) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("mean negative log density: residual-free unit-variance value") {
  std::vector<double> y{0.5, -1.0, 2.0};
  std::vector<double> var(3, 1.0);
  CHECK(nll_metric(y, y, var) == doctest::Approx(0.5 * std::log(2.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("mean negative log density matches a per-step density oracle") {
  CounterRng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 1 + rng.next_u64() % 8;
    std::vector<double> y(n), mu(n), var(n);
    double expected = 0.0;
    for (size_t i = 0; i < n; ++i) {
      y[i] = rng.next_uniform(-3.0, 3.0);
      mu[i] = rng.next_uniform(-3.0, 3.0);
      var[i] = rng.next_uniform(0.1, 4.0);
      expected += 0.5 * (std::log(2.0 * kPi * var[i]) +
                         (y[i] - mu[i]) * (y[i] - mu[i]) / var[i]);
    }
    REQUIRE(nll_metric(y, mu, var) == doctest::Approx(expected / n).epsilon(1e-10));
  }
}

TEST_CASE("mean negative log density decreases as means approach targets") {
  std::vector<double> y{1.0, -2.0, 0.5};
  std::vector<double> var(3, 0.7);
  std::vector<double> far{3.0, 0.0, 2.5}, near{1.5, -1.5, 1.0};
  CHECK(nll_metric(y, near, var) < nll_metric(y, far, var));
}

TEST_CASE("self-correlation has a unit diagonal") {
  CounterRng rng(3);
  Tensor phi(4, 100);
  for (double& v : phi.data) v = rng.next_normal();
  CorrelationResult r = correlation_matrix(phi, phi);
  for (int i = 0; i < 4; ++i) CHECK(r.corr.at(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.summary == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(r.corr.at(i, j) <= 1.0 + 1e-12);
      CHECK(r.corr.at(i, j) >= -1.0 - 1e-12);
    }
}

TEST_CASE("zero-variance units are flagged and correlate as zero") {
  CounterRng rng(4);
  Tensor a(2, 50);
  for (int j = 0; j < 50; ++j) {
    a.at(0, j) = 3.14;  // constant unit
    a.at(1, j) = rng.next_normal();
  }
  Tensor b(1, 50);
  for (int j = 0; j < 50; ++j) b.at(0, j) = rng.next_normal();
  CorrelationResult r = correlation_matrix(a, b);
  CHECK(r.degenerate_a[0]);
  CHECK_FALSE(r.degenerate_a[1]);
  CHECK(r.corr.at(0, 0) == 0.0);
}

TEST_CASE("correlation requires matching time lengths") {
  Tensor a(2, 10), b(2, 11);
  CHECK_THROWS_AS(correlation_matrix(a, b), Error);
}

TEST_CASE("an empty report emits only the header") {
  const std::string path = temp_path("regenid_test_empty_report.csv");
  emit_report({}, path);
  std::ifstream in(path);
  std::string line;
  CHECK(std::getline(in, line));
  CHECK(line == "experiment,model,rmse,nll,architecture,params_count,mode,reference,seed");
  CHECK_FALSE(std::getline(in, line));
  std::remove(path.c_str());
}

TEST_CASE("report rows round-trip exactly through the CSV") {
  std::vector<ReportRow> rows(2);
  rows[0] = {"lgssm", "regenerative", 0.0770000000000001, 0.94, "15-30-1", 542,
             "one-step", "clean", 123456789};
  rows[1] = {"wh", "baseline", 1e-17, -0.5, "40-80-20-1", 5000, "free-run", "noisy", 1};
  const std::string path = temp_path("regenid_test_report.csv");
  emit_report(rows, path);
  std::vector<ReportRow> back = parse_report(path);
  REQUIRE(back.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(back[i].experiment == rows[i].experiment);
    CHECK(back[i].model == rows[i].model);
    CHECK(back[i].rmse == rows[i].rmse);
    CHECK(back[i].nll == rows[i].nll);
    CHECK(back[i].architecture == rows[i].architecture);
    CHECK(back[i].params_count == rows[i].params_count);
    CHECK(back[i].mode == rows[i].mode);
    CHECK(back[i].reference == rows[i].reference);
    CHECK(back[i].seed == rows[i].seed);
  }
  std::remove(path.c_str());
}

TEST_CASE("series CSV carries truth, prediction and variance columns") {
  const std::string path = temp_path("regenid_test_series.csv");
  std::vector<double> truth{1.0, 2.0};
  std::vector<double> pred{1.1, 1.9};
  std::vector<double> var{0.5, 0.6};
  emit_series_csv(path, 10, truth, pred, var);
  std::ifstream in(path);
  std::string line;
  CHECK(std::getline(in, line));
  CHECK(line.find("k,") == 0);
  CHECK(std::getline(in, line));
  CHECK(line.substr(0, 3) == "10,");
  std::remove(path.c_str());
}
