#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace regenid {

double rmse(std::span<const double> y_true, std::span<const double> y_pred);

// Mean Gaussian negative log density over the series.
double nll_metric(std::span<const double> y_true, std::span<const double> mean,
                  std::span<const double> var);

// Pearson correlation between every unit (row) of A and every unit of B
// over a shared time window. Zero-variance units get correlation 0 and a
// degeneracy flag. summary = mean over A-units of max |corr| across B.
struct CorrelationResult {
  Tensor corr;                      // units_a x units_b
  std::vector<bool> degenerate_a;
  std::vector<bool> degenerate_b;
  double summary = 0.0;
};

// phi_a, phi_b: units x time.
CorrelationResult correlation_matrix(const Tensor& phi_a, const Tensor& phi_b);

struct ReportRow {
  std::string experiment;
  std::string model;
  double rmse = 0.0;
  double nll = 0.0;
  std::string architecture;
  int params_count = 0;
  std::string mode;       // one-step | free-run
  std::string reference;  // noisy | clean
  uint64_t seed = 0;
};

void emit_report(std::span<const ReportRow> rows, const std::string& path);
std::vector<ReportRow> parse_report(const std::string& path);

// Plot-ready series dump: columns k,y_true,y_pred[,y_var].
void emit_series_csv(const std::string& path, size_t start,
                     std::span<const double> y_true,
                     std::span<const double> y_pred,
                     std::span<const double> y_var = {});

}  // namespace regenid
