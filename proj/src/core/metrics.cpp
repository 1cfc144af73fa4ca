#include "core/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace regenid {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw Error(ErrCode::invalid_argument,
                "rmse: need equal nonempty series, got " +
                    std::to_string(y_true.size()) + " and " +
                    std::to_string(y_pred.size()));
  double ss = 0.0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    ss += d * d;
  }
  return std::sqrt(ss / y_true.size());
}

double nll_metric(std::span<const double> y_true, std::span<const double> mean,
                  std::span<const double> var) {
  if (y_true.size() != mean.size() || y_true.size() != var.size() || y_true.empty())
    throw Error(ErrCode::invalid_argument, "nll_metric: length mismatch");
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  double s = 0.0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - mean[i];
    s += 0.5 * (kLog2Pi + std::log(var[i]) + d * d / var[i]);
  }
  return s / y_true.size();
}

CorrelationResult correlation_matrix(const Tensor& phi_a, const Tensor& phi_b) {
  if (phi_a.cols != phi_b.cols || phi_a.cols < 1)
    throw Error(ErrCode::invalid_argument, "correlation_matrix: time length mismatch");
  const int na = phi_a.rows, nb = phi_b.rows, nt = phi_a.cols;

  auto center = [&](const Tensor& m, std::vector<bool>& degenerate) {
    Tensor c = m;
    std::vector<double> norm(m.rows);
    degenerate.assign(m.rows, false);
    for (int i = 0; i < m.rows; ++i) {
      double mu = 0.0;
      for (int t = 0; t < nt; ++t) mu += m.at(i, t);
      mu /= nt;
      double ss = 0.0;
      for (int t = 0; t < nt; ++t) {
        c.at(i, t) = m.at(i, t) - mu;
        ss += c.at(i, t) * c.at(i, t);
      }
      norm[i] = std::sqrt(ss);
      // Treat rounding residue of a constant unit as zero variance.
      if (norm[i] <= 1e-12 * (std::fabs(mu) + 1.0) * std::sqrt(double(nt)))
        degenerate[i] = true;
    }
    return std::pair{c, norm};
  };

  CorrelationResult res;
  auto [ca, na_norm] = center(phi_a, res.degenerate_a);
  auto [cb, nb_norm] = center(phi_b, res.degenerate_b);

  res.corr = Tensor(na, nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      if (res.degenerate_a[i] || res.degenerate_b[j]) continue;  // stays 0
      double dot = 0.0;
      for (int t = 0; t < nt; ++t) dot += ca.at(i, t) * cb.at(j, t);
      res.corr.at(i, j) = dot / (na_norm[i] * nb_norm[j]);
    }

  double sum = 0.0;
  for (int i = 0; i < na; ++i) {
    double best = 0.0;
    for (int j = 0; j < nb; ++j) best = std::max(best, std::fabs(res.corr.at(i, j)));
    sum += best;
  }
  res.summary = na > 0 ? sum / na : 0.0;
  return res;
}

static const char* kReportHeader =
    "experiment,model,rmse,nll,architecture,params_count,mode,reference,seed";

void emit_report(std::span<const ReportRow> rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io, "emit_report: cannot write " + path);
  out << kReportHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.model << ',' << fmt17(r.rmse) << ','
        << fmt17(r.nll) << ',' << r.architecture << ',' << r.params_count << ','
        << r.mode << ',' << r.reference << ',' << r.seed << '\n';
  }
  if (!out) throw Error(ErrCode::io, "emit_report: write failed for " + path);
}

std::vector<ReportRow> parse_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrCode::io, "parse_report: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw Error(ErrCode::io, "parse_report: bad header in " + path);
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9)
      throw Error(ErrCode::io, "parse_report: bad row '" + line + "'");
    ReportRow r;
    r.experiment = cells[0];
    r.model = cells[1];
    r.rmse = std::stod(cells[2]);
    r.nll = std::stod(cells[3]);
    r.architecture = cells[4];
    r.params_count = std::stoi(cells[5]);
    r.mode = cells[6];
    r.reference = cells[7];
    r.seed = std::stoull(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_series_csv(const std::string& path, size_t start,
                     std::span<const double> y_true,
                     std::span<const double> y_pred,
                     std::span<const double> y_var) {
  if (y_true.size() != y_pred.size())
    throw Error(ErrCode::invalid_argument, "emit_series_csv: length mismatch");
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io, "emit_series_csv: cannot write " + path);
  out << (y_var.empty() ? "k,y_true,y_pred\n" : "k,y_true,y_pred,y_var\n");
  for (size_t i = 0; i < y_true.size(); ++i) {
    out << (start + i) << ',' << fmt17(y_true[i]) << ',' << fmt17(y_pred[i]);
    if (!y_var.empty()) out << ',' << fmt17(y_var[i]);
    out << '\n';
  }
}

}  // namespace regenid
