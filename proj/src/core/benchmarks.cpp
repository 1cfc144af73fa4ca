#include "core/benchmarks.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace regenid {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_finite_input(std::span<const double> u, const char* who) {
  for (double x : u)
    if (!std::isfinite(x))
      throw Error(ErrCode::numeric, std::string(who) + ": non-finite input sample");
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void IoDataset::validate() const {
  if (u.size() != y.size())
    throw Error(ErrCode::invalid_argument, "IoDataset: u/y length mismatch");
  if (has_clean && y_clean.size() != y.size())
    throw Error(ErrCode::invalid_argument, "IoDataset: y_clean length mismatch");
  auto in_bounds = [&](const SplitRange& r) {
    return r.begin <= r.end && r.end <= y.size();
  };
  if (!in_bounds(train) || !in_bounds(val) || !in_bounds(test))
    throw Error(ErrCode::invalid_argument, "IoDataset: split range out of bounds");
  auto overlap = [](const SplitRange& a, const SplitRange& b) {
    return a.begin < b.end && b.begin < a.end;
  };
  if (overlap(train, val) || overlap(train, test) || overlap(val, test))
    throw Error(ErrCode::invalid_argument, "IoDataset: split ranges overlap");
}

SimResult simulate_lgssm(std::span<const double> u, uint64_t seed, bool noise_on,
                         double x0_0, double x0_1, size_t noise_until) {
  check_finite_input(u, "simulate_lgssm");
  CounterRng rng(seed);
  const double w_std = std::sqrt(0.5);  // covariance 0.5 I

  SimResult r;
  r.y.reserve(u.size());
  r.y_clean.reserve(u.size());
  double x0 = x0_0, x1 = x0_1;
  for (size_t k = 0; k < u.size(); ++k) {
    const bool noisy = noise_on && k < noise_until;
    const double v = noisy ? rng.next_normal() : 0.0;
    r.y_clean.push_back(x0);
    r.y.push_back(x0 + v);
    r.states.push_back({x0, x1});
    const double w0 = noisy ? w_std * rng.next_normal() : 0.0;
    const double w1 = noisy ? w_std * rng.next_normal() : 0.0;
    const double n0 = 0.7 * x0 + 0.8 * x1 - 1.0 * u[k] + w0;
    const double n1 = 0.1 * x1 + 0.1 * u[k] + w1;
    x0 = n0;
    x1 = n1;
  }
  return r;
}

SimResult simulate_narendra_li(std::span<const double> u, uint64_t seed,
                               bool noise_on, double noise_std,
                               double x0_1, double x0_2, size_t noise_until) {
  check_finite_input(u, "simulate_narendra_li");
  CounterRng rng(seed);

  SimResult r;
  double x1 = x0_1, x2 = x0_2;
  for (size_t k = 0; k < u.size(); ++k) {
    const double e = noise_on && k < noise_until ? noise_std * rng.next_normal() : 0.0;
    const double yc = x1 / (1.0 + 0.5 * std::sin(x2)) + x2 / (1.0 + 0.5 * std::sin(x1));
    r.y_clean.push_back(yc);
    r.y.push_back(yc + e);
    r.states.push_back({x1, x2});
    const double uk = u[k];
    const double n1 = (x1 / (1.0 + x1 * x1)) * std::sin(x2);
    const double n2 = x2 * std::cos(x2) +
                      x1 * std::exp(-(x1 * x1 + x2 * x2) / 8.0) +
                      (uk * uk * uk) / (1.0 + uk * uk + 0.5 * std::cos(x1 + x2));
    if (!std::isfinite(n1) || !std::isfinite(n2))
      throw Error(ErrCode::numeric,
                  "simulate_narendra_li: state overflow at step " + std::to_string(k));
    x1 = n1;
    x2 = n2;
  }
  return r;
}

SimResult simulate_wh_surrogate(std::span<const double> u, uint64_t seed, bool noise_on,
                                size_t noise_until) {
  check_finite_input(u, "simulate_wh_surrogate");
  CounterRng rng(seed);
  const double w_std = 0.1;  // variance 0.01

  SimResult r;
  double v = 0.0, y = 0.0;
  for (size_t k = 0; k < u.size(); ++k) {
    v = 0.6 * v + 0.4 * u[k];
    const double w = noise_on && k < noise_until ? w_std * rng.next_normal() : 0.0;
    const double vn = v + w;
    const double f = vn - 0.6 * std::max(vn, 0.0);  // diode-style kink at 0
    y = 0.5 * y + 0.5 * f;
    r.y.push_back(y);
    r.y_clean.push_back(y);  // measurement noise off by default
    r.states.push_back({v, y});
  }
  return r;
}

std::vector<double> gen_uniform_input(size_t n, double lo, double hi, uint64_t seed) {
  if (lo >= hi)
    throw Error(ErrCode::invalid_argument, "gen_uniform_input: need lo < hi");
  CounterRng rng(seed);
  std::vector<double> u(n);
  for (double& x : u) x = rng.next_uniform(lo, hi);
  return u;
}

std::vector<double> gen_test_sine(size_t n) {
  std::vector<double> u(n);
  for (size_t k = 0; k < n; ++k)
    u[k] = std::sin(2.0 * k * kPi / 10.0) + std::sin(2.0 * k * kPi / 5.0);
  return u;
}

std::vector<double> gen_multisine(size_t n, double band_lo, double band_hi,
                                  int n_tones, uint64_t seed) {
  if (!(band_lo >= 0.0 && band_hi <= 0.5 && band_lo < band_hi) || n_tones < 1)
    throw Error(ErrCode::invalid_argument, "gen_multisine: invalid band");
  CounterRng rng(seed);

  // Distinct frequency bins inside the band.
  const int lo_bin = std::max(1, static_cast<int>(std::ceil(band_lo * n)));
  const int hi_bin = static_cast<int>(std::floor(band_hi * n));
  if (hi_bin - lo_bin + 1 < n_tones)
    throw Error(ErrCode::invalid_argument, "gen_multisine: band too narrow for tone count");
  const int span = hi_bin - lo_bin + 1;

  std::vector<double> u(n, 0.0);
  for (int tone = 0; tone < n_tones; ++tone) {
    const int bin = lo_bin + (span * tone) / n_tones;  // evenly spread, distinct
    const double phase = rng.next_uniform(0.0, 2.0 * kPi);
    const double f = static_cast<double>(bin) / n;
    for (size_t k = 0; k < n; ++k)
      u[k] += std::cos(2.0 * kPi * f * k + phase);
  }
  // Unit RMS before fading.
  double ss = 0.0;
  for (double x : u) ss += x * x;
  const double scale = 1.0 / std::sqrt(ss / n);
  for (double& x : u) x *= scale;
  // Linear fade-in/out over 5% of the length.
  const size_t fade = n / 20;
  for (size_t k = 0; k < fade; ++k) {
    const double w = static_cast<double>(k) / fade;
    u[k] *= w;
    u[n - 1 - k] *= w;
  }
  return u;
}

std::vector<double> gen_swept_sine(size_t n, double f0, double f1) {
  if (n < 1 || f0 < 0.0 || f1 < 0.0 || f0 > 0.5 || f1 > 0.5)
    throw Error(ErrCode::invalid_argument, "gen_swept_sine: invalid frequencies");
  std::vector<double> u(n);
  for (size_t k = 0; k < n; ++k) {
    // Instantaneous frequency f0 + (f1 - f0) k / n; phase is its integral.
    const double t = static_cast<double>(k);
    const double phase = 2.0 * kPi * (f0 * t + 0.5 * (f1 - f0) * t * t / n);
    u[k] = std::sin(phase);
  }
  return u;
}

void save_csv_dataset(const IoDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io, "save_csv_dataset: cannot write " + path);
  out << (ds.has_clean ? "k,u,y,y_clean\n" : "k,u,y\n");
  for (size_t k = 0; k < ds.y.size(); ++k) {
    out << k << ',' << fmt17(ds.u[k]) << ',' << fmt17(ds.y[k]);
    if (ds.has_clean) out << ',' << fmt17(ds.y_clean[k]);
    out << '\n';
  }
  if (!out) throw Error(ErrCode::io, "save_csv_dataset: write failed for " + path);

  std::ofstream meta(path + ".meta");
  if (!meta) throw Error(ErrCode::io, "save_csv_dataset: cannot write " + path + ".meta");
  meta << "seed=" << ds.seed << '\n';
  meta << "train=" << ds.train.begin << ':' << ds.train.end << '\n';
  meta << "val=" << ds.val.begin << ':' << ds.val.end << '\n';
  meta << "test=" << ds.test.begin << ':' << ds.test.end << '\n';
  for (const auto& [k, v] : ds.meta) meta << k << '=' << v << '\n';
}

IoDataset load_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrCode::io, "load_csv_dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrCode::io, "load_csv_dataset: empty file " + path);

  IoDataset ds;
  if (line == "k,u,y,y_clean")
    ds.has_clean = true;
  else if (line != "k,u,y")
    throw Error(ErrCode::io, "load_csv_dataset: bad header '" + line + "' in " + path);

  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const int want = ds.has_clean ? 4 : 3;
    double vals[4];
    std::stringstream ss(line);
    std::string cell;
    int got = 0;
    while (std::getline(ss, cell, ',') && got < 4) {
      char* end = nullptr;
      vals[got] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw Error(ErrCode::io, "load_csv_dataset: malformed value at line " +
                                     std::to_string(lineno));
      ++got;
    }
    if (got != want)
      throw Error(ErrCode::io, "load_csv_dataset: expected " + std::to_string(want) +
                                   " columns at line " + std::to_string(lineno));
    ds.u.push_back(vals[1]);
    ds.y.push_back(vals[2]);
    if (ds.has_clean) ds.y_clean.push_back(vals[3]);
  }

  // Optional sidecar with provenance and splits.
  std::ifstream meta(path + ".meta");
  if (meta) {
    auto parse_range = [](const std::string& v) {
      SplitRange r;
      const auto pos = v.find(':');
      if (pos == std::string::npos) throw Error(ErrCode::io, "bad split range: " + v);
      r.begin = std::stoull(v.substr(0, pos));
      r.end = std::stoull(v.substr(pos + 1));
      return r;
    };
    while (std::getline(meta, line)) {
      const auto pos = line.find('=');
      if (pos == std::string::npos) continue;
      const std::string key = line.substr(0, pos);
      const std::string val = line.substr(pos + 1);
      if (key == "seed")
        ds.seed = std::stoull(val);
      else if (key == "train")
        ds.train = parse_range(val);
      else if (key == "val")
        ds.val = parse_range(val);
      else if (key == "test")
        ds.test = parse_range(val);
      else
        ds.meta[key] = val;
    }
  } else {
    // No sidecar: default 70/10/20 split.
    const size_t n = ds.y.size();
    ds.train = {0, n * 7 / 10};
    ds.val = {n * 7 / 10, n * 8 / 10};
    ds.test = {n * 8 / 10, n};
  }
  ds.validate();
  return ds;
}

}  // namespace regenid
