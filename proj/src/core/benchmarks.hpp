#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace regenid {

struct SplitRange {
  size_t begin = 0;
  size_t end = 0;  // exclusive
  size_t size() const { return end - begin; }
};

// Paired input/output series with provenance. y_clean shares the process
// noise realization of y but omits measurement noise.
struct IoDataset {
  std::vector<double> u;
  std::vector<double> y;
  std::vector<double> y_clean;
  bool has_clean = false;
  uint64_t seed = 0;
  SplitRange train, val, test;
  std::map<std::string, std::string> meta;

  void validate() const;
};

struct SimResult {
  std::vector<double> y;
  std::vector<double> y_clean;
  std::vector<std::vector<double>> states;
};

// x_{k+1} = [[0.7, 0.8], [0, 0.1]] x_k + [-1, 0.1]^T u_k + w_k,  w ~ N(0, 0.5 I)
// y_k = x_k[0] + v_k,                                            v ~ N(0, 1)
// Noise applies only to steps k < noise_until, so a held-out evaluation
// segment can continue the same trajectory noise-free.
SimResult simulate_lgssm(std::span<const double> u, uint64_t seed, bool noise_on,
                         double x0_0 = 0.0, double x0_1 = 0.0,
                         size_t noise_until = SIZE_MAX);

// The Narendra-Li two-state nonlinear benchmark. Measurement noise std is
// configurable; the classical definition uses 1.0.
SimResult simulate_narendra_li(std::span<const double> u, uint64_t seed,
                               bool noise_on, double noise_std = 0.1,
                               double x0_1 = 0.0, double x0_2 = 0.0,
                               size_t noise_until = SIZE_MAX);

// Synthetic Wiener-Hammerstein stand-in: first-order LTI, additive process
// noise, diode-style piecewise-linear nonlinearity, first-order LTI.
SimResult simulate_wh_surrogate(std::span<const double> u, uint64_t seed, bool noise_on,
                                size_t noise_until = SIZE_MAX);

std::vector<double> gen_uniform_input(size_t n, double lo, double hi, uint64_t seed);

// u_k = sin(2 k pi / 10) + sin(2 k pi / 5)
std::vector<double> gen_test_sine(size_t n);

// Sum of n_tones equal-amplitude cosines at distinct bins inside
// [band_lo, band_hi] (cycles/sample) with seeded random phases, normalized
// to unit RMS, then faded in/out over 5% of the length.
std::vector<double> gen_multisine(size_t n, double band_lo, double band_hi,
                                  int n_tones, uint64_t seed);

// Linear chirp from f0 to f1 (cycles/sample), unit amplitude.
std::vector<double> gen_swept_sine(size_t n, double f0, double f1);

// CSV with header "k,u,y" or "k,u,y,y_clean"; 17 significant digits. A
// sidecar "<path>.meta" holds key=value provenance including split indices.
void save_csv_dataset(const IoDataset& ds, const std::string& path);
IoDataset load_csv_dataset(const std::string& path);

}  // namespace regenid
