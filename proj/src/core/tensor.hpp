#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace regenid {

enum class ErrCode {
  invalid_argument = 1,
  shape_mismatch = 2,
  io = 3,
  numeric = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
  ErrCode code;
};

// Dense row-major real array, rank <= 2. Column vectors are rows x 1,
// scalars 1 x 1. All numerics are double.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  static Tensor scalar(double v) {
    Tensor t(1, 1);
    t.data[0] = v;
    return t;
  }
  static Tensor colvec(std::vector<double> v) {
    Tensor t;
    t.rows = static_cast<int>(v.size());
    t.cols = 1;
    t.data = std::move(v);
    return t;
  }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  int numel() const { return rows * cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  std::string shape_str() const {
    return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
  }
};

}  // namespace regenid
