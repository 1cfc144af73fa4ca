#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace regenid {

// A learnable array living outside any graph. Gradients accumulate into
// `grad`; `m` and `v` are Adam moment buffers.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;
  Tensor v;

  Param() = default;
  Param(std::string n, Tensor t) : name(std::move(n)), value(std::move(t)) {
    grad = Tensor(value.rows, value.cols);
    m = grad;
    v = grad;
  }
  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
  int numel() const { return value.numel(); }
};

using NodeId = int;

// Reverse-mode computation graph over Tensors. A graph is built fresh per
// training step; parameters are bound in as leaves and receive gradient
// contributions on backward(). Elementwise binary ops broadcast only
// scalar-with-array.
class Graph {
 public:
  NodeId input(Tensor v);            // constant, no gradient
  NodeId bind(Param& p);             // differentiable leaf backed by p

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);    // elementwise
  NodeId matmul(NodeId a, NodeId b);
  NodeId concat_rows(NodeId a, NodeId b);
  NodeId slice_rows(NodeId a, int r0, int r1);  // rows [r0, r1)
  NodeId sum(NodeId a);              // -> scalar
  NodeId mean(NodeId a);             // -> scalar
  NodeId square(NodeId a);
  NodeId exp(NodeId a);
  NodeId log(NodeId a);
  NodeId tanh(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId softplus(NodeId a);
  NodeId scale(NodeId a, double k);       // k * a
  NodeId add_const(NodeId a, double c);   // a + c
  NodeId add_col(NodeId mat, NodeId col); // broadcast column vector over columns
  NodeId clamp(NodeId a, double lo, double hi);

  // Accumulates dLoss/dNode into every reachable node and into the bound
  // Params. Repeated calls accumulate further.
  void backward(NodeId loss);

  const Tensor& value(NodeId n) const { return recs_[n].value; }
  const Tensor& grad(NodeId n) const { return recs_[n].grad; }
  bool requires_grad(NodeId n) const { return recs_[n].rg; }
  size_t size() const { return recs_.size(); }

 private:
  enum class Op {
    kConst, kLeaf, kAdd, kSub, kMul, kMatMul, kConcatRows, kSliceRows,
    kSum, kMean, kSquare, kExp, kLog, kTanh, kSigmoid, kSoftplus,
    kScale, kAddConst, kAddCol, kClamp,
  };
  struct Rec {
    Op op;
    Tensor value;
    Tensor grad;       // persistent accumulated gradient
    bool rg = false;
    Param* param = nullptr;
    int p0 = -1;
    int p1 = -1;
    double a = 0.0;    // op-specific constants (scale factor, clamp bounds)
    double b = 0.0;
  };

  NodeId push(Rec r);
  NodeId binary_elementwise(Op op, NodeId a, NodeId b, const char* opname);
  void backprop_rec(int id, const Tensor& g, std::vector<Tensor>& local);

  std::vector<Rec> recs_;
};

// Per-parameter comparison of analytic gradients against central finite
// differences of a scalar graph. `build` must be deterministic given the
// current param values.
struct GradCheckReport {
  struct Entry {
    std::string name;
    double max_rel_err = 0.0;
  };
  std::vector<Entry> entries;
  double max_rel_err = 0.0;
  bool pass = false;
};

GradCheckReport gradient_check(const std::function<NodeId(Graph&)>& build,
                               std::span<Param* const> params, double step,
                               double tol);

}  // namespace regenid
