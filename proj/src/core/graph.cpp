#include "core/graph.hpp"

#include <algorithm>
#include <cmath>

namespace regenid {

namespace {

void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw Error(ErrCode::shape_mismatch,
              std::string(op) + ": incompatible shapes " + a.shape_str() +
                  " vs " + b.shape_str());
}

// dst += src, allocating dst at `shape` on first touch.
void accumulate(Tensor& dst, int rows, int cols, const double* src, int n) {
  if (dst.numel() == 0) dst = Tensor(rows, cols);
  for (int i = 0; i < n; ++i) dst.data[i] += src[i];
}

}  // namespace

NodeId Graph::push(Rec r) {
  recs_.push_back(std::move(r));
  return static_cast<NodeId>(recs_.size() - 1);
}

NodeId Graph::input(Tensor v) {
  Rec r;
  r.op = Op::kConst;
  r.value = std::move(v);
  return push(std::move(r));
}

NodeId Graph::bind(Param& p) {
  Rec r;
  r.op = Op::kLeaf;
  r.value = p.value;
  r.rg = true;
  r.param = &p;
  return push(std::move(r));
}

NodeId Graph::binary_elementwise(Op op, NodeId a, NodeId b, const char* opname) {
  const Tensor& va = recs_[a].value;
  const Tensor& vb = recs_[b].value;
  const bool sa = va.is_scalar();
  const bool sb = vb.is_scalar();
  if (!va.same_shape(vb) && !sa && !sb) shape_error(opname, va, vb);

  const Tensor& big = sa ? vb : va;
  Rec r;
  r.op = op;
  r.p0 = a;
  r.p1 = b;
  r.rg = recs_[a].rg || recs_[b].rg;
  r.value = Tensor(big.rows, big.cols);
  const int n = big.numel();
  for (int i = 0; i < n; ++i) {
    const double x = sa ? va.data[0] : va.data[i];
    const double y = sb ? vb.data[0] : vb.data[i];
    switch (op) {
      case Op::kAdd: r.value.data[i] = x + y; break;
      case Op::kSub: r.value.data[i] = x - y; break;
      case Op::kMul: r.value.data[i] = x * y; break;
      default: throw Error(ErrCode::internal, "binary_elementwise: bad op");
    }
  }
  return push(std::move(r));
}

NodeId Graph::add(NodeId a, NodeId b) { return binary_elementwise(Op::kAdd, a, b, "add"); }
NodeId Graph::sub(NodeId a, NodeId b) { return binary_elementwise(Op::kSub, a, b, "sub"); }
NodeId Graph::mul(NodeId a, NodeId b) { return binary_elementwise(Op::kMul, a, b, "mul"); }

NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& va = recs_[a].value;
  const Tensor& vb = recs_[b].value;
  if (va.cols != vb.rows) shape_error("matmul", va, vb);
  Rec r;
  r.op = Op::kMatMul;
  r.p0 = a;
  r.p1 = b;
  r.rg = recs_[a].rg || recs_[b].rg;
  r.value = Tensor(va.rows, vb.cols);
  for (int i = 0; i < va.rows; ++i) {
    for (int k = 0; k < va.cols; ++k) {
      const double aik = va.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = &vb.data[static_cast<size_t>(k) * vb.cols];
      double* orow = &r.value.data[static_cast<size_t>(i) * vb.cols];
      for (int j = 0; j < vb.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return push(std::move(r));
}

NodeId Graph::concat_rows(NodeId a, NodeId b) {
  const Tensor& va = recs_[a].value;
  const Tensor& vb = recs_[b].value;
  if (va.cols != vb.cols) shape_error("concat", va, vb);
  Rec r;
  r.op = Op::kConcatRows;
  r.p0 = a;
  r.p1 = b;
  r.rg = recs_[a].rg || recs_[b].rg;
  r.value = Tensor(va.rows + vb.rows, va.cols);
  std::copy(va.data.begin(), va.data.end(), r.value.data.begin());
  std::copy(vb.data.begin(), vb.data.end(), r.value.data.begin() + va.numel());
  return push(std::move(r));
}

NodeId Graph::slice_rows(NodeId a, int r0, int r1) {
  const Tensor& va = recs_[a].value;
  if (r0 < 0 || r1 > va.rows || r0 >= r1)
    throw Error(ErrCode::shape_mismatch,
                "slice: rows [" + std::to_string(r0) + "," + std::to_string(r1) +
                    ") out of range for " + va.shape_str());
  Rec r;
  r.op = Op::kSliceRows;
  r.p0 = a;
  r.rg = recs_[a].rg;
  r.a = r0;
  r.b = r1;
  r.value = Tensor(r1 - r0, va.cols);
  std::copy(va.data.begin() + static_cast<size_t>(r0) * va.cols,
            va.data.begin() + static_cast<size_t>(r1) * va.cols,
            r.value.data.begin());
  return push(std::move(r));
}

NodeId Graph::sum(NodeId a) {
  const Tensor& va = recs_[a].value;
  Rec r;
  r.op = Op::kSum;
  r.p0 = a;
  r.rg = recs_[a].rg;
  double s = 0.0;
  for (double x : va.data) s += x;
  r.value = Tensor::scalar(s);
  return push(std::move(r));
}

NodeId Graph::mean(NodeId a) {
  const Tensor& va = recs_[a].value;
  Rec r;
  r.op = Op::kMean;
  r.p0 = a;
  r.rg = recs_[a].rg;
  double s = 0.0;
  for (double x : va.data) s += x;
  r.value = Tensor::scalar(s / va.numel());
  return push(std::move(r));
}

#define REGENID_UNARY(NAME, OPTAG, EXPR)               \
  NodeId Graph::NAME(NodeId a) {                       \
    const Tensor& va = recs_[a].value;                 \
    Rec r;                                             \
    r.op = OPTAG;                                      \
    r.p0 = a;                                          \
    r.rg = recs_[a].rg;                                \
    r.value = Tensor(va.rows, va.cols);                \
    for (int i = 0; i < va.numel(); ++i) {             \
      const double x = va.data[i];                     \
      r.value.data[i] = (EXPR);                        \
    }                                                  \
    return push(std::move(r));                         \
  }

REGENID_UNARY(square, Op::kSquare, x * x)
REGENID_UNARY(exp, Op::kExp, std::exp(x))
REGENID_UNARY(log, Op::kLog, std::log(x))
REGENID_UNARY(tanh, Op::kTanh, std::tanh(x))
REGENID_UNARY(sigmoid, Op::kSigmoid, 1.0 / (1.0 + std::exp(-x)))
REGENID_UNARY(softplus, Op::kSoftplus, x > 30.0 ? x : std::log1p(std::exp(x)))
#undef REGENID_UNARY

NodeId Graph::scale(NodeId a, double k) {
  const Tensor& va = recs_[a].value;
  Rec r;
  r.op = Op::kScale;
  r.p0 = a;
  r.rg = recs_[a].rg;
  r.a = k;
  r.value = Tensor(va.rows, va.cols);
  for (int i = 0; i < va.numel(); ++i) r.value.data[i] = k * va.data[i];
  return push(std::move(r));
}

NodeId Graph::add_const(NodeId a, double c) {
  const Tensor& va = recs_[a].value;
  Rec r;
  r.op = Op::kAddConst;
  r.p0 = a;
  r.rg = recs_[a].rg;
  r.a = c;
  r.value = Tensor(va.rows, va.cols);
  for (int i = 0; i < va.numel(); ++i) r.value.data[i] = va.data[i] + c;
  return push(std::move(r));
}

NodeId Graph::add_col(NodeId mat, NodeId col) {
  const Tensor& vm = recs_[mat].value;
  const Tensor& vc = recs_[col].value;
  if (vc.cols != 1 || vc.rows != vm.rows) shape_error("add_col", vm, vc);
  Rec r;
  r.op = Op::kAddCol;
  r.p0 = mat;
  r.p1 = col;
  r.rg = recs_[mat].rg || recs_[col].rg;
  r.value = Tensor(vm.rows, vm.cols);
  for (int i = 0; i < vm.rows; ++i)
    for (int j = 0; j < vm.cols; ++j)
      r.value.at(i, j) = vm.at(i, j) + vc.data[i];
  return push(std::move(r));
}

NodeId Graph::clamp(NodeId a, double lo, double hi) {
  const Tensor& va = recs_[a].value;
  Rec r;
  r.op = Op::kClamp;
  r.p0 = a;
  r.rg = recs_[a].rg;
  r.a = lo;
  r.b = hi;
  r.value = Tensor(va.rows, va.cols);
  for (int i = 0; i < va.numel(); ++i)
    r.value.data[i] = std::min(hi, std::max(lo, va.data[i]));
  return push(std::move(r));
}

void Graph::backprop_rec(int id, const Tensor& g, std::vector<Tensor>& local) {
  Rec& rec = recs_[id];
  auto addg = [&](int pid, auto&& fill) {
    if (pid < 0 || !recs_[pid].rg) return;
    const Tensor& pv = recs_[pid].value;
    if (local[pid].numel() == 0) local[pid] = Tensor(pv.rows, pv.cols);
    fill(local[pid]);
  };
  const Tensor* va = rec.p0 >= 0 ? &recs_[rec.p0].value : nullptr;
  const Tensor* vb = rec.p1 >= 0 ? &recs_[rec.p1].value : nullptr;

  switch (rec.op) {
    case Op::kConst:
    case Op::kLeaf:
      break;
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul: {
      const bool sa = va->is_scalar() && !g.is_scalar();
      const bool sb = vb->is_scalar() && !g.is_scalar();
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) {
          double w = 1.0;
          if (rec.op == Op::kMul) w = sb ? vb->data[0] : vb->data[i];
          d.data[sa ? 0 : i] += w * g.data[i];
        }
      });
      addg(rec.p1, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) {
          double w = 1.0;
          if (rec.op == Op::kMul)
            w = sa ? va->data[0] : va->data[i];
          else if (rec.op == Op::kSub)
            w = -1.0;
          d.data[sb ? 0 : i] += w * g.data[i];
        }
      });
      break;
    }
    case Op::kMatMul: {
      addg(rec.p0, [&](Tensor& d) {  // dA = G * B^T
        for (int i = 0; i < va->rows; ++i)
          for (int k = 0; k < va->cols; ++k) {
            double s = 0.0;
            for (int j = 0; j < vb->cols; ++j) s += g.at(i, j) * vb->at(k, j);
            d.at(i, k) += s;
          }
      });
      addg(rec.p1, [&](Tensor& d) {  // dB = A^T * G
        for (int k = 0; k < vb->rows; ++k)
          for (int j = 0; j < vb->cols; ++j) {
            double s = 0.0;
            for (int i = 0; i < va->rows; ++i) s += va->at(i, k) * g.at(i, j);
            d.at(k, j) += s;
          }
      });
      break;
    }
    case Op::kConcatRows: {
      const int na = va->numel();
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < na; ++i) d.data[i] += g.data[i];
      });
      addg(rec.p1, [&](Tensor& d) {
        for (int i = 0; i < vb->numel(); ++i) d.data[i] += g.data[na + i];
      });
      break;
    }
    case Op::kSliceRows: {
      const int r0 = static_cast<int>(rec.a);
      addg(rec.p0, [&](Tensor& d) {
        const size_t off = static_cast<size_t>(r0) * va->cols;
        for (int i = 0; i < g.numel(); ++i) d.data[off + i] += g.data[i];
      });
      break;
    }
    case Op::kSum:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < d.numel(); ++i) d.data[i] += g.data[0];
      });
      break;
    case Op::kMean:
      addg(rec.p0, [&](Tensor& d) {
        const double w = g.data[0] / va->numel();
        for (int i = 0; i < d.numel(); ++i) d.data[i] += w;
      });
      break;
    case Op::kSquare:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) d.data[i] += 2.0 * va->data[i] * g.data[i];
      });
      break;
    case Op::kExp:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) d.data[i] += rec.value.data[i] * g.data[i];
      });
      break;
    case Op::kLog:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) d.data[i] += g.data[i] / va->data[i];
      });
      break;
    case Op::kTanh:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) {
          const double y = rec.value.data[i];
          d.data[i] += (1.0 - y * y) * g.data[i];
        }
      });
      break;
    case Op::kSigmoid:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) {
          const double y = rec.value.data[i];
          d.data[i] += y * (1.0 - y) * g.data[i];
        }
      });
      break;
    case Op::kSoftplus:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) {
          const double s = 1.0 / (1.0 + std::exp(-va->data[i]));
          d.data[i] += s * g.data[i];
        }
      });
      break;
    case Op::kScale:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) d.data[i] += rec.a * g.data[i];
      });
      break;
    case Op::kAddConst:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) d.data[i] += g.data[i];
      });
      break;
    case Op::kAddCol: {
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) d.data[i] += g.data[i];
      });
      addg(rec.p1, [&](Tensor& d) {
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) d.data[i] += g.at(i, j);
      });
      break;
    }
    case Op::kClamp:
      addg(rec.p0, [&](Tensor& d) {
        for (int i = 0; i < g.numel(); ++i) {
          const double x = va->data[i];
          if (x >= rec.a && x <= rec.b) d.data[i] += g.data[i];
        }
      });
      break;
  }
}

void Graph::backward(NodeId loss) {
  if (!recs_[loss].value.is_scalar())
    throw Error(ErrCode::invalid_argument,
                "backward: loss must be scalar, got " +
                    recs_[loss].value.shape_str());

  // Nodes are appended in construction order, so every parent index is
  // smaller than its child's; a descending id sweep is a topological order.
  // Pass-local gradient buffers keep repeated backward calls additive.
  std::vector<Tensor> local(recs_.size());
  local[loss] = Tensor::scalar(1.0);
  for (int id = loss; id >= 0; --id) {
    if (local[id].numel() == 0 || !recs_[id].rg) continue;
    backprop_rec(id, local[id], local);
  }
  for (int id = loss; id >= 0; --id) {
    if (local[id].numel() == 0 || !recs_[id].rg) continue;
    Rec& rec = recs_[id];
    accumulate(rec.grad, rec.value.rows, rec.value.cols, local[id].data.data(),
               local[id].numel());
    if (rec.param != nullptr)
      accumulate(rec.param->grad, rec.value.rows, rec.value.cols,
                 local[id].data.data(), local[id].numel());
  }
}

GradCheckReport gradient_check(const std::function<NodeId(Graph&)>& build,
                               std::span<Param* const> params, double step,
                               double tol) {
  // Analytic pass.
  for (Param* p : params) p->zero_grad();
  std::vector<Tensor> analytic;
  {
    Graph g;
    NodeId loss = build(g);
    g.backward(loss);
  }
  for (Param* p : params) analytic.push_back(p->grad);

  auto eval = [&]() {
    Graph g;
    NodeId loss = build(g);
    return g.value(loss).data[0];
  };

  GradCheckReport report;
  report.pass = true;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Param& p = *params[pi];
    GradCheckReport::Entry entry;
    entry.name = p.name;
    for (int i = 0; i < p.numel(); ++i) {
      const double saved = p.value.data[i];
      p.value.data[i] = saved + step;
      const double fp = eval();
      p.value.data[i] = saved - step;
      const double fm = eval();
      p.value.data[i] = saved;
      const double numeric = (fp - fm) / (2.0 * step);
      const double a = analytic[pi].data[i];
      if (!std::isfinite(numeric) || !std::isfinite(a))
        throw Error(ErrCode::numeric,
                    "gradient_check: non-finite gradient for parameter " +
                        p.name + "[" + std::to_string(i) + "]");
      // Central differences of an O(1) loss carry ~1e-11 absolute noise, so
      // entries whose true gradient sits below 1e-6 are compared absolutely
      // at that floor rather than relatively.
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
      entry.max_rel_err = std::max(entry.max_rel_err, std::fabs(a - numeric) / denom);
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    if (entry.max_rel_err >= tol) report.pass = false;
    report.entries.push_back(std::move(entry));
  }
  if (params.empty()) report.pass = true;
  return report;
}

}  // namespace regenid
