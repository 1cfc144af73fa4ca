#include "core/nets.hpp"

#include <cmath>

namespace regenid {

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  throw Error(ErrCode::invalid_argument, "unknown activation: " + s);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

Tensor init_weight(int out, int in, CounterRng& rng) {
  Tensor w(out, in);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& x : w.data) x = rng.next_uniform(-bound, bound);
  return w;
}

DenseLayer::DenseLayer(const std::string& name, int in, int out, Activation a,
                       CounterRng& rng)
    : W(name + ".W", init_weight(out, in, rng)),
      b(name + ".b", Tensor(out, 1)),
      act(a),
      in_dim(in),
      out_dim(out) {}

void DenseLayer::zero() {
  std::fill(W.value.data.begin(), W.value.data.end(), 0.0);
  std::fill(b.value.data.begin(), b.value.data.end(), 0.0);
}

std::vector<Param*> DenseLayer::params() { return {&W, &b}; }

NodeId dense_forward(Graph& g, DenseLayer& layer, NodeId x) {
  if (g.value(x).rows != layer.in_dim)
    throw Error(ErrCode::shape_mismatch,
                "dense_forward(" + layer.W.name + "): input " +
                    g.value(x).shape_str() + " does not match declared in_dim " +
                    std::to_string(layer.in_dim));
  NodeId pre = g.add_col(g.matmul(g.bind(layer.W), x), g.bind(layer.b));
  switch (layer.act) {
    case Activation::identity: return pre;
    case Activation::tanh: return g.tanh(pre);
    case Activation::sigmoid: return g.sigmoid(pre);
    case Activation::relu: {
      // relu(x) = x - clamp(x, -inf, 0) is awkward; use clamp from below at 0
      // via max(x, 0) = clamp over a huge range.
      return g.clamp(pre, 0.0, 1e300);
    }
  }
  throw Error(ErrCode::internal, "dense_forward: bad activation");
}

GruCell::GruCell(const std::string& name, int in, int hidden, CounterRng& rng)
    : Wz(name + ".Wz", init_weight(hidden, in, rng)),
      Wr(name + ".Wr", init_weight(hidden, in, rng)),
      Wh(name + ".Wh", init_weight(hidden, in, rng)),
      Uz(name + ".Uz", init_weight(hidden, hidden, rng)),
      Ur(name + ".Ur", init_weight(hidden, hidden, rng)),
      Uh(name + ".Uh", init_weight(hidden, hidden, rng)),
      bz(name + ".bz", Tensor(hidden, 1)),
      br(name + ".br", Tensor(hidden, 1)),
      bh(name + ".bh", Tensor(hidden, 1)),
      in_dim(in),
      hidden_dim(hidden) {}

void GruCell::zero() {
  for (Param* p : params()) std::fill(p->value.data.begin(), p->value.data.end(), 0.0);
}

std::vector<Param*> GruCell::params() {
  return {&Wz, &Wr, &Wh, &Uz, &Ur, &Uh, &bz, &br, &bh};
}

int GruCell::param_count() const {
  return Wz.numel() + Wr.numel() + Wh.numel() + Uz.numel() + Ur.numel() +
         Uh.numel() + bz.numel() + br.numel() + bh.numel();
}

NodeId gru_step(Graph& g, GruCell& cell, NodeId x, NodeId h_prev) {
  if (g.value(x).rows != cell.in_dim || g.value(h_prev).rows != cell.hidden_dim)
    throw Error(ErrCode::shape_mismatch,
                "gru_step: x " + g.value(x).shape_str() + ", h " +
                    g.value(h_prev).shape_str() + " vs cell (in=" +
                    std::to_string(cell.in_dim) + ", hidden=" +
                    std::to_string(cell.hidden_dim) + ")");
  NodeId zg = g.sigmoid(g.add_col(
      g.add(g.matmul(g.bind(cell.Wz), x), g.matmul(g.bind(cell.Uz), h_prev)),
      g.bind(cell.bz)));
  NodeId r = g.sigmoid(g.add_col(
      g.add(g.matmul(g.bind(cell.Wr), x), g.matmul(g.bind(cell.Ur), h_prev)),
      g.bind(cell.br)));
  NodeId hc = g.tanh(g.add_col(
      g.add(g.matmul(g.bind(cell.Wh), x),
            g.matmul(g.bind(cell.Uh), g.mul(r, h_prev))),
      g.bind(cell.bh)));
  NodeId one_minus_z = g.add_const(g.scale(zg, -1.0), 1.0);
  return g.add(g.mul(one_minus_z, h_prev), g.mul(zg, hc));
}

GaussianHead::GaussianHead(const std::string& name, int in, int out, CounterRng& rng)
    : mean_layer(name + ".mean", in, out, Activation::identity, rng),
      logvar_layer(name + ".logvar", in, out, Activation::identity, rng) {}

void GaussianHead::zero() {
  mean_layer.zero();
  logvar_layer.zero();
}

std::vector<Param*> GaussianHead::params() {
  return {&mean_layer.W, &mean_layer.b, &logvar_layer.W, &logvar_layer.b};
}

GaussNodes head_forward(Graph& g, GaussianHead& head, NodeId phi) {
  GaussNodes out;
  out.mean = dense_forward(g, head.mean_layer, phi);
  out.logvar = g.clamp(dense_forward(g, head.logvar_layer, phi), kLogvarMin, kLogvarMax);
  return out;
}

}  // namespace regenid
