#pragma once

#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"

namespace regenid {

enum class Activation { identity, tanh, relu, sigmoid };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// Fully connected layer, activation(W x + b). Inputs may be batched as
// in_dim x batch matrices.
struct DenseLayer {
  Param W;  // out x in
  Param b;  // out x 1
  Activation act = Activation::identity;
  int in_dim = 0;
  int out_dim = 0;

  DenseLayer() = default;
  DenseLayer(const std::string& name, int in, int out, Activation a, CounterRng& rng);

  void zero();
  std::vector<Param*> params();
  int param_count() const { return W.numel() + b.numel(); }
};

NodeId dense_forward(Graph& g, DenseLayer& layer, NodeId x);

// Standard gated recurrent cell:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   hc = tanh(Wh x + Uh (r*h) + bh)
//   h' = (1 - z)*h + z*hc
struct GruCell {
  Param Wz, Wr, Wh;  // hidden x input
  Param Uz, Ur, Uh;  // hidden x hidden
  Param bz, br, bh;  // hidden x 1
  int in_dim = 0;
  int hidden_dim = 0;

  GruCell() = default;
  GruCell(const std::string& name, int in, int hidden, CounterRng& rng);

  void zero();
  std::vector<Param*> params();
  int param_count() const;
};

NodeId gru_step(Graph& g, GruCell& cell, NodeId x, NodeId h_prev);

// Mean/log-variance nodes of a diagonal Gaussian, possibly batched
// (dim x batch).
struct GaussNodes {
  NodeId mean = -1;
  NodeId logvar = -1;
};

// Gaussian output head: two identity-activation dense layers over the same
// representation. Log-variance is clamped to [-10, 10] before any
// exponentiation downstream.
struct GaussianHead {
  DenseLayer mean_layer;
  DenseLayer logvar_layer;

  GaussianHead() = default;
  GaussianHead(const std::string& name, int in, int out, CounterRng& rng);

  void zero();
  std::vector<Param*> params();
  int param_count() const { return mean_layer.param_count() + logvar_layer.param_count(); }
  int in_dim() const { return mean_layer.in_dim; }
  int out_dim() const { return mean_layer.out_dim; }
};

constexpr double kLogvarMin = -10.0;
constexpr double kLogvarMax = 10.0;

GaussNodes head_forward(Graph& g, GaussianHead& head, NodeId phi);

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Tensor init_weight(int out, int in, CounterRng& rng);

}  // namespace regenid
