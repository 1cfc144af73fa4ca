#pragma once

#include <memory>
#include <vector>

#include "core/nets.hpp"

namespace regenid {

struct TeacherConfig {
  int y_dim = 1;
  int h_dim = 0;                   // GRU hidden width; also the latent width
  int z_dim = 0;
  std::vector<int> proj_hidden;    // widths between concat(h, z) and repr
  int repr_dim = 0;
  std::vector<int> prior_hidden;   // hidden widths of prior net (encoder mirrors)
  bool identity_projection = false;  // phi_T = concat(h, z) verbatim
};

// VRNN generative model over output sequences. The decoder head (theta_C)
// is owned elsewhere and shared with the student.
struct Teacher {
  TeacherConfig cfg;
  GruCell gru;
  std::vector<DenseLayer> prior_stack;
  GaussianHead prior_head;     // h -> (mu_z, logvar_z)
  std::vector<DenseLayer> enc_stack;
  GaussianHead enc_head;       // concat(y, h) -> (mu_z, logvar_z), the q network
  std::vector<DenseLayer> proj_stack;  // concat(h, z) -> repr, tanh throughout

  Teacher() = default;
  Teacher(const TeacherConfig& c, CounterRng& rng, const std::string& prefix = "teacher");

  std::vector<Param*> params();  // theta_T plus lambda; head excluded
  int param_count() const;
  void zero();
};

// h_t = gru(concat(y_prev, z_prev), h_prev)
NodeId hidden_update(Graph& g, Teacher& t, NodeId h_prev, NodeId y_prev, NodeId z_prev);

GaussNodes prior(Graph& g, Teacher& t, NodeId h);
GaussNodes encode(Graph& g, Teacher& t, NodeId y, NodeId h);

// z = mu + exp(logvar / 2) * eps
NodeId reparam_sample(Graph& g, GaussNodes q, NodeId eps);

// Closed-form KL between diagonal Gaussians, summed over every entry
// (latent dims and batch columns).
NodeId kl_gaussian(Graph& g, GaussNodes q, GaussNodes p);

// Gaussian negative log density, summed over every entry.
NodeId nll_gaussian(Graph& g, NodeId y, GaussNodes dist);

struct RolloutResult {
  std::vector<NodeId> phi;          // phi_T(t), repr_dim x batch
  std::vector<GaussNodes> decoded;  // P(y_t | phi_T(t)) through the shared head
  std::vector<NodeId> kl;           // scalar KL(q || prior) per step
};

// Runs the recurrence over T steps. y_steps[t] and eps_steps[t] are
// y_dim x batch and z_dim x batch tensors. h_0, y_0, z_0 are zero vectors.
RolloutResult teacher_rollout(Graph& g, Teacher& t, GaussianHead& head,
                              const std::vector<Tensor>& y_steps,
                              const std::vector<Tensor>& eps_steps);

}  // namespace regenid
