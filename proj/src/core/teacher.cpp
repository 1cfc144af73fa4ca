#include "core/teacher.hpp"

#include <cmath>

namespace regenid {

namespace {

std::vector<DenseLayer> make_stack(const std::string& prefix, int in,
                                   const std::vector<int>& widths,
                                   CounterRng& rng) {
  std::vector<DenseLayer> stack;
  int d = in;
  for (size_t i = 0; i < widths.size(); ++i) {
    stack.emplace_back(prefix + std::to_string(i), d, widths[i],
                       Activation::tanh, rng);
    d = widths[i];
  }
  return stack;
}

NodeId run_stack(Graph& g, std::vector<DenseLayer>& stack, NodeId x) {
  for (auto& layer : stack) x = dense_forward(g, layer, x);
  return x;
}

}  // namespace

Teacher::Teacher(const TeacherConfig& c, CounterRng& rng, const std::string& prefix)
    : cfg(c) {
  if (c.h_dim <= 0 || c.z_dim <= 0 || c.repr_dim <= 0 || c.y_dim <= 0)
    throw Error(ErrCode::invalid_argument, "Teacher: dims must be positive");
  gru = GruCell(prefix + ".gru", c.y_dim + c.z_dim, c.h_dim, rng);

  prior_stack = make_stack(prefix + ".prior.", c.h_dim, c.prior_hidden, rng);
  const int prior_in = c.prior_hidden.empty() ? c.h_dim : c.prior_hidden.back();
  prior_head = GaussianHead(prefix + ".prior.out", prior_in, c.z_dim, rng);

  enc_stack = make_stack(prefix + ".enc.", c.y_dim + c.h_dim, c.prior_hidden, rng);
  const int enc_in = c.prior_hidden.empty() ? c.y_dim + c.h_dim : c.prior_hidden.back();
  enc_head = GaussianHead(prefix + ".enc.out", enc_in, c.z_dim, rng);

  if (c.identity_projection) {
    if (c.repr_dim != c.h_dim + c.z_dim)
      throw Error(ErrCode::invalid_argument,
                  "Teacher: identity projection needs repr_dim == h_dim + z_dim");
  } else {
    std::vector<int> proj_widths = c.proj_hidden;
    proj_widths.push_back(c.repr_dim);
    proj_stack = make_stack(prefix + ".proj.", c.h_dim + c.z_dim, proj_widths, rng);
  }
}

std::vector<Param*> Teacher::params() {
  std::vector<Param*> out = gru.params();
  auto append = [&](std::vector<Param*> ps) {
    out.insert(out.end(), ps.begin(), ps.end());
  };
  for (auto& l : prior_stack) append(l.params());
  append(prior_head.params());
  for (auto& l : enc_stack) append(l.params());
  append(enc_head.params());
  for (auto& l : proj_stack) append(l.params());
  return out;
}

int Teacher::param_count() const {
  int n = gru.param_count();
  for (const auto& l : prior_stack) n += l.param_count();
  n += prior_head.param_count();
  for (const auto& l : enc_stack) n += l.param_count();
  n += enc_head.param_count();
  for (const auto& l : proj_stack) n += l.param_count();
  return n;
}

void Teacher::zero() {
  gru.zero();
  for (auto& l : prior_stack) l.zero();
  prior_head.zero();
  for (auto& l : enc_stack) l.zero();
  enc_head.zero();
  for (auto& l : proj_stack) l.zero();
}

NodeId hidden_update(Graph& g, Teacher& t, NodeId h_prev, NodeId y_prev, NodeId z_prev) {
  return gru_step(g, t.gru, g.concat_rows(y_prev, z_prev), h_prev);
}

GaussNodes prior(Graph& g, Teacher& t, NodeId h) {
  return head_forward(g, t.prior_head, run_stack(g, t.prior_stack, h));
}

GaussNodes encode(Graph& g, Teacher& t, NodeId y, NodeId h) {
  NodeId x = g.concat_rows(y, h);
  return head_forward(g, t.enc_head, run_stack(g, t.enc_stack, x));
}

NodeId reparam_sample(Graph& g, GaussNodes q, NodeId eps) {
  if (g.value(eps).rows != g.value(q.mean).rows ||
      g.value(eps).cols != g.value(q.mean).cols)
    throw Error(ErrCode::shape_mismatch,
                "reparam_sample: eps " + g.value(eps).shape_str() +
                    " vs mean " + g.value(q.mean).shape_str());
  NodeId std_dev = g.exp(g.scale(q.logvar, 0.5));
  return g.add(q.mean, g.mul(std_dev, eps));
}

NodeId kl_gaussian(Graph& g, GaussNodes q, GaussNodes p) {
  if (g.value(q.mean).rows != g.value(p.mean).rows ||
      g.value(q.mean).cols != g.value(p.mean).cols)
    throw Error(ErrCode::shape_mismatch,
                "kl_gaussian: q " + g.value(q.mean).shape_str() + " vs p " +
                    g.value(p.mean).shape_str());
  // 1/2 sum[ logvar_p - logvar_q - 1 + (mu_q - mu_p)^2 / var_p + var_q / var_p ]
  NodeId inv_var_p = g.exp(g.scale(p.logvar, -1.0));
  NodeId diff2 = g.square(g.sub(q.mean, p.mean));
  NodeId var_q = g.exp(q.logvar);
  NodeId terms = g.add(
      g.add_const(g.sub(p.logvar, q.logvar), -1.0),
      g.mul(g.add(diff2, var_q), inv_var_p));
  return g.scale(g.sum(terms), 0.5);
}

NodeId nll_gaussian(Graph& g, NodeId y, GaussNodes dist) {
  if (g.value(y).rows != g.value(dist.mean).rows ||
      g.value(y).cols != g.value(dist.mean).cols)
    throw Error(ErrCode::shape_mismatch,
                "nll_gaussian: y " + g.value(y).shape_str() + " vs mean " +
                    g.value(dist.mean).shape_str());
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  NodeId resid2 = g.square(g.sub(y, dist.mean));
  NodeId terms = g.add(g.add_const(dist.logvar, kLog2Pi),
                       g.mul(resid2, g.exp(g.scale(dist.logvar, -1.0))));
  return g.scale(g.sum(terms), 0.5);
}

RolloutResult teacher_rollout(Graph& g, Teacher& t, GaussianHead& head,
                              const std::vector<Tensor>& y_steps,
                              const std::vector<Tensor>& eps_steps) {
  if (y_steps.empty())
    throw Error(ErrCode::invalid_argument, "teacher_rollout: empty sequence");
  if (eps_steps.size() != y_steps.size())
    throw Error(ErrCode::invalid_argument,
                "teacher_rollout: eps sequence length mismatch");
  const int batch = y_steps[0].cols;

  RolloutResult out;
  NodeId h = g.input(Tensor(t.cfg.h_dim, batch));
  NodeId y_prev = g.input(Tensor(t.cfg.y_dim, batch));
  NodeId z_prev = g.input(Tensor(t.cfg.z_dim, batch));
  for (size_t step = 0; step < y_steps.size(); ++step) {
    h = hidden_update(g, t, h, y_prev, z_prev);
    NodeId y_t = g.input(y_steps[step]);
    GaussNodes posterior = encode(g, t, y_t, h);
    NodeId z = reparam_sample(g, posterior, g.input(eps_steps[step]));
    NodeId phi = run_stack(g, t.proj_stack, g.concat_rows(h, z));
    out.phi.push_back(phi);
    out.decoded.push_back(head_forward(g, head, phi));
    out.kl.push_back(kl_gaussian(g, posterior, prior(g, t, h)));
    y_prev = y_t;
    z_prev = z;
  }
  return out;
}

}  // namespace regenid
