#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace regenid {

void ModelSpec::validate() const {
  lags.validate();
  if (kind == ModelKind::baseline) {
    if (baseline_hidden.empty())
      throw Error(ErrCode::invalid_argument, "ModelSpec: baseline needs hidden widths");
  } else {
    if (student_hidden.empty())
      throw Error(ErrCode::invalid_argument, "ModelSpec: student needs hidden widths");
    if (gru_hidden <= 0)
      throw Error(ErrCode::invalid_argument, "ModelSpec: regenerative needs gru_hidden > 0");
  }
  for (int w : hidden())
    if (w <= 0) throw Error(ErrCode::invalid_argument, "ModelSpec: widths must be positive");
}

std::string ModelSpec::architecture() const {
  std::string s = std::to_string(lags.dim());
  for (int w : hidden()) s += "-" + std::to_string(w);
  return s + "-1";
}

void TrainConfig::validate() const {
  if (lr <= 0 || beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1 || eps <= 0 ||
      max_epochs < 1 || patience < 1 || subseq_len < 1 || batch_size < 1)
    throw Error(ErrCode::invalid_argument, "TrainConfig: invalid values");
  weights.validate();
}

Standardizer Standardizer::from_range(const IoDataset& ds, const SplitRange& r) {
  if (r.size() < 2)
    throw Error(ErrCode::invalid_argument, "Standardizer: range too short");
  auto stats = [&](const std::vector<double>& x) {
    double mu = 0.0;
    for (size_t i = r.begin; i < r.end; ++i) mu += x[i];
    mu /= r.size();
    double ss = 0.0;
    for (size_t i = r.begin; i < r.end; ++i) ss += (x[i] - mu) * (x[i] - mu);
    double sd = std::sqrt(ss / r.size());
    if (sd < 1e-12) sd = 1.0;  // constant channel
    return std::pair{mu, sd};
  };
  Standardizer s;
  std::tie(s.u_mean, s.u_std) = stats(ds.u);
  std::tie(s.y_mean, s.y_std) = stats(ds.y);
  return s;
}

std::vector<double> Standardizer::standardize_u(std::span<const double> u) const {
  std::vector<double> out(u.size());
  for (size_t i = 0; i < u.size(); ++i) out[i] = (u[i] - u_mean) / u_std;
  return out;
}

std::vector<double> Standardizer::standardize_y(std::span<const double> y) const {
  std::vector<double> out(y.size());
  for (size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - y_mean) / y_std;
  return out;
}

TrainedPair::TrainedPair(const ModelSpec& s, const TrainConfig& c) : spec(s), cfg(c) {
  spec.validate();
  cfg.validate();
  CounterRng rng(cfg.seed);
  const int repr = spec.repr_dim();
  student = Student(spec.lags.dim(), spec.hidden(), rng,
                    spec.kind == ModelKind::baseline ? "baseline" : "student");
  head = GaussianHead("head", repr, 1, rng);
  if (spec.kind == ModelKind::regenerative) {
    TeacherConfig tc;
    tc.y_dim = 1;
    tc.h_dim = spec.gru_hidden;
    tc.z_dim = spec.z_dim > 0 ? spec.z_dim : spec.gru_hidden;
    tc.proj_hidden = spec.proj_hidden;
    tc.repr_dim = repr;
    teacher = std::make_unique<Teacher>(tc, rng);
  }
}

std::vector<Param*> TrainedPair::params() {
  std::vector<Param*> out;
  if (teacher) out = teacher->params();
  auto sp = student.params();
  out.insert(out.end(), sp.begin(), sp.end());
  auto hp = head.params();
  out.insert(out.end(), hp.begin(), hp.end());
  return out;
}

int TrainedPair::student_param_count() const {
  return student.param_count() + head.param_count();
}

int TrainedPair::total_param_count() const {
  return student_param_count() + (teacher ? teacher->param_count() : 0);
}

std::vector<Tensor> TrainedPair::snapshot() {
  std::vector<Tensor> snap;
  for (Param* p : params()) snap.push_back(p->value);
  return snap;
}

void TrainedPair::restore(const std::vector<Tensor>& snap) {
  auto ps = params();
  if (snap.size() != ps.size())
    throw Error(ErrCode::invalid_argument, "TrainedPair::restore: snapshot size mismatch");
  for (size_t i = 0; i < ps.size(); ++i) ps[i]->value = snap[i];
}

NodeId align_loss(Graph& g, NodeId phi_t, NodeId phi_s, AlignVariant variant) {
  const Tensor& a = g.value(phi_t);
  const Tensor& b = g.value(phi_s);
  if (a.rows != b.rows || a.cols != b.cols)
    throw Error(ErrCode::shape_mismatch,
                "align_loss: " + a.shape_str() + " vs " + b.shape_str());
  if (variant == AlignVariant::distance)
    return g.sum(g.square(g.sub(phi_t, phi_s)));
  return g.scale(g.sum(g.mul(phi_t, phi_s)), -1.0);
}

NodeId joint_loss(Graph& g, const RolloutResult& teacher_out,
                  const std::vector<StudentForward>& student_out,
                  const std::vector<NodeId>& y_targets, const LossWeights& w,
                  AlignVariant variant) {
  const size_t T = y_targets.size();
  if (teacher_out.phi.size() != T || student_out.size() != T || T == 0)
    throw Error(ErrCode::invalid_argument, "joint_loss: sequence length mismatch");
  const int batch = g.value(y_targets[0]).cols;

  NodeId total = g.input(Tensor::scalar(0.0));
  for (size_t t = 0; t < T; ++t) {
    if (w.alpha1 > 0)
      total = g.add(total, g.scale(nll_gaussian(g, y_targets[t], student_out[t].out), w.alpha1));
    if (w.alpha2 > 0) {
      NodeId teach = g.add(nll_gaussian(g, y_targets[t], teacher_out.decoded[t]),
                           teacher_out.kl[t]);
      total = g.add(total, g.scale(teach, w.alpha2));
    }
    if (w.alpha3 > 0)
      total = g.add(total, g.scale(align_loss(g, teacher_out.phi[t], student_out[t].phi, variant),
                                   w.alpha3));
  }
  return g.scale(total, 1.0 / (static_cast<double>(T) * batch));
}

void adam_step(AdamState& state, std::span<Param* const> params, const TrainConfig& cfg) {
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (Param* p : params) {
    for (int i = 0; i < p->numel(); ++i) {
      const double gi = p->grad.data[i];
      if (!std::isfinite(gi))
        throw Error(ErrCode::numeric, "adam_step: non-finite gradient in " + p->name);
      p->m.data[i] = cfg.beta1 * p->m.data[i] + (1.0 - cfg.beta1) * gi;
      p->v.data[i] = cfg.beta2 * p->v.data[i] + (1.0 - cfg.beta2) * gi * gi;
      const double mhat = p->m.data[i] / c1;
      const double vhat = p->v.data[i] / c2;
      p->value.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    p->zero_grad();
  }
}

namespace {

struct BatchLoss {
  NodeId total = -1;
  double teacher_part = 0.0;  // negative ELBO / (T * batch)
};

// Assembles the joint (or baseline) loss for one minibatch of subsequence
// offsets. eps_for_step supplies the reparameterization noise per step.
BatchLoss build_batch_loss(Graph& g, TrainedPair& pair,
                           const std::vector<double>& us,
                           const std::vector<double>& ys,
                           std::span<const size_t> offs, int T,
                           const std::function<Tensor(int)>& eps_for_step) {
  const int B = static_cast<int>(offs.size());
  const LagSpec& lags = pair.spec.lags;

  std::vector<Tensor> y_steps(T, Tensor(1, B));
  for (int s = 0; s < T; ++s)
    for (int j = 0; j < B; ++j) y_steps[s].at(0, j) = ys[offs[j] + s];

  std::vector<NodeId> y_targets(T);
  std::vector<StudentForward> student_out(T);
  std::vector<size_t> ts(B);
  for (int s = 0; s < T; ++s) {
    y_targets[s] = g.input(y_steps[s]);
    for (int j = 0; j < B; ++j) ts[j] = offs[j] + s;
    NodeId x = g.input(build_lag_matrix(us, ys, ts, lags));
    student_out[s] = student_forward(g, pair.student, pair.head, x);
  }

  BatchLoss out;
  if (pair.spec.kind == ModelKind::baseline) {
    NodeId total = g.input(Tensor::scalar(0.0));
    for (int s = 0; s < T; ++s)
      total = g.add(total, nll_gaussian(g, y_targets[s], student_out[s].out));
    out.total = g.scale(total, 1.0 / (static_cast<double>(T) * B));
    return out;
  }

  std::vector<Tensor> eps_steps(T);
  for (int s = 0; s < T; ++s) eps_steps[s] = eps_for_step(s);
  RolloutResult roll = teacher_rollout(g, *pair.teacher, pair.head, y_steps, eps_steps);

  // Track the teacher term separately for ELBO-based model selection.
  double teacher_sum = 0.0;
  for (int s = 0; s < T; ++s) {
    Graph& gg = g;
    NodeId nll_t = nll_gaussian(gg, y_targets[s], roll.decoded[s]);
    teacher_sum += gg.value(nll_t).data[0] + gg.value(roll.kl[s]).data[0];
  }
  out.teacher_part = teacher_sum / (static_cast<double>(T) * B);
  out.total = joint_loss(g, roll, student_out, y_targets, pair.cfg.weights, pair.cfg.align);
  return out;
}

}  // namespace

TrainedPair fit(const IoDataset& ds, const ModelSpec& spec, const TrainConfig& cfg) {
  ds.validate();
  spec.validate();
  cfg.validate();

  TrainedPair pair(spec, cfg);
  pair.stats = Standardizer::from_range(ds, ds.train);
  const std::vector<double> us = pair.stats.standardize_u(ds.u);
  const std::vector<double> ys = pair.stats.standardize_y(ds.y);

  const int T = cfg.subseq_len;
  const size_t lag = static_cast<size_t>(spec.lags.max_lag());
  auto windows = [&](const SplitRange& r) {
    std::vector<size_t> offs;
    for (size_t o = std::max(r.begin, lag); o + T <= r.end; o += T) offs.push_back(o);
    return offs;
  };
  // Validation windows are interleaved through the train+val region instead
  // of taken as the trailing block: for a nonstationary excitation (e.g. a
  // swept sine) a trailing block holds signal content the model never trains
  // on, and early stopping then selects arbitrarily early epochs.
  const SplitRange pool{ds.train.begin, ds.val.end};
  const std::vector<size_t> pool_off = windows(pool);
  if (pool_off.size() < 2)
    throw Error(ErrCode::invalid_argument,
                "fit: dataset does not cover max lag + subsequence length in train and val");
  const size_t every = std::max<size_t>(2, pool.size() / std::max<size_t>(1, ds.val.size()));
  std::vector<size_t> train_off, val_off;
  for (size_t i = 0; i < pool_off.size(); ++i)
    (i % every == every - 1 ? val_off : train_off).push_back(pool_off[i]);
  if (val_off.empty()) {
    val_off.push_back(train_off.back());
    train_off.pop_back();
  }

  auto params = pair.params();
  AdamState adam;
  CounterRng shuffle_rng(CounterRng::derive(cfg.seed, 101));
  CounterRng eps_rng(CounterRng::derive(cfg.seed, 102));
  CounterRng val_eps_rng(CounterRng::derive(cfg.seed, 103));

  const bool regen = spec.kind == ModelKind::regenerative;
  const int zd = regen ? pair.teacher->cfg.z_dim : 0;

  auto draw_eps = [&](CounterRng& rng, int batch) {
    Tensor e(zd, batch);
    for (double& x : e.data) x = rng.next_normal();
    return e;
  };

  // Validation noise is drawn once and reused every epoch so the early
  // stopping criterion compares like against like.
  std::vector<std::vector<Tensor>> val_eps;
  for (size_t b0 = 0; b0 < val_off.size(); b0 += cfg.batch_size) {
    const int B = static_cast<int>(std::min<size_t>(cfg.batch_size, val_off.size() - b0));
    std::vector<Tensor> eps;
    if (regen)
      for (int s = 0; s < T; ++s) eps.push_back(draw_eps(val_eps_rng, B));
    val_eps.push_back(std::move(eps));
  }

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_snap = pair.snapshot();
  int bad_epochs = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    // Fisher-Yates with the portable generator.
    for (size_t i = train_off.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(shuffle_rng.next_u64() % i);
      std::swap(train_off[i - 1], train_off[j]);
    }

    double train_loss_sum = 0.0;
    size_t train_windows = 0;
    for (size_t b0 = 0; b0 < train_off.size(); b0 += cfg.batch_size) {
      const size_t b1 = std::min(train_off.size(), b0 + cfg.batch_size);
      std::span<const size_t> offs(train_off.data() + b0, b1 - b0);
      const int B = static_cast<int>(offs.size());
      Graph g;
      BatchLoss loss = build_batch_loss(g, pair, us, ys, offs, T,
                                        [&](int) { return draw_eps(eps_rng, B); });
      const double lv = g.value(loss.total).data[0];
      if (!std::isfinite(lv))
        throw Error(ErrCode::numeric,
                    "fit: loss diverged at epoch " + std::to_string(epoch));
      train_loss_sum += lv * B;
      train_windows += B;
      g.backward(loss.total);
      adam_step(adam, params, cfg);
    }

    double val_loss_sum = 0.0, val_elbo_sum = 0.0;
    size_t val_windows = 0, batch_idx = 0;
    for (size_t b0 = 0; b0 < val_off.size(); b0 += cfg.batch_size, ++batch_idx) {
      const size_t b1 = std::min(val_off.size(), b0 + cfg.batch_size);
      std::span<const size_t> offs(val_off.data() + b0, b1 - b0);
      Graph g;
      const auto& eps = val_eps[batch_idx];
      BatchLoss loss = build_batch_loss(g, pair, us, ys, offs, T,
                                        [&](int s) { return eps[s]; });
      val_loss_sum += g.value(loss.total).data[0] * offs.size();
      val_elbo_sum += loss.teacher_part * offs.size();
      val_windows += offs.size();
    }

    EpochStats stats;
    stats.train_loss = train_loss_sum / train_windows;
    stats.val_loss = val_loss_sum / val_windows;
    stats.val_elbo = val_elbo_sum / val_windows;
    pair.history.push_back(stats);

    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      best_snap = pair.snapshot();
      pair.best_epoch = epoch;
      bad_epochs = 0;
    } else if (++bad_epochs >= cfg.patience) {
      break;
    }
  }

  pair.restore(best_snap);
  pair.best_val = best_val;
  return pair;
}

GaussianSeries evaluate_pair(TrainedPair& pair, const IoDataset& ds, PredictMode mode) {
  ds.validate();
  const size_t lag = static_cast<size_t>(pair.spec.lags.max_lag());
  if (ds.test.begin < lag || ds.test.size() == 0)
    throw Error(ErrCode::invalid_argument, "evaluate_pair: test range too early or empty");
  const std::vector<double> us = pair.stats.standardize_u(ds.u);
  const std::vector<double> ys = pair.stats.standardize_y(ds.y);
  std::span<const double> uw(us.data() + ds.test.begin - lag, ds.test.size() + lag);
  std::span<const double> yw(ys.data() + ds.test.begin - lag, ds.test.size() + lag);

  GaussianSeries s = predict_series(pair.student, pair.head, uw, yw, pair.spec.lags, mode);
  s.start = ds.test.begin;
  const double ym = pair.stats.y_mean, ysd = pair.stats.y_std;
  for (double& m : s.mean) m = m * ysd + ym;
  for (double& v : s.var) v *= ysd * ysd;
  return s;
}

GaussianSeries ensemble_average(std::span<TrainedPair* const> members,
                                const IoDataset& ds, PredictMode mode) {
  if (members.empty())
    throw Error(ErrCode::invalid_argument, "ensemble_average: empty ensemble");
  for (const TrainedPair* m : members)
    if (!(m->spec == members[0]->spec))
      throw Error(ErrCode::invalid_argument, "ensemble_average: heterogeneous specs");

  GaussianSeries acc;
  std::vector<double> second_moment;
  for (size_t i = 0; i < members.size(); ++i) {
    GaussianSeries s = evaluate_pair(*members[i], ds, mode);
    if (i == 0) {
      acc.start = s.start;
      acc.mean.assign(s.mean.size(), 0.0);
      second_moment.assign(s.mean.size(), 0.0);
    }
    for (size_t k = 0; k < s.mean.size(); ++k) {
      acc.mean[k] += s.mean[k];
      second_moment[k] += s.var[k] + s.mean[k] * s.mean[k];
    }
  }
  const double n = static_cast<double>(members.size());
  acc.var.resize(acc.mean.size());
  for (size_t k = 0; k < acc.mean.size(); ++k) {
    acc.mean[k] /= n;
    acc.var[k] = second_moment[k] / n - acc.mean[k] * acc.mean[k];
  }
  return acc;
}

bool is_width_subset(const std::vector<int>& student, const std::vector<int>& baseline) {
  size_t i = 0;
  for (int w : baseline) {
    if (i < student.size() && student[i] == w) ++i;
  }
  return i == student.size();
}

std::vector<RankedCandidate> grid_search(const IoDataset& ds,
                                         const std::vector<GridCandidate>& grid,
                                         const ModelSpec& spec, TrainConfig cfg,
                                         int budget_epochs,
                                         const GridScorer& scorer) {
  if (grid.empty()) throw Error(ErrCode::invalid_argument, "grid_search: empty grid");

  std::vector<RankedCandidate> ranked;
  for (const auto& cand : grid) {
    if (spec.kind == ModelKind::regenerative && !spec.baseline_hidden.empty() &&
        !is_width_subset(cand.hidden, spec.baseline_hidden))
      continue;  // H_S must be a subset of H_B
    RankedCandidate rc;
    rc.cand = cand;
    if (scorer) {
      rc.score = scorer(cand);
    } else {
      ModelSpec s2 = spec;
      if (spec.kind == ModelKind::baseline)
        s2.baseline_hidden = cand.hidden;
      else
        s2.student_hidden = cand.hidden;
      TrainConfig c2 = cfg;
      c2.max_epochs = budget_epochs;
      TrainedPair tp = fit(ds, s2, c2);
      // ELBO criterion for teacher-bearing models, validation loss otherwise.
      rc.score = tp.best_val;
      if (spec.kind == ModelKind::regenerative && tp.best_epoch >= 0)
        rc.score = tp.history[tp.best_epoch].val_elbo;
    }
    ranked.push_back(std::move(rc));
  }
  if (ranked.empty())
    throw Error(ErrCode::invalid_argument,
                "grid_search: no candidate satisfies the width-subset constraint");
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.score < b.score;
                   });
  return ranked;
}

std::vector<GridCandidate> make_width_grid(const std::vector<int>& depths,
                                           const std::vector<int>& widths) {
  std::vector<GridCandidate> grid;
  for (int d : depths)
    for (int w : widths) {
      GridCandidate c;
      int cur = w;
      for (int i = 0; i < d; ++i) {
        c.hidden.push_back(std::max(1, cur));
        cur /= 2;
      }
      grid.push_back(std::move(c));
    }
  return grid;
}

}  // namespace regenid
