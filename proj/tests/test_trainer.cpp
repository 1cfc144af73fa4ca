#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "core/checkpoint.hpp"
#include "core/experiment.hpp"
#include "core/trainer.hpp"
#include "doctest.h"

using namespace regenid;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

IoDataset arx_dataset(size_t n, uint64_t seed) {
  // y_t = 0.5 y_{t-1} + u_{t-1} + e_t with e ~ N(0, 0.01): noise floor 0.1.
  IoDataset ds;
  ds.u = gen_uniform_input(n, -1.0, 1.0, seed);
  ds.y.resize(n, 0.0);
  ds.y_clean.resize(n, 0.0);
  CounterRng rng(seed + 1);
  for (size_t t = 1; t < n; ++t) {
    // The regression target given the observed lags; the residual of an
    // ideal one-step predictor is exactly e_t.
    ds.y_clean[t] = 0.5 * ds.y[t - 1] + ds.u[t - 1];
    ds.y[t] = ds.y_clean[t] + 0.1 * rng.next_normal();
  }
  ds.has_clean = true;
  ds.seed = seed;
  ds.train = {0, n * 7 / 10};
  ds.val = {n * 7 / 10, n * 85 / 100};
  ds.test = {n * 85 / 100, n};
  return ds;
}

IoDataset lgssm_dataset(size_t n, size_t n_test, uint64_t seed) {
  IoDataset ds;
  ds.u = gen_uniform_input(n, -2.5, 2.5, seed);
  std::vector<double> u_test = gen_test_sine(n_test);
  ds.u.insert(ds.u.end(), u_test.begin(), u_test.end());
  SimResult sim = simulate_lgssm(ds.u, seed + 1, true);
  ds.y = sim.y;
  ds.y_clean = sim.y_clean;
  ds.has_clean = true;
  ds.seed = seed;
  ds.train = {0, n * 8 / 10};
  ds.val = {n * 8 / 10, n};
  ds.test = {n, n + n_test};
  return ds;
}

ModelSpec small_regen_spec() {
  ModelSpec spec;
  spec.kind = ModelKind::regenerative;
  spec.lags = {10, 5};
  spec.student_hidden = {8};
  spec.baseline_hidden = {16, 8};
  spec.gru_hidden = 4;
  spec.z_dim = 4;
  spec.proj_hidden = {8};
  return spec;
}

}  // namespace

TEST_CASE("alignment penalty hand values") {
  Graph g;
  NodeId v = g.input(Tensor::colvec({1.0, 0.0}));
  NodeId w = g.input(Tensor::colvec({0.0, 1.0}));
  CHECK(g.value(align_loss(g, v, v, AlignVariant::distance)).data[0] == doctest::Approx(0.0));
  CHECK(g.value(align_loss(g, v, w, AlignVariant::distance)).data[0] == doctest::Approx(2.0));
  NodeId a = g.input(Tensor::colvec({1.0, 2.0}));
  NodeId b = g.input(Tensor::colvec({3.0, 4.0}));
  CHECK(g.value(align_loss(g, a, b, AlignVariant::correlation)).data[0] ==
        doctest::Approx(-11.0));
  NodeId c = g.input(Tensor::colvec({1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(align_loss(g, a, c, AlignVariant::distance), Error);
}

TEST_CASE("loss weights are validated") {
  CHECK_THROWS_AS((LossWeights{0.0, 0.0, 0.0}.validate()), Error);
  CHECK_THROWS_AS((LossWeights{-1.0, 1.0, 1.0}.validate()), Error);
  CHECK_NOTHROW((LossWeights{1.0, 0.0, 0.0}.validate()));
}

TEST_CASE("joint loss reduces to its parts when weights are zeroed") {
  CounterRng rng(1);
  TeacherConfig tcfg;
  tcfg.y_dim = 1;
  tcfg.h_dim = 3;
  tcfg.z_dim = 3;
  tcfg.proj_hidden = {4};
  tcfg.repr_dim = 4;
  tcfg.prior_hidden = {4};
  Teacher teacher(tcfg, rng);
  Student student(5, {4}, rng);
  GaussianHead head("head", 4, 1, rng);

  const int T = 3;
  std::vector<Tensor> ys, eps;
  CounterRng nrng(2);
  for (int t = 0; t < T; ++t) {
    ys.push_back(Tensor::scalar(nrng.next_normal()));
    Tensor e(3, 1);
    for (double& v : e.data) v = nrng.next_normal();
    eps.push_back(e);
  }
  Tensor x(5, 1);
  for (double& v : x.data) v = nrng.next_normal();

  Graph g;
  RolloutResult ro = teacher_rollout(g, teacher, head, ys, eps);
  std::vector<StudentForward> sf;
  std::vector<NodeId> targets;
  for (int t = 0; t < T; ++t) {
    sf.push_back(student_forward(g, student, head, g.input(x)));
    targets.push_back(g.input(ys[t]));
  }

  double teacher_sum = 0.0, student_sum = 0.0;
  for (int t = 0; t < T; ++t) {
    Graph g2;
    RolloutResult ro2 = teacher_rollout(g2, teacher, head, ys, eps);
    teacher_sum +=
        g2.value(g2.add(nll_gaussian(g2, g2.input(ys[t]), ro2.decoded[t]), ro2.kl[t])).data[0];
    StudentForward sf2 = student_forward(g2, student, head, g2.input(x));
    student_sum += g2.value(nll_gaussian(g2, g2.input(ys[t]), sf2.out)).data[0];
  }

  NodeId teacher_only = joint_loss(g, ro, sf, targets, {0.0, 1.0, 0.0}, AlignVariant::distance);
  CHECK(g.value(teacher_only).data[0] == doctest::Approx(teacher_sum / T).epsilon(1e-12));
  NodeId student_only = joint_loss(g, ro, sf, targets, {1.0, 0.0, 0.0}, AlignVariant::distance);
  CHECK(g.value(student_only).data[0] == doctest::Approx(student_sum / T).epsilon(1e-12));
}

TEST_CASE("joint loss with frozen noise passes a full gradient check") {
  CounterRng rng(3);
  TeacherConfig tcfg;
  tcfg.y_dim = 1;
  tcfg.h_dim = 2;
  tcfg.z_dim = 2;
  tcfg.proj_hidden = {3};
  tcfg.repr_dim = 3;
  tcfg.prior_hidden = {3};
  Teacher teacher(tcfg, rng);
  Student student(4, {3}, rng);
  GaussianHead head("head", 3, 1, rng);

  std::vector<Tensor> ys{Tensor::scalar(0.4), Tensor::scalar(-0.2)};
  std::vector<Tensor> eps;
  CounterRng nrng(4);
  for (int t = 0; t < 2; ++t) {
    Tensor e(2, 1);
    for (double& v : e.data) v = nrng.next_normal();
    eps.push_back(e);
  }
  Tensor x0(4, 1), x1(4, 1);
  for (double& v : x0.data) v = nrng.next_normal();
  for (double& v : x1.data) v = nrng.next_normal();

  std::vector<Param*> params = teacher.params();
  for (Param* p : student.params()) params.push_back(p);
  for (Param* p : head.params()) params.push_back(p);

  auto build = [&](Graph& g) {
    RolloutResult ro = teacher_rollout(g, teacher, head, ys, eps);
    std::vector<StudentForward> sf{student_forward(g, student, head, g.input(x0)),
                                   student_forward(g, student, head, g.input(x1))};
    std::vector<NodeId> targets{g.input(ys[0]), g.input(ys[1])};
    return joint_loss(g, ro, sf, targets, {1.0, 1.0, 1.0}, AlignVariant::distance);
  };
  auto report = gradient_check(build, params, 1e-5, 1e-4);
  CHECK_MESSAGE(report.pass, "max rel err ", report.max_rel_err);
}

TEST_CASE("without alignment, student gradients ignore teacher parameters") {
  CounterRng rng(5);
  TeacherConfig tcfg;
  tcfg.y_dim = 1;
  tcfg.h_dim = 2;
  tcfg.z_dim = 2;
  tcfg.proj_hidden = {};
  tcfg.repr_dim = 3;
  tcfg.prior_hidden = {};
  Teacher teacher(tcfg, rng);
  Student student(4, {3}, rng);
  GaussianHead head("head", 3, 1, rng);

  std::vector<Tensor> ys{Tensor::scalar(0.4), Tensor::scalar(-0.2)};
  std::vector<Tensor> eps{Tensor(2, 1, 0.3), Tensor(2, 1, -0.1)};
  Tensor x(4, 1, 0.5);

  auto student_grads = [&] {
    for (Param* p : student.params()) p->zero_grad();
    for (Param* p : teacher.params()) p->zero_grad();
    for (Param* p : head.params()) p->zero_grad();
    Graph g;
    RolloutResult ro = teacher_rollout(g, teacher, head, ys, eps);
    std::vector<StudentForward> sf{student_forward(g, student, head, g.input(x)),
                                   student_forward(g, student, head, g.input(x))};
    std::vector<NodeId> targets{g.input(ys[0]), g.input(ys[1])};
    g.backward(joint_loss(g, ro, sf, targets, {1.0, 1.0, 0.0}, AlignVariant::distance));
    std::vector<double> flat;
    for (Param* p : student.params())
      flat.insert(flat.end(), p->grad.data.begin(), p->grad.data.end());
    return flat;
  };

  std::vector<double> before = student_grads();
  for (Param* p : teacher.gru.params())
    for (double& v : p->value.data) v += 0.05;  // perturb theta_T
  std::vector<double> after = student_grads();
  REQUIRE(before.size() == after.size());
  for (size_t i = 0; i < before.size(); ++i)
    CHECK(std::abs(before[i] - after[i]) < 1e-10);
}

TEST_CASE("optimizer: zero gradient leaves parameters unchanged") {
  Param p("p", Tensor::colvec({1.0, -2.0}));
  p.v.data = {0.25, 0.25};
  std::vector<Param*> params{&p};
  AdamState st;
  TrainConfig cfg;
  adam_step(st, params, cfg);
  CHECK(p.value.data[0] == doctest::Approx(1.0));
  CHECK(p.value.data[1] == doctest::Approx(-2.0));
  CHECK(p.v.data[0] == doctest::Approx(0.25 * cfg.beta2));  // moments decay
}

TEST_CASE("optimizer: first step moves by about the learning rate against the sign") {
  Param p("p", Tensor::colvec({1.0, 1.0}));
  p.grad.data = {3.0, -0.2};
  std::vector<Param*> params{&p};
  AdamState st;
  TrainConfig cfg;
  adam_step(st, params, cfg);
  CHECK(p.value.data[0] == doctest::Approx(1.0 - cfg.lr).epsilon(1e-4));
  CHECK(p.value.data[1] == doctest::Approx(1.0 + cfg.lr).epsilon(1e-4));
  CHECK(p.grad.data[0] == 0.0);  // grads cleared after the step
}

TEST_CASE("optimizer: convex quadratic converges in 200 steps") {
  Param p("p", Tensor::colvec({3.0, -4.0, 1.5}));
  std::vector<Param*> params{&p};
  AdamState st;
  TrainConfig cfg;
  cfg.lr = 0.1;
  for (int step = 0; step < 200; ++step) {
    Graph g;
    g.backward(g.sum(g.square(g.bind(p))));
    adam_step(st, params, cfg);
  }
  Graph g;
  g.backward(g.sum(g.square(g.bind(p))));
  double norm = 0.0;
  for (double v : p.grad.data) norm += v * v;
  CHECK(std::sqrt(norm) < 1e-3);
}

TEST_CASE("optimizer: non-finite gradients fail naming the parameter") {
  Param p("exploding", Tensor::scalar(1.0));
  p.grad.data[0] = std::numeric_limits<double>::quiet_NaN();
  std::vector<Param*> params{&p};
  AdamState st;
  TrainConfig cfg;
  try {
    adam_step(st, params, cfg);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("exploding") != std::string::npos);
  }
}

TEST_CASE("a plain lag model recovers a linear system to its noise floor") {
  IoDataset ds = arx_dataset(3000, 10);
  ModelSpec spec;
  spec.kind = ModelKind::baseline;
  spec.lags = {1, 1};
  spec.baseline_hidden = {16};
  TrainConfig cfg;
  cfg.lr = 0.003;
  cfg.max_epochs = 150;
  cfg.patience = 30;
  cfg.subseq_len = 32;
  cfg.batch_size = 16;
  cfg.seed = 3;
  TrainedPair pair = fit(ds, spec, cfg);
  GaussianSeries pred = evaluate_pair(pair, ds, PredictMode::one_step);
  std::span<const double> truth(ds.y.data() + pred.start, pred.mean.size());
  const double err = rmse(truth, pred.mean);
  CHECK(err <= 0.11);  // within 10% of the 0.1 noise floor
  CHECK(err >= 0.05);
}

TEST_CASE("training is a pure function of data, spec, config and seed") {
  IoDataset ds = arx_dataset(800, 20);
  ModelSpec spec;
  spec.kind = ModelKind::baseline;
  spec.lags = {1, 1};
  spec.baseline_hidden = {6};
  TrainConfig cfg;
  cfg.max_epochs = 5;
  cfg.patience = 5;
  cfg.subseq_len = 16;
  cfg.batch_size = 8;
  cfg.seed = 9;
  TrainedPair a = fit(ds, spec, cfg);
  TrainedPair b = fit(ds, spec, cfg);
  auto pa = a.params();
  auto pb = b.params();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value.data == pb[i]->value.data);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i)
    CHECK(a.history[i].val_loss == b.history[i].val_loss);
}

TEST_CASE("early stopping returns the minimum-validation snapshot") {
  IoDataset ds = arx_dataset(1200, 30);
  ModelSpec spec = small_regen_spec();
  TrainConfig cfg;
  cfg.max_epochs = 25;
  cfg.patience = 6;
  cfg.subseq_len = 32;
  cfg.batch_size = 8;
  cfg.seed = 4;
  TrainedPair pair = fit(ds, spec, cfg);
  REQUIRE(!pair.history.size() == false);
  double min_val = pair.history[0].val_loss;
  int argmin = 0;
  for (size_t i = 1; i < pair.history.size(); ++i)
    if (pair.history[i].val_loss < min_val) {
      min_val = pair.history[i].val_loss;
      argmin = static_cast<int>(i);
    }
  CHECK(pair.best_val == min_val);
  CHECK(pair.best_epoch == argmin);
}

TEST_CASE("training with the alignment term brings the representations closer") {
  IoDataset ds = lgssm_dataset(2500, 400, 40);
  ModelSpec spec = small_regen_spec();
  TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.patience = 20;  // fixed epoch budget for a fair comparison
  cfg.seed = 5;

  auto mean_align = [&](TrainedPair& pair) {
    Tensor pt = teacher_phi_series(pair, ds);
    Tensor ps = student_phi_series(pair, ds);
    double total = 0.0;
    for (int j = 0; j < pt.cols; ++j)
      for (int i = 0; i < pt.rows; ++i) {
        const double d = pt.at(i, j) - ps.at(i, j);
        total += d * d;
      }
    return total / pt.cols;
  };

  cfg.weights = {1.0, 1.0, 1.0};
  TrainedPair with = fit(ds, spec, cfg);
  cfg.weights = {1.0, 1.0, 0.0};
  TrainedPair without = fit(ds, spec, cfg);
  CHECK(mean_align(with) < mean_align(without));
}

TEST_CASE("ensemble averaging: identities and mixture of constants") {
  IoDataset ds = arx_dataset(300, 50);
  ModelSpec spec;
  spec.kind = ModelKind::baseline;
  spec.lags = {1, 1};
  spec.baseline_hidden = {4};
  TrainConfig cfg;
  cfg.seed = 1;

  TrainedPair a(spec, cfg);
  TrainedPair b(spec, cfg);
  for (Param* p : a.params())
    for (double& v : p->value.data) v = 0.0;
  for (Param* p : b.params())
    for (double& v : p->value.data) v = 0.0;
  b.head.mean_layer.b.value.data[0] = 2.0;  // constant-2 predictor

  std::vector<TrainedPair*> one{&a};
  std::vector<TrainedPair*> same{&a, &a};
  GaussianSeries single = ensemble_average(one, ds, PredictMode::one_step);
  GaussianSeries doubled = ensemble_average(same, ds, PredictMode::one_step);
  CHECK(single.mean == doubled.mean);
  CHECK(single.var == doubled.var);

  std::vector<TrainedPair*> mix{&a, &b};
  GaussianSeries avg = ensemble_average(mix, ds, PredictMode::one_step);
  for (double m : avg.mean) CHECK(m == doctest::Approx(1.0));
  // Mixture variance adds the spread of the two means: 1 + (0-1)^2 = 2.
  for (double v : avg.var) CHECK(v == doctest::Approx(2.0));

  ModelSpec other = spec;
  other.baseline_hidden = {5};
  TrainedPair c(other, cfg);
  std::vector<TrainedPair*> bad{&a, &c};
  CHECK_THROWS_AS(ensemble_average(bad, ds, PredictMode::one_step), Error);
  std::vector<TrainedPair*> none;
  CHECK_THROWS_AS(ensemble_average(none, ds, PredictMode::one_step), Error);
}

TEST_CASE("ensemble prediction error does not exceed the worst member") {
  IoDataset ds = lgssm_dataset(2000, 300, 60);
  ModelSpec spec = small_regen_spec();
  TrainConfig cfg;
  cfg.max_epochs = 12;
  cfg.patience = 12;
  std::vector<TrainedPair> members;
  for (uint64_t i = 0; i < 3; ++i) {
    cfg.seed = CounterRng::derive(7, i);
    members.push_back(fit(ds, spec, cfg));
  }
  double worst = 0.0;
  std::vector<TrainedPair*> ptrs;
  for (auto& m : members) {
    GaussianSeries p = evaluate_pair(m, ds, PredictMode::one_step);
    std::span<const double> truth(ds.y_clean.data() + p.start, p.mean.size());
    worst = std::max(worst, rmse(truth, p.mean));
    ptrs.push_back(&m);
  }
  GaussianSeries avg = ensemble_average(ptrs, ds, PredictMode::one_step);
  std::span<const double> truth(ds.y_clean.data() + avg.start, avg.mean.size());
  CHECK(rmse(truth, avg.mean) <= worst + 1e-12);
}

TEST_CASE("width-subset constraint") {
  CHECK(is_width_subset({30}, {60, 30}));
  CHECK(is_width_subset({60, 30}, {60, 30}));
  CHECK(is_width_subset({}, {60, 30}));
  CHECK_FALSE(is_width_subset({30, 60}, {60, 30}));
  CHECK_FALSE(is_width_subset({45}, {60, 30}));
}

TEST_CASE("grid search ranks by injected scores and keeps single grids") {
  IoDataset ds = arx_dataset(300, 70);
  ModelSpec spec;
  spec.kind = ModelKind::baseline;
  spec.lags = {1, 1};
  spec.baseline_hidden = {4};
  TrainConfig cfg;

  std::vector<GridCandidate> one{GridCandidate{{8}}};
  auto kept = grid_search(ds, one, spec, cfg, 1,
                          [](const GridCandidate&) { return 1.0; });
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].cand.hidden == std::vector<int>{8});

  std::vector<GridCandidate> grid{GridCandidate{{10}}, GridCandidate{{4}},
                                  GridCandidate{{7}}};
  auto ranked = grid_search(ds, grid, spec, cfg, 1, [](const GridCandidate& c) {
    return static_cast<double>(c.hidden[0]);
  });
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].cand.hidden == std::vector<int>{4});
  CHECK(ranked[2].cand.hidden == std::vector<int>{10});

  std::vector<GridCandidate> empty;
  CHECK_THROWS_AS(grid_search(ds, empty, spec, cfg, 1), Error);
}

TEST_CASE("grid search filters candidates violating the width subset") {
  IoDataset ds = arx_dataset(300, 80);
  ModelSpec spec = small_regen_spec();  // baseline widths {16, 8}
  TrainConfig cfg;
  std::vector<GridCandidate> grid{GridCandidate{{16}}, GridCandidate{{12}},
                                  GridCandidate{{8}}};
  auto ranked = grid_search(ds, grid, spec, cfg, 1,
                            [](const GridCandidate& c) { return double(c.hidden[0]); });
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].cand.hidden == std::vector<int>{8});
  CHECK(ranked[1].cand.hidden == std::vector<int>{16});
}

TEST_CASE("the width grid enumerates one candidate per depth and top width") {
  auto grid = make_width_grid({1, 2}, {10, 20});
  REQUIRE(grid.size() == 4);
  CHECK(grid[0].hidden == std::vector<int>{10});
  CHECK(grid[1].hidden == std::vector<int>{20});
  CHECK(grid[2].hidden.size() == 2);
  CHECK(grid[2].hidden[0] == 10);
  CHECK(grid[2].hidden[1] >= 1);
  CHECK(grid[2].hidden[1] <= 10);
}

TEST_CASE("parameter accounting for the published configurations") {
  TrainConfig cfg;
  {
    ModelSpec s;  // first benchmark: lags 10/5, student (15, 30, 1)
    s.kind = ModelKind::regenerative;
    s.lags = {10, 5};
    s.student_hidden = {30};
    s.baseline_hidden = {60, 30};
    s.gru_hidden = 15;
    s.z_dim = 15;
    s.proj_hidden = {60};
    TrainedPair student(s, cfg);
    // Hand arithmetic: 15->30 dense (480) + head 30->1 twice (62).
    CHECK(student.student_param_count() == 480 + 62);
    s.kind = ModelKind::baseline;
    TrainedPair baseline(s, cfg);
    // 15->60 (960) + 60->30 (1830) + head (62).
    CHECK(baseline.student_param_count() == 960 + 1830 + 62);
    CHECK(student.student_param_count() < baseline.student_param_count());
  }
  {
    ModelSpec s;  // second benchmark: lags 20/5, student (25, 45, 10, 1)
    s.kind = ModelKind::regenerative;
    s.lags = {20, 5};
    s.student_hidden = {45, 10};
    s.baseline_hidden = {45, 45, 10};
    s.gru_hidden = 25;
    s.z_dim = 25;
    s.proj_hidden = {45, 45};
    TrainedPair student(s, cfg);
    s.kind = ModelKind::baseline;
    TrainedPair baseline(s, cfg);
    CHECK(student.student_param_count() < baseline.student_param_count());
  }
  {
    ModelSpec s;  // third benchmark: lags 20/20, student (40, 20, 1)
    s.kind = ModelKind::regenerative;
    s.lags = {20, 20};
    s.student_hidden = {20};
    s.baseline_hidden = {80, 20};
    s.gru_hidden = 40;
    s.z_dim = 40;
    s.proj_hidden = {80};
    TrainedPair student(s, cfg);
    s.kind = ModelKind::baseline;
    TrainedPair baseline(s, cfg);
    CHECK(student.student_param_count() < baseline.student_param_count());
  }
}

TEST_CASE("the head is shared: mutating it moves both teacher and student outputs") {
  ModelSpec spec = small_regen_spec();
  TrainConfig cfg;
  cfg.seed = 11;
  TrainedPair pair(spec, cfg);
  REQUIRE(pair.teacher != nullptr);

  std::vector<Tensor> ys{Tensor::scalar(0.3)};
  std::vector<Tensor> eps{Tensor(spec.z_dim, 1, 0.2)};
  auto outputs = [&] {
    Graph g;
    RolloutResult ro = teacher_rollout(g, *pair.teacher, pair.head, ys, eps);
    Tensor x(spec.lags.dim(), 1, 0.4);
    StudentForward sf = student_forward(g, pair.student, pair.head, g.input(x));
    return std::pair{g.value(ro.decoded[0].mean).data[0], g.value(sf.out.mean).data[0]};
  };
  auto before = outputs();
  pair.head.mean_layer.b.value.data[0] += 1.0;
  auto after = outputs();
  CHECK(after.first == doctest::Approx(before.first + 1.0).epsilon(1e-12));
  CHECK(after.second == doctest::Approx(before.second + 1.0).epsilon(1e-12));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  IoDataset ds = arx_dataset(800, 90);
  ModelSpec spec = small_regen_spec();
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.patience = 3;
  cfg.subseq_len = 16;
  cfg.batch_size = 8;
  cfg.seed = 21;
  TrainedPair pair = fit(ds, spec, cfg);
  const std::string path = temp_path("regenid_test_ckpt.bin");
  save_checkpoint(pair, path);
  TrainedPair back = load_checkpoint(path);
  CHECK(back.spec == pair.spec);
  CHECK(back.cfg.seed == pair.cfg.seed);
  CHECK(back.best_val == pair.best_val);
  CHECK(back.stats.y_mean == pair.stats.y_mean);
  auto pa = pair.params();
  auto pb = back.params();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->name == pb[i]->name);
    CHECK(pa[i]->value.data == pb[i]->value.data);
  }
  std::remove(path.c_str());
}

TEST_CASE("divergent training reports the epoch") {
  IoDataset ds = arx_dataset(800, 95);
  ds.y[100] = std::numeric_limits<double>::quiet_NaN();  // poisons the loss
  ModelSpec spec;
  spec.kind = ModelKind::baseline;
  spec.lags = {1, 1};
  spec.baseline_hidden = {4};
  TrainConfig cfg;
  cfg.max_epochs = 2;
  CHECK_THROWS_AS(fit(ds, spec, cfg), Error);
}
