#include "core/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace regenid {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrCode::io, "cannot create directory " + dir + ": " + ec.message());
}

// Index-parallel loop; results keyed by index so the outcome is identical
// to sequential execution.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const size_t count = std::min<size_t>(static_cast<size_t>(threads), n);
  for (size_t i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string member_name(const std::string& out_dir, const std::string& stem, size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02zu", i);
  return out_dir + "/" + stem + "_" + buf + ".ckpt";
}

}  // namespace

IoDataset make_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.benchmark == "csv") return load_csv_dataset(cfg.dataset_path);

  const uint64_t in_seed = CounterRng::derive(cfg.seed, 11);
  const uint64_t sim_seed = CounterRng::derive(cfg.seed, 12);
  const uint64_t test_seed = CounterRng::derive(cfg.seed, 13);

  std::vector<double> u;
  std::vector<double> u_test;
  if (cfg.benchmark == "lgssm") {
    u = gen_uniform_input(cfg.samples, cfg.input_low, cfg.input_high, in_seed);
    u_test = gen_test_sine(cfg.test_samples);
  } else if (cfg.benchmark == "narendra_li") {
    u = gen_uniform_input(cfg.samples, cfg.input_low, cfg.input_high, in_seed);
    u_test = gen_uniform_input(cfg.test_samples, cfg.input_low, cfg.input_high, test_seed);
  } else {  // wh_surrogate
    u = gen_swept_sine(cfg.samples, cfg.wh_f0, cfg.wh_f1);
    u_test = gen_multisine(cfg.test_samples, cfg.wh_band_lo, cfg.wh_band_hi,
                           cfg.wh_tones, test_seed);
  }
  u.insert(u.end(), u_test.begin(), u_test.end());

  // Noise covers the train/validation region only; the held-out test
  // excitation continues the same trajectory noise-free so metrics against
  // the clean response are meaningful.
  SimResult sim;
  if (cfg.benchmark == "lgssm")
    sim = simulate_lgssm(u, sim_seed, cfg.noise, 0.0, 0.0, cfg.samples);
  else if (cfg.benchmark == "narendra_li")
    sim = simulate_narendra_li(u, sim_seed, cfg.noise, cfg.nl_noise_std, 0.0, 0.0,
                               cfg.samples);
  else
    sim = simulate_wh_surrogate(u, sim_seed, cfg.noise, cfg.samples);

  IoDataset ds;
  ds.u = std::move(u);
  ds.y = std::move(sim.y);
  ds.y_clean = std::move(sim.y_clean);
  ds.has_clean = true;
  ds.seed = cfg.seed;
  const size_t train_end = static_cast<size_t>(cfg.samples * cfg.train_frac);
  ds.train = {0, train_end};
  ds.val = {train_end, cfg.samples};
  ds.test = {cfg.samples, cfg.samples + cfg.test_samples};
  ds.meta["benchmark"] = cfg.benchmark;
  ds.meta["input_low"] = fmt17(cfg.input_low);
  ds.meta["input_high"] = fmt17(cfg.input_high);
  ds.meta["noise"] = cfg.noise ? "on" : "off";
  if (cfg.benchmark == "narendra_li") ds.meta["nl_noise_std"] = fmt17(cfg.nl_noise_std);
  ds.validate();
  return ds;
}

std::vector<TrainedPair> train_ensemble(const ExperimentConfig& cfg, const IoDataset& ds,
                                        ModelKind kind) {
  ModelSpec spec = cfg.spec;
  spec.kind = kind;
  spec.validate();
  std::vector<TrainedPair> members(cfg.ensemble);
  parallel_for(cfg.ensemble, cfg.threads, [&](size_t i) {
    TrainConfig tc = cfg.train;
    tc.seed = CounterRng::derive(cfg.seed, 1000 + i);
    members[i] = fit(ds, spec, tc);
  });
  return members;
}

std::vector<ReportRow> evaluate_rows(const std::string& experiment,
                                     const std::string& model_name,
                                     std::vector<TrainedPair>& members,
                                     const IoDataset& ds) {
  if (members.empty())
    throw Error(ErrCode::invalid_argument, "evaluate_rows: no models");
  std::vector<TrainedPair*> ptrs;
  for (auto& m : members) ptrs.push_back(&m);

  std::vector<ReportRow> rows;
  for (PredictMode mode : {PredictMode::one_step, PredictMode::free_run}) {
    GaussianSeries s = ensemble_average(ptrs, ds, mode);
    std::vector<std::pair<std::string, const std::vector<double>*>> refs;
    refs.emplace_back("noisy", &ds.y);
    if (ds.has_clean) refs.emplace_back("clean", &ds.y_clean);
    for (const auto& [ref_name, ref] : refs) {
      std::span<const double> truth(ref->data() + s.start, s.mean.size());
      ReportRow r;
      r.experiment = experiment;
      r.model = model_name;
      r.rmse = rmse(truth, s.mean);
      r.nll = nll_metric(truth, s.mean, s.var);
      r.architecture = members[0].spec.architecture();
      r.params_count = members[0].student_param_count();
      r.mode = mode == PredictMode::one_step ? "one-step" : "free-run";
      r.reference = ref_name;
      r.seed = ds.seed;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

Tensor teacher_phi_series(TrainedPair& regen, const IoDataset& ds) {
  if (!regen.teacher)
    throw Error(ErrCode::invalid_argument, "teacher_phi_series: model has no teacher");
  Teacher& t = *regen.teacher;
  const std::vector<double> ys = regen.stats.standardize_y(ds.y);
  const size_t n = ds.test.size();
  Tensor phi(regen.spec.repr_dim(), static_cast<int>(n));

  // Posterior-mean rollout, one small graph per step; hidden state carried
  // by value between steps.
  Tensor h_val(t.cfg.h_dim, 1);
  Tensor y_prev_val(1, 1);
  Tensor z_prev_val(t.cfg.z_dim, 1);
  const Tensor eps_zero(t.cfg.z_dim, 1);
  for (size_t k = 0; k < n; ++k) {
    Graph g;
    NodeId h = hidden_update(g, t, g.input(h_val), g.input(y_prev_val), g.input(z_prev_val));
    Tensor y_t(1, 1);
    y_t.data[0] = ys[ds.test.begin + k];
    GaussNodes post = encode(g, t, g.input(y_t), h);
    NodeId z = reparam_sample(g, post, g.input(eps_zero));
    NodeId p = g.concat_rows(h, z);
    for (auto& layer : t.proj_stack) p = dense_forward(g, layer, p);
    const Tensor& pv = g.value(p);
    for (int i = 0; i < pv.rows; ++i) phi.at(i, static_cast<int>(k)) = pv.data[i];
    h_val = g.value(h);
    y_prev_val = y_t;
    z_prev_val = g.value(z);
  }
  return phi;
}

Tensor student_phi_series(TrainedPair& pair, const IoDataset& ds) {
  const std::vector<double> us = pair.stats.standardize_u(ds.u);
  const std::vector<double> ys = pair.stats.standardize_y(ds.y);
  const size_t lag = static_cast<size_t>(pair.spec.lags.max_lag());
  if (ds.test.begin < lag)
    throw Error(ErrCode::invalid_argument, "student_phi_series: test range too early");

  const size_t n = ds.test.size();
  Tensor phi(pair.spec.repr_dim(), static_cast<int>(n));
  constexpr size_t kChunk = 512;
  for (size_t k0 = 0; k0 < n; k0 += kChunk) {
    const size_t k1 = std::min(n, k0 + kChunk);
    std::vector<size_t> ts(k1 - k0);
    for (size_t i = 0; i < ts.size(); ++i) ts[i] = ds.test.begin + k0 + i;
    Graph g;
    auto fwd = student_forward(g, pair.student, pair.head,
                               g.input(build_lag_matrix(us, ys, ts, pair.spec.lags)));
    const Tensor& pv = g.value(fwd.phi);
    for (int i = 0; i < pv.rows; ++i)
      for (int j = 0; j < pv.cols; ++j)
        phi.at(i, static_cast<int>(k0) + j) = pv.at(i, j);
  }
  return phi;
}

void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  IoDataset ds = make_dataset(cfg);
  save_csv_dataset(ds, out_dir + "/dataset.csv");
  write_experiment_config(cfg, out_dir + "/config.ini");
}

void cmd_train(const ExperimentConfig& cfg, const std::string& dataset_csv,
               const std::string& out_dir) {
  ensure_dir(out_dir);
  IoDataset ds = load_csv_dataset(dataset_csv);
  const ModelKind kind =
      cfg.model == "baseline" ? ModelKind::baseline : ModelKind::regenerative;
  std::vector<TrainedPair> members = train_ensemble(cfg, ds, kind);
  for (size_t i = 0; i < members.size(); ++i) {
    save_checkpoint(members[i], member_name(out_dir, cfg.model, i));
    std::ofstream hist(out_dir + "/history_" + std::to_string(i) + ".csv");
    hist << "epoch,train_loss,val_loss,val_elbo\n";
    for (size_t e = 0; e < members[i].history.size(); ++e) {
      const auto& st = members[i].history[e];
      hist << e << ',' << fmt17(st.train_loss) << ',' << fmt17(st.val_loss) << ','
           << fmt17(st.val_elbo) << '\n';
    }
  }
  write_experiment_config(cfg, out_dir + "/config.ini");
}

void cmd_evaluate(const std::string& checkpoint, const std::string& dataset_csv,
                  const std::string& out_dir) {
  ensure_dir(out_dir);
  TrainedPair pair = load_checkpoint(checkpoint);
  IoDataset ds = load_csv_dataset(dataset_csv);
  std::vector<TrainedPair> members;
  members.push_back(std::move(pair));
  const std::string name =
      members[0].spec.kind == ModelKind::baseline ? "baseline" : "regenerative";
  const std::string bench =
      ds.meta.count("benchmark") ? ds.meta.at("benchmark") : "dataset";
  auto rows = evaluate_rows(bench, name, members, ds);
  emit_report(rows, out_dir + "/report.csv");

  for (PredictMode mode : {PredictMode::one_step, PredictMode::free_run}) {
    GaussianSeries s = evaluate_pair(members[0], ds, mode);
    const auto& ref = ds.has_clean ? ds.y_clean : ds.y;
    std::span<const double> truth(ref.data() + s.start, s.mean.size());
    emit_series_csv(out_dir + (mode == PredictMode::one_step ? "/series_one_step.csv"
                                                             : "/series_free_run.csv"),
                    s.start, truth, s.mean, s.var);
  }
}

namespace {

void write_corr_csv(const Tensor& corr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io, "cannot write " + path);
  for (int i = 0; i < corr.rows; ++i) {
    for (int j = 0; j < corr.cols; ++j) {
      if (j) out << ',';
      out << fmt17(corr.at(i, j));
    }
    out << '\n';
  }
}

}  // namespace

void cmd_analyze(const std::string& checkpoint, const std::string& dataset_csv,
                 const std::string& out_dir, const std::string& baseline_checkpoint) {
  ensure_dir(out_dir);
  TrainedPair pair = load_checkpoint(checkpoint);
  if (pair.spec.kind != ModelKind::regenerative)
    throw Error(ErrCode::invalid_argument,
                "cmd_analyze: checkpoint must hold a regenerative pair");
  IoDataset ds = load_csv_dataset(dataset_csv);

  Tensor phi_t = teacher_phi_series(pair, ds);
  Tensor phi_s = student_phi_series(pair, ds);
  CorrelationResult student_corr = correlation_matrix(phi_s, phi_t);
  write_corr_csv(student_corr.corr, out_dir + "/corr_student_teacher.csv");

  std::ofstream summary(out_dir + "/summary.csv");
  summary << "pair,mean_max_abs_corr\n";
  summary << "student_vs_teacher," << fmt17(student_corr.summary) << '\n';

  if (!baseline_checkpoint.empty()) {
    TrainedPair base = load_checkpoint(baseline_checkpoint);
    Tensor phi_b = student_phi_series(base, ds);
    CorrelationResult base_corr = correlation_matrix(phi_b, phi_t);
    write_corr_csv(base_corr.corr, out_dir + "/corr_baseline_teacher.csv");
    summary << "baseline_vs_teacher," << fmt17(base_corr.summary) << '\n';
  }
}

void cmd_gridsearch(const ExperimentConfig& cfg, const std::string& dataset_csv,
                    const std::string& out_dir) {
  ensure_dir(out_dir);
  IoDataset ds = load_csv_dataset(dataset_csv);
  ModelSpec spec = cfg.spec;
  spec.kind = cfg.model == "baseline" ? ModelKind::baseline : ModelKind::regenerative;
  auto grid = make_width_grid(cfg.grid_depths, cfg.grid_widths);

  TrainConfig tc = cfg.train;
  tc.seed = CounterRng::derive(cfg.seed, 2000);

  // Candidates are independent; score them in parallel, rank afterwards.
  std::vector<RankedCandidate> scored(grid.size());
  std::vector<char> keep(grid.size(), 1);
  parallel_for(grid.size(), cfg.threads, [&](size_t i) {
    std::vector<GridCandidate> one{grid[i]};
    try {
      auto r = grid_search(ds, one, spec, tc, cfg.grid_epochs);
      scored[i] = r[0];
    } catch (const Error&) {
      keep[i] = 0;  // filtered by the width-subset constraint
    }
  });
  std::vector<RankedCandidate> ranked;
  for (size_t i = 0; i < grid.size(); ++i)
    if (keep[i]) ranked.push_back(scored[i]);
  if (ranked.empty())
    throw Error(ErrCode::invalid_argument, "cmd_gridsearch: no admissible candidate");
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.score < b.score;
                   });

  std::ofstream out(out_dir + "/grid.csv");
  out << "rank,widths,score\n";
  for (size_t i = 0; i < ranked.size(); ++i) {
    out << i << ',';
    for (size_t j = 0; j < ranked[i].cand.hidden.size(); ++j) {
      if (j) out << '-';
      out << ranked[i].cand.hidden[j];
    }
    out << ',' << fmt17(ranked[i].score) << '\n';
  }
  write_experiment_config(cfg, out_dir + "/config.ini");
}

void cmd_reproduce(const std::string& out_dir, const ExperimentConfig* overrides) {
  ensure_dir(out_dir);
  std::vector<ReportRow> all_rows;
  std::vector<ReportRow> table1;
  std::ofstream analysis(out_dir + "/analysis.csv");
  analysis << "experiment,student_vs_teacher,baseline_vs_teacher\n";

  for (const std::string bench : {"lgssm", "narendra_li", "wh_surrogate"}) {
    ExperimentConfig cfg = default_experiment_config(bench);
    if (overrides) {
      cfg.seed = overrides->seed;
      cfg.ensemble = overrides->ensemble;
      cfg.threads = overrides->threads;
      cfg.train.max_epochs = overrides->train.max_epochs;
      cfg.train.patience = overrides->train.patience;
      if (overrides->samples > 0) cfg.samples = overrides->samples;
      if (overrides->test_samples > 0) cfg.test_samples = overrides->test_samples;
    }
    IoDataset ds = make_dataset(cfg);
    write_experiment_config(cfg, out_dir + "/config_" + bench + ".ini");

    std::vector<TrainedPair> baseline = train_ensemble(cfg, ds, ModelKind::baseline);
    std::vector<TrainedPair> regen = train_ensemble(cfg, ds, ModelKind::regenerative);

    auto rows_b = evaluate_rows(bench, "baseline", baseline, ds);
    auto rows_r = evaluate_rows(bench, "regenerative", regen, ds);
    all_rows.insert(all_rows.end(), rows_b.begin(), rows_b.end());
    all_rows.insert(all_rows.end(), rows_r.begin(), rows_r.end());
    const std::string ref = ds.has_clean ? "clean" : "noisy";
    for (const auto& r : rows_b)
      if (r.mode == "one-step" && r.reference == ref) table1.push_back(r);
    for (const auto& r : rows_r)
      if (r.mode == "one-step" && r.reference == ref) table1.push_back(r);

    // Representation alignment summaries, matched seeds (member 0).
    Tensor phi_t = teacher_phi_series(regen[0], ds);
    const double s_corr = correlation_matrix(student_phi_series(regen[0], ds), phi_t).summary;
    const double b_corr = correlation_matrix(student_phi_series(baseline[0], ds), phi_t).summary;
    analysis << bench << ',' << fmt17(s_corr) << ',' << fmt17(b_corr) << '\n';

    // Plot-ready ensemble prediction on the test window.
    std::vector<TrainedPair*> ptrs;
    for (auto& m : regen) ptrs.push_back(&m);
    GaussianSeries s = ensemble_average(ptrs, ds, PredictMode::one_step);
    const auto& truth_src = ds.has_clean ? ds.y_clean : ds.y;
    std::span<const double> truth(truth_src.data() + s.start, s.mean.size());
    emit_series_csv(out_dir + "/series_" + bench + ".csv", s.start, truth, s.mean, s.var);
  }

  emit_report(table1, out_dir + "/table1.csv");
  emit_report(all_rows, out_dir + "/report.csv");
}

}  // namespace regenid
