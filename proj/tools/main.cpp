// Command-line front end. Talks to the library exclusively through the
// C API in regenid.h.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "regenid.h"

namespace {

struct ConfigDeleter {
  void operator()(rg_config* c) const { rg_config_free(c); }
};
using ConfigPtr = std::unique_ptr<rg_config, ConfigDeleter>;

[[noreturn]] void fail(rg_status status) {
  std::fprintf(stderr, "error: %s\n", rg_last_error());
  std::exit(static_cast<int>(status));
}

void check(rg_status status) {
  if (status != RG_OK) fail(status);
}

struct CommonOpts {
  std::string config_path;
  std::string benchmark = "lgssm";
  std::vector<std::string> sets;  // section.key=value overrides
  std::string seed;
  std::string threads;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-c,--config", o.config_path, "INI config file");
  cmd->add_option("-b,--benchmark", o.benchmark,
                  "benchmark when no config file is given "
                  "(lgssm | narendra_li | wh_surrogate | csv)");
  cmd->add_option("--set", o.sets, "override, e.g. --set train.max_epochs=50");
  cmd->add_option("--seed", o.seed, "shorthand for --set experiment.seed=...");
  cmd->add_option("--threads", o.threads, "shorthand for --set experiment.threads=...");
}

ConfigPtr make_config(const CommonOpts& o) {
  rg_config* raw = nullptr;
  if (!o.config_path.empty())
    check(rg_config_load(o.config_path.c_str(), &raw));
  else
    check(rg_config_default(o.benchmark.c_str(), &raw));
  ConfigPtr cfg(raw);
  if (!o.seed.empty()) check(rg_config_set(cfg.get(), "experiment.seed", o.seed.c_str()));
  if (!o.threads.empty())
    check(rg_config_set(cfg.get(), "experiment.threads", o.threads.c_str()));
  for (const std::string& kv : o.sets) {
    const auto pos = kv.find('=');
    if (pos == std::string::npos) {
      std::fprintf(stderr, "error: --set expects section.key=value, got '%s'\n",
                   kv.c_str());
      return nullptr;
    }
    check(rg_config_set(cfg.get(), kv.substr(0, pos).c_str(),
                        kv.substr(pos + 1).c_str()));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regenid: teacher-student system identification"};
  app.require_subcommand(1);

  CommonOpts sim_opts, train_opts, grid_opts, repro_opts;
  std::string out_dir, dataset, checkpoint, baseline;
  bool with_overrides = false;

  auto* sim = app.add_subcommand("simulate", "generate a benchmark dataset");
  add_common(sim, sim_opts);
  sim->add_option("-o,--out", out_dir, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a model ensemble");
  add_common(train, train_opts);
  train->add_option("-d,--dataset", dataset, "dataset CSV")->required();
  train->add_option("-o,--out", out_dir, "output directory")->required();

  auto* eval = app.add_subcommand("evaluate", "evaluate a checkpoint on the test split");
  eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  eval->add_option("-d,--dataset", dataset, "dataset CSV")->required();
  eval->add_option("-o,--out", out_dir, "output directory")->required();

  auto* analyze =
      app.add_subcommand("analyze", "correlate student and teacher representations");
  analyze->add_option("--checkpoint", checkpoint, "regenerative checkpoint")->required();
  analyze->add_option("--baseline", baseline, "optional baseline checkpoint");
  analyze->add_option("-d,--dataset", dataset, "dataset CSV")->required();
  analyze->add_option("-o,--out", out_dir, "output directory")->required();

  auto* grid = app.add_subcommand("gridsearch", "rank architectures on a dataset");
  add_common(grid, grid_opts);
  grid->add_option("-d,--dataset", dataset, "dataset CSV")->required();
  grid->add_option("-o,--out", out_dir, "output directory")->required();

  auto* repro =
      app.add_subcommand("reproduce", "run all benchmarks and emit the summary table");
  add_common(repro, repro_opts);
  repro->add_option("-o,--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) {
    ConfigPtr cfg = make_config(sim_opts);
    if (!cfg) return 2;
    check(rg_simulate(cfg.get(), out_dir.c_str()));
  } else if (train->parsed()) {
    ConfigPtr cfg = make_config(train_opts);
    if (!cfg) return 2;
    check(rg_train(cfg.get(), dataset.c_str(), out_dir.c_str()));
  } else if (eval->parsed()) {
    check(rg_evaluate(checkpoint.c_str(), dataset.c_str(), out_dir.c_str()));
  } else if (analyze->parsed()) {
    check(rg_analyze(checkpoint.c_str(), baseline.empty() ? nullptr : baseline.c_str(),
                     dataset.c_str(), out_dir.c_str()));
  } else if (grid->parsed()) {
    ConfigPtr cfg = make_config(grid_opts);
    if (!cfg) return 2;
    check(rg_gridsearch(cfg.get(), dataset.c_str(), out_dir.c_str()));
  } else if (repro->parsed()) {
    with_overrides = !repro_opts.config_path.empty() || !repro_opts.sets.empty() ||
                     !repro_opts.seed.empty() || !repro_opts.threads.empty();
    ConfigPtr cfg;
    if (with_overrides) {
      cfg = make_config(repro_opts);
      if (!cfg) return 2;
    }
    check(rg_reproduce(out_dir.c_str(), cfg.get()));
  }
  return 0;
}
