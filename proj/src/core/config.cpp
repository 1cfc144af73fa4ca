#include "core/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace regenid {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(std::stoi(cell));
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw Error(ErrCode::invalid_argument, "config: bad boolean for " + key + ": " + v);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (benchmark != "lgssm" && benchmark != "narendra_li" &&
      benchmark != "wh_surrogate" && benchmark != "csv")
    throw Error(ErrCode::invalid_argument, "config: unknown benchmark " + benchmark);
  if (model != "baseline" && model != "regenerative")
    throw Error(ErrCode::invalid_argument, "config: unknown model kind " + model);
  if (ensemble < 1 || threads < 1)
    throw Error(ErrCode::invalid_argument, "config: ensemble and threads must be >= 1");
  if (train_frac <= 0.0 || train_frac >= 1.0)
    throw Error(ErrCode::invalid_argument, "config: train_frac must lie in (0, 1)");
  if (benchmark == "csv" && dataset_path.empty())
    throw Error(ErrCode::invalid_argument, "config: benchmark csv needs dataset_path");
  ModelSpec s = spec;
  s.kind = model == "baseline" ? ModelKind::baseline : ModelKind::regenerative;
  s.validate();
  train.validate();
}

ExperimentConfig default_experiment_config(const std::string& benchmark) {
  ExperimentConfig cfg;
  cfg.benchmark = benchmark;
  if (benchmark == "lgssm") {
    cfg.spec.lags = {10, 5};
    cfg.spec.student_hidden = {30};
    cfg.spec.baseline_hidden = {60, 30};
    cfg.spec.gru_hidden = 15;
    cfg.spec.z_dim = 15;
    cfg.spec.proj_hidden = {60};
    cfg.ensemble = 5;
    cfg.test_samples = 2000;
  } else if (benchmark == "narendra_li") {
    cfg.spec.lags = {20, 5};
    cfg.spec.student_hidden = {45, 10};
    cfg.spec.baseline_hidden = {45, 45, 10};
    cfg.spec.gru_hidden = 25;
    cfg.spec.z_dim = 25;
    cfg.spec.proj_hidden = {45, 45};
    cfg.ensemble = 3;
    cfg.test_samples = 2000;
    cfg.input_low = -2.5;
    cfg.input_high = 2.5;
  } else if (benchmark == "wh_surrogate" || benchmark == "csv") {
    cfg.benchmark = benchmark;
    cfg.spec.lags = {20, 20};
    cfg.spec.student_hidden = {20};
    cfg.spec.baseline_hidden = {80, 20};
    cfg.spec.gru_hidden = 40;
    cfg.spec.z_dim = 40;
    cfg.spec.proj_hidden = {80};
    cfg.ensemble = 3;
    cfg.samples = 50000;
    cfg.test_samples = 8192;
  } else {
    throw Error(ErrCode::invalid_argument, "default_experiment_config: unknown benchmark " + benchmark);
  }
  return cfg;
}

void apply_config_override(ExperimentConfig& cfg, const std::string& dotted_key,
                           const std::string& value) {
  const auto pos = dotted_key.find('.');
  if (pos == std::string::npos)
    throw Error(ErrCode::invalid_argument,
                "config: expected section.key, got " + dotted_key);
  const std::string section = dotted_key.substr(0, pos);
  const std::string key = dotted_key.substr(pos + 1);
  const std::string& v = value;

  if (section == "experiment") {
    if (key == "benchmark") cfg.benchmark = v;
    else if (key == "model") cfg.model = v;
    else if (key == "seed") cfg.seed = std::stoull(v);
    else if (key == "ensemble") cfg.ensemble = std::stoi(v);
    else if (key == "threads") cfg.threads = std::stoi(v);
    else if (key == "dataset_path") cfg.dataset_path = v;
    else throw Error(ErrCode::invalid_argument, "config: unknown key experiment." + key);
  } else if (section == "data") {
    if (key == "samples") cfg.samples = std::stoull(v);
    else if (key == "test_samples") cfg.test_samples = std::stoull(v);
    else if (key == "input_low") cfg.input_low = std::stod(v);
    else if (key == "input_high") cfg.input_high = std::stod(v);
    else if (key == "noise") cfg.noise = parse_bool(v, key);
    else if (key == "nl_noise_std") cfg.nl_noise_std = std::stod(v);
    else if (key == "wh_f0") cfg.wh_f0 = std::stod(v);
    else if (key == "wh_f1") cfg.wh_f1 = std::stod(v);
    else if (key == "wh_band_lo") cfg.wh_band_lo = std::stod(v);
    else if (key == "wh_band_hi") cfg.wh_band_hi = std::stod(v);
    else if (key == "wh_tones") cfg.wh_tones = std::stoi(v);
    else if (key == "train_frac") cfg.train_frac = std::stod(v);
    else throw Error(ErrCode::invalid_argument, "config: unknown key data." + key);
  } else if (section == "model") {
    if (key == "lag_u") cfg.spec.lags.n_b = std::stoi(v);
    else if (key == "lag_y") cfg.spec.lags.n_a = std::stoi(v);
    else if (key == "student_hidden") cfg.spec.student_hidden = split_ints(v);
    else if (key == "baseline_hidden") cfg.spec.baseline_hidden = split_ints(v);
    else if (key == "gru_hidden") cfg.spec.gru_hidden = std::stoi(v);
    else if (key == "z_dim") cfg.spec.z_dim = std::stoi(v);
    else if (key == "proj_hidden") cfg.spec.proj_hidden = split_ints(v);
    else throw Error(ErrCode::invalid_argument, "config: unknown key model." + key);
  } else if (section == "train") {
    if (key == "lr") cfg.train.lr = std::stod(v);
    else if (key == "beta1") cfg.train.beta1 = std::stod(v);
    else if (key == "beta2") cfg.train.beta2 = std::stod(v);
    else if (key == "adam_eps") cfg.train.eps = std::stod(v);
    else if (key == "max_epochs") cfg.train.max_epochs = std::stoi(v);
    else if (key == "patience") cfg.train.patience = std::stoi(v);
    else if (key == "subseq_len") cfg.train.subseq_len = std::stoi(v);
    else if (key == "batch_size") cfg.train.batch_size = std::stoi(v);
    else if (key == "alignment") {
      if (v == "distance") cfg.train.align = AlignVariant::distance;
      else if (v == "correlation") cfg.train.align = AlignVariant::correlation;
      else throw Error(ErrCode::invalid_argument, "config: bad alignment variant " + v);
    }
    else if (key == "alpha1") cfg.train.weights.alpha1 = std::stod(v);
    else if (key == "alpha2") cfg.train.weights.alpha2 = std::stod(v);
    else if (key == "alpha3") cfg.train.weights.alpha3 = std::stod(v);
    else throw Error(ErrCode::invalid_argument, "config: unknown key train." + key);
  } else if (section == "grid") {
    if (key == "depths") cfg.grid_depths = split_ints(v);
    else if (key == "widths") cfg.grid_widths = split_ints(v);
    else if (key == "epochs") cfg.grid_epochs = std::stoi(v);
    else throw Error(ErrCode::invalid_argument, "config: unknown key grid." + key);
  } else {
    throw Error(ErrCode::invalid_argument, "config: unknown section " + section);
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrCode::io, "config: cannot open " + path);

  // First pass to find the benchmark so defaults are benchmark-appropriate.
  std::string line, section, benchmark = "lgssm";
  {
    std::ifstream scan(path);
    std::string sec;
    while (std::getline(scan, line)) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[' && t.back() == ']') {
        sec = t.substr(1, t.size() - 2);
        continue;
      }
      const auto pos = t.find('=');
      if (pos != std::string::npos && sec == "experiment" &&
          trim(t.substr(0, pos)) == "benchmark")
        benchmark = trim(t.substr(pos + 1));
    }
  }

  ExperimentConfig cfg = default_experiment_config(benchmark);
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      continue;
    }
    const auto pos = t.find('=');
    if (pos == std::string::npos)
      throw Error(ErrCode::invalid_argument,
                  "config: malformed line " + std::to_string(lineno) + " in " + path);
    if (section.empty())
      throw Error(ErrCode::invalid_argument,
                  "config: key before any [section] at line " + std::to_string(lineno));
    apply_config_override(cfg, section + "." + trim(t.substr(0, pos)),
                          trim(t.substr(pos + 1)));
  }
  cfg.validate();
  return cfg;
}

void write_experiment_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io, "config: cannot write " + path);
  out << "[experiment]\n";
  out << "benchmark = " << cfg.benchmark << '\n';
  out << "model = " << cfg.model << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "ensemble = " << cfg.ensemble << '\n';
  out << "threads = " << cfg.threads << '\n';
  if (!cfg.dataset_path.empty()) out << "dataset_path = " << cfg.dataset_path << '\n';
  out << "\n[data]\n";
  out << "samples = " << cfg.samples << '\n';
  out << "test_samples = " << cfg.test_samples << '\n';
  out << "input_low = " << fmt17(cfg.input_low) << '\n';
  out << "input_high = " << fmt17(cfg.input_high) << '\n';
  out << "noise = " << (cfg.noise ? "on" : "off") << '\n';
  out << "nl_noise_std = " << fmt17(cfg.nl_noise_std) << '\n';
  out << "wh_f0 = " << fmt17(cfg.wh_f0) << '\n';
  out << "wh_f1 = " << fmt17(cfg.wh_f1) << '\n';
  out << "wh_band_lo = " << fmt17(cfg.wh_band_lo) << '\n';
  out << "wh_band_hi = " << fmt17(cfg.wh_band_hi) << '\n';
  out << "wh_tones = " << cfg.wh_tones << '\n';
  out << "train_frac = " << fmt17(cfg.train_frac) << '\n';
  out << "\n[model]\n";
  out << "lag_u = " << cfg.spec.lags.n_b << '\n';
  out << "lag_y = " << cfg.spec.lags.n_a << '\n';
  out << "student_hidden = " << join_ints(cfg.spec.student_hidden) << '\n';
  out << "baseline_hidden = " << join_ints(cfg.spec.baseline_hidden) << '\n';
  out << "gru_hidden = " << cfg.spec.gru_hidden << '\n';
  out << "z_dim = " << cfg.spec.z_dim << '\n';
  out << "proj_hidden = " << join_ints(cfg.spec.proj_hidden) << '\n';
  out << "\n[train]\n";
  out << "lr = " << fmt17(cfg.train.lr) << '\n';
  out << "beta1 = " << fmt17(cfg.train.beta1) << '\n';
  out << "beta2 = " << fmt17(cfg.train.beta2) << '\n';
  out << "adam_eps = " << fmt17(cfg.train.eps) << '\n';
  out << "max_epochs = " << cfg.train.max_epochs << '\n';
  out << "patience = " << cfg.train.patience << '\n';
  out << "subseq_len = " << cfg.train.subseq_len << '\n';
  out << "batch_size = " << cfg.train.batch_size << '\n';
  out << "alignment = "
      << (cfg.train.align == AlignVariant::distance ? "distance" : "correlation") << '\n';
  out << "alpha1 = " << fmt17(cfg.train.weights.alpha1) << '\n';
  out << "alpha2 = " << fmt17(cfg.train.weights.alpha2) << '\n';
  out << "alpha3 = " << fmt17(cfg.train.weights.alpha3) << '\n';
  out << "\n[grid]\n";
  out << "depths = " << join_ints(cfg.grid_depths) << '\n';
  out << "widths = " << join_ints(cfg.grid_widths) << '\n';
  out << "epochs = " << cfg.grid_epochs << '\n';
}

}  // namespace regenid
