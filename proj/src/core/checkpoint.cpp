#include "core/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace regenid {

namespace {

constexpr const char* kMagic = "REGENID-CKPT-1";

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

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

}  // namespace

void save_checkpoint(TrainedPair& pair, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrCode::io, "save_checkpoint: cannot write " + path);

  const ModelSpec& s = pair.spec;
  const TrainConfig& c = pair.cfg;
  out << kMagic << '\n';
  out << "[config]\n";
  out << "kind=" << (s.kind == ModelKind::baseline ? "baseline" : "regenerative") << '\n';
  out << "n_b=" << s.lags.n_b << '\n';
  out << "n_a=" << s.lags.n_a << '\n';
  out << "student_hidden=" << join_ints(s.student_hidden) << '\n';
  out << "baseline_hidden=" << join_ints(s.baseline_hidden) << '\n';
  out << "gru_hidden=" << s.gru_hidden << '\n';
  out << "z_dim=" << s.z_dim << '\n';
  out << "proj_hidden=" << join_ints(s.proj_hidden) << '\n';
  out << "lr=" << fmt17(c.lr) << '\n';
  out << "beta1=" << fmt17(c.beta1) << '\n';
  out << "beta2=" << fmt17(c.beta2) << '\n';
  out << "adam_eps=" << fmt17(c.eps) << '\n';
  out << "max_epochs=" << c.max_epochs << '\n';
  out << "patience=" << c.patience << '\n';
  out << "subseq_len=" << c.subseq_len << '\n';
  out << "batch_size=" << c.batch_size << '\n';
  out << "seed=" << c.seed << '\n';
  out << "align=" << (c.align == AlignVariant::distance ? "distance" : "correlation") << '\n';
  out << "alpha1=" << fmt17(c.weights.alpha1) << '\n';
  out << "alpha2=" << fmt17(c.weights.alpha2) << '\n';
  out << "alpha3=" << fmt17(c.weights.alpha3) << '\n';
  out << "u_mean=" << fmt17(pair.stats.u_mean) << '\n';
  out << "u_std=" << fmt17(pair.stats.u_std) << '\n';
  out << "y_mean=" << fmt17(pair.stats.y_mean) << '\n';
  out << "y_std=" << fmt17(pair.stats.y_std) << '\n';
  out << "best_val=" << fmt17(pair.best_val) << '\n';
  out << "best_epoch=" << pair.best_epoch << '\n';

  out << "[manifest]\n";
  size_t offset = 0;
  auto params = pair.params();
  for (const Param* p : params) {
    out << p->name << ' ' << p->value.rows << ' ' << p->value.cols << ' ' << offset << '\n';
    offset += static_cast<size_t>(p->numel()) * sizeof(double);
  }
  out << "[data]\n";
  for (const Param* p : params)
    out.write(reinterpret_cast<const char*>(p->value.data.data()),
              static_cast<std::streamsize>(p->numel() * sizeof(double)));
  if (!out) throw Error(ErrCode::io, "save_checkpoint: write failed for " + path);
}

TrainedPair load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrCode::io, "load_checkpoint: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw Error(ErrCode::io, "load_checkpoint: bad magic in " + path);
  if (!std::getline(in, line) || line != "[config]")
    throw Error(ErrCode::io, "load_checkpoint: missing [config] in " + path);

  std::map<std::string, std::string> kv;
  while (std::getline(in, line) && line != "[manifest]") {
    const auto pos = line.find('=');
    if (pos == std::string::npos)
      throw Error(ErrCode::io, "load_checkpoint: malformed config line '" + line + "'");
    kv[line.substr(0, pos)] = line.substr(pos + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw Error(ErrCode::io, "load_checkpoint: missing key " + key);
    return it->second;
  };

  ModelSpec spec;
  spec.kind = need("kind") == "baseline" ? ModelKind::baseline : ModelKind::regenerative;
  spec.lags.n_b = std::stoi(need("n_b"));
  spec.lags.n_a = std::stoi(need("n_a"));
  spec.student_hidden = split_ints(need("student_hidden"));
  spec.baseline_hidden = split_ints(need("baseline_hidden"));
  spec.gru_hidden = std::stoi(need("gru_hidden"));
  spec.z_dim = std::stoi(need("z_dim"));
  spec.proj_hidden = split_ints(need("proj_hidden"));

  TrainConfig cfg;
  cfg.lr = std::stod(need("lr"));
  cfg.beta1 = std::stod(need("beta1"));
  cfg.beta2 = std::stod(need("beta2"));
  cfg.eps = std::stod(need("adam_eps"));
  cfg.max_epochs = std::stoi(need("max_epochs"));
  cfg.patience = std::stoi(need("patience"));
  cfg.subseq_len = std::stoi(need("subseq_len"));
  cfg.batch_size = std::stoi(need("batch_size"));
  cfg.seed = std::stoull(need("seed"));
  cfg.align = need("align") == "correlation" ? AlignVariant::correlation
                                             : AlignVariant::distance;
  cfg.weights.alpha1 = std::stod(need("alpha1"));
  cfg.weights.alpha2 = std::stod(need("alpha2"));
  cfg.weights.alpha3 = std::stod(need("alpha3"));

  TrainedPair pair(spec, cfg);
  pair.stats.u_mean = std::stod(need("u_mean"));
  pair.stats.u_std = std::stod(need("u_std"));
  pair.stats.y_mean = std::stod(need("y_mean"));
  pair.stats.y_std = std::stod(need("y_std"));
  pair.best_val = std::stod(need("best_val"));
  pair.best_epoch = std::stoi(need("best_epoch"));

  struct Entry {
    int rows, cols;
    size_t offset;
  };
  std::map<std::string, Entry> manifest;
  while (std::getline(in, line) && line != "[data]") {
    std::stringstream ss(line);
    std::string name;
    Entry e{};
    if (!(ss >> name >> e.rows >> e.cols >> e.offset))
      throw Error(ErrCode::io, "load_checkpoint: malformed manifest line '" + line + "'");
    manifest[name] = e;
  }
  const std::streampos data_start = in.tellg();

  for (Param* p : pair.params()) {
    auto it = manifest.find(p->name);
    if (it == manifest.end())
      throw Error(ErrCode::io, "load_checkpoint: manifest missing parameter " + p->name);
    const Entry& e = it->second;
    if (e.rows != p->value.rows || e.cols != p->value.cols)
      throw Error(ErrCode::io, "load_checkpoint: shape mismatch for " + p->name);
    in.seekg(data_start + static_cast<std::streamoff>(e.offset));
    in.read(reinterpret_cast<char*>(p->value.data.data()),
            static_cast<std::streamsize>(p->numel() * sizeof(double)));
    if (!in) throw Error(ErrCode::io, "load_checkpoint: truncated data for " + p->name);
  }
  return pair;
}

}  // namespace regenid
