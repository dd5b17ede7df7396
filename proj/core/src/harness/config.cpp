#include "ue/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/harness/digest.hpp"

namespace ue::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
           c == '-';
  });
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw PreconditionError(fmt::format("setting '{}': '{}' is not a finite number", key, s));
  }
  return v;
}

long long parse_int(std::string_view key, std::string_view s) {
  long long v = 0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw PreconditionError(fmt::format("setting '{}': '{}' is not an integer", key, s));
  }
  return v;
}

using Table = std::vector<std::pair<const char*, const char*>>;

const Table kGpBlock = {
    {"gp.link", "probit"},
    {"gp.length_scale_min_exp", "-3"},
    {"gp.length_scale_max_exp", "3"},
    {"gp.signal_variance", "1"},
    {"gp.tol", "1e-6"},
    {"gp.max_iter", "100"},
    {"gp.train_subsample", "0"},
    {"gp.encoder_layers", ""},
    {"gp.encoder_layer", "2"},
    {"gp.encoder_dropout", "0.6"},
    {"gp.encoder_epochs", "20"},
    {"gp.encoder_learning_rate", "0.001"},
    {"gp.encoder_batch_size", "64"},
    {"gp.encoder_weight_decay", "0"},
};

const Table kMcDropoutBlock = {
    {"mcdropout.layers", "2,300,2"},
    {"mcdropout.dropout", "0.5"},
    {"mcdropout.optimizer", "adam"},
    {"mcdropout.learning_rate", "0.001"},
    {"mcdropout.batch_size", "64"},
    {"mcdropout.epochs", "50"},
    {"mcdropout.weight_decay", "0"},
    {"mcdropout.samples", "100"},
};

const Table kMfviBlock = {
    {"mfvi.layers", "2,512,128,2"},
    {"mfvi.epochs", "50"},
    {"mfvi.batch_size", "64"},
    {"mfvi.learning_rate", "0.001"},
    {"mfvi.kl_weight", "0.1"},
    {"mfvi.prior_precision", "100"},
    {"mfvi.rho_init", "-5"},
    {"mfvi.predict_samples", "100"},
};

const Table kHmcBlock = {
    {"hmc.layers", "2,512,128,2"},
    {"hmc.step_size", "0.0005"},
    {"hmc.trajectory_length", "3"},
    {"hmc.samples", "300"},
    {"hmc.burn_in", "200"},
    {"hmc.thin", "1"},
    {"hmc.prior_precision", "5"},
    {"hmc.warm_epochs", "1000"},
    {"hmc.warm_learning_rate", "0.001"},
    {"hmc.warm_batch_size", "64"},
    {"hmc.train_subsample", "0"},
};

const Table kMnistPaths = {
    {"mnist.train_images", ""},
    {"mnist.train_labels", ""},
    {"mnist.test_images", ""},
    {"mnist.test_labels", ""},
};

// MNIST-scale overrides of the blocks above.
const Table kMnistOverrides = {
    {"gp.train_subsample", "2000"},
    {"gp.encoder_layers", "784,600,20,2"},
    {"mcdropout.layers", "784,500,2"},
    {"mcdropout.dropout", "0.6"},
    {"mcdropout.epochs", "20"},
    {"mcdropout.weight_decay", "0.005"},
    {"mfvi.layers", "784,1024,128,2"},
    {"mfvi.epochs", "20"},
    {"hmc.layers", "784,1024,128,2"},
    {"hmc.samples", "100"},
    {"hmc.thin", "3"},
    {"hmc.warm_epochs", "20"},
    {"hmc.train_subsample", "2000"},
};

void put(std::map<std::string, std::string>& m, const Table& t) {
  for (const auto& [k, v] : t) m[k] = v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError(fmt::format("config line {}: unterminated section header", line_no));
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) throw FormatError(fmt::format("config line {}: bad section name", line_no));
      section = std::string(name) + ".";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError(fmt::format("config line {}: expected key = value", line_no));
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw FormatError(fmt::format("config line {}: bad key '{}'", line_no, key));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const std::string full = section + std::string(key);
    if (cfg.entries_.count(full) != 0) throw FormatError(fmt::format("config line {}: duplicate key '{}'", line_no, full));
    cfg.entries_[full] = std::string(value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kToy2d: return "toy2d";
    case Experiment::kMnistInterp: return "mnist-interp";
    case Experiment::kDigitTable: return "digit-table";
    case Experiment::kTheoremCheck: return "theorem-check";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::kToy2d, Experiment::kMnistInterp, Experiment::kDigitTable,
                       Experiment::kTheoremCheck}) {
    if (to_string(e) == name) return e;
  }
  throw PreconditionError(fmt::format("unknown experiment '{}'", name));
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kGp: return "gp";
    case Method::kMcDropout: return "mcdropout";
    case Method::kMfvi: return "mfvi";
    case Method::kHmc: return "hmc";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kGp, Method::kMcDropout, Method::kMfvi, Method::kHmc}) {
    if (to_string(m) == name) return m;
  }
  throw PreconditionError(fmt::format("unknown method '{}'", name));
}

std::vector<Method> parse_methods(std::string_view comma_list) {
  std::vector<Method> out;
  for (auto item : split_commas(comma_list)) {
    const Method m = parse_method(item);
    if (std::find(out.begin(), out.end(), m) != out.end()) {
      throw PreconditionError(fmt::format("method '{}' listed twice", item));
    }
    out.push_back(m);
  }
  if (out.empty()) throw PreconditionError("method list is empty");
  return out;
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment_ = e;
  auto& v = c.values_;
  v["experiment"] = std::string(to_string(e));
  v["seed"] = "0";
  switch (e) {
    case Experiment::kToy2d:
      v["methods"] = "gp,mcdropout,mfvi,hmc";
      v["toy.n_per_class"] = "200";
      v["grid.min"] = "-6";
      v["grid.max"] = "6";
      v["grid.resolution"] = "100";
      put(v, kGpBlock);
      put(v, kMcDropoutBlock);
      put(v, kMfviBlock);
      put(v, kHmcBlock);
      break;
    case Experiment::kMnistInterp:
      v["methods"] = "gp,mcdropout,mfvi,hmc";
      put(v, kMnistPaths);
      v["interp.pairs"] = "100";
      v["interp.t_min"] = "-1";
      v["interp.t_max"] = "2";
      v["interp.t_points"] = "31";
      put(v, kGpBlock);
      put(v, kMcDropoutBlock);
      put(v, kMfviBlock);
      put(v, kHmcBlock);
      put(v, kMnistOverrides);
      break;
    case Experiment::kDigitTable:
      v["methods"] = "mcdropout";
      put(v, kMnistPaths);
      put(v, kMcDropoutBlock);
      for (const auto& [k, val] : kMnistOverrides) {
        if (std::string_view(k).starts_with("mcdropout.")) v[k] = val;
      }
      break;
    case Experiment::kTheoremCheck:
      v["methods"] = "gp";
      v["toy.n_per_class"] = "200";
      put(v, kGpBlock);
      v.erase("gp.train_subsample");
      for (const auto& [k, val] : kGpBlock) {
        if (std::string_view(k).starts_with("gp.encoder")) v.erase(k);
      }
      v["theorem.rays"] = "8";
      v["theorem.max_distance"] = "15";
      v["theorem.steps"] = "31";
      v["theorem.epsilons"] = "1e-6,1e-8,1e-10";
      break;
  }
  return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment") {
    if (value != values_.at("experiment")) {
      throw PreconditionError(fmt::format("config is for experiment '{}', not '{}'", value, values_.at("experiment")));
    }
    return;
  }
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw PreconditionError(fmt::format("unknown setting '{}' for experiment {}", key, to_string(experiment_)));
  }
  it->second = value;
}

void ExperimentConfig::apply(const KeyValueConfig& overrides) {
  for (const auto& [k, v] : overrides.entries()) set(k, v);
}

const std::string& ExperimentConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw PreconditionError(fmt::format("missing setting '{}'", key));
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const { return parse_double(key, get_string(key)); }

long long ExperimentConfig::get_int(const std::string& key) const { return parse_int(key, get_string(key)); }

std::size_t ExperimentConfig::get_size(const std::string& key) const {
  const long long v = get_int(key);
  if (v < 0) throw PreconditionError(fmt::format("setting '{}' must be non-negative", key));
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> ExperimentConfig::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (auto item : split_commas(get_string(key))) {
    const long long v = parse_int(key, item);
    if (v < 0) throw PreconditionError(fmt::format("setting '{}' must list non-negative integers", key));
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (auto item : split_commas(get_string(key))) out.push_back(parse_double(key, item));
  return out;
}

std::uint64_t ExperimentConfig::seed() const {
  const auto& s = get_string("seed");
  std::uint64_t v = 0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw PreconditionError(fmt::format("seed '{}' is not an unsigned integer", s));
  }
  return v;
}

std::vector<Method> ExperimentConfig::methods() const { return parse_methods(get_string("methods")); }

bool ExperimentConfig::has_method(Method m) const {
  const auto ms = methods();
  return std::find(ms.begin(), ms.end(), m) != ms.end();
}

std::string ExperimentConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += fmt::format("{} = {}\n", k, v);
  return out;
}

std::string ExperimentConfig::digest() const { return git_blob_sha1(canonical_text()); }

void ExperimentConfig::validate() const {
  (void)seed();
  const auto ms = methods();
  if (experiment_ == Experiment::kDigitTable && (ms.size() != 1 || ms[0] != Method::kMcDropout)) {
    throw PreconditionError("digit-table supports only the mcdropout method");
  }
  if (experiment_ == Experiment::kTheoremCheck && (ms.size() != 1 || ms[0] != Method::kGp)) {
    throw PreconditionError("theorem-check supports only the gp method");
  }
  // Touch every typed setting once so malformed values fail before training.
  for (const auto& [k, v] : values_) {
    if (k == "experiment" || k == "methods" || k == "seed" || k == "gp.link" || k == "mcdropout.optimizer" ||
        k.starts_with("mnist.")) {
      continue;
    }
    if (k.ends_with("layers") || k == "theorem.epsilons") {
      (void)get_doubles(k);
    } else {
      (void)get_double(k);
    }
  }
}

}  // namespace ue::harness
