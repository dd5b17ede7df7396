#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ue::harness {

// Flat key/value settings read from a toml-like text: `key = value` lines,
// `[section]` headers that prefix following keys with "section.", and `#`
// comments. Values may be wrapped in double quotes.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig from_file(const std::filesystem::path& path);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

 private:
  std::map<std::string, std::string> entries_;
};

enum class Experiment { kToy2d, kMnistInterp, kDigitTable, kTheoremCheck };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

enum class Method { kGp, kMcDropout, kMfvi, kHmc };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
std::vector<Method> parse_methods(std::string_view comma_list);

// Every setting of one experiment run. Starts from per-experiment defaults;
// overrides may only name keys that exist there, so typos fail loudly.
class ExperimentConfig {
 public:
  static ExperimentConfig defaults(Experiment e);

  // Throws PreconditionError for unknown keys or malformed values.
  void apply(const KeyValueConfig& overrides);
  void set(const std::string& key, const std::string& value);

  Experiment experiment() const { return experiment_; }
  std::uint64_t seed() const;
  std::vector<Method> methods() const;
  bool has_method(Method m) const;

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  // Comma-separated non-negative integers; empty string gives an empty list.
  std::vector<std::size_t> get_sizes(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  // Sorted `key = value` lines; the digest is the git blob SHA-1 of this text.
  std::string canonical_text() const;
  std::string digest() const;

  // Checks every typed value parses and the method list suits the experiment.
  void validate() const;

 private:
  Experiment experiment_ = Experiment::kToy2d;
  std::map<std::string, std::string> values_;
};

}  // namespace ue::harness
