#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ue/harness/config.hpp"

namespace ue::harness {

struct ReportRow {
  std::string probe_id;
  Method method = Method::kGp;
  std::string descriptor;  // e.g. "x=1.5;y=-2", "pair=3;t=0.5", "class=7"
  double p_class1 = 0.5;
  double entropy_nats = 0.0;
  // Average of per-member entropies for ensemble methods (JSON only).
  std::optional<double> mean_member_entropy;
};

struct SummaryEntry {
  std::string name;
  double value = 0.0;
};

class UncertaintyReport {
 public:
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::map<std::string, std::string> model_hashes;
  std::vector<SummaryEntry> summary;

  // Validates the row: p_class1 in [0, 1], entropy in [0, ln 2] and within
  // 1e-9 of the binary entropy of p_class1, (probe_id, method) unique.
  // Entropies that overshoot ln 2 by less than 1e-12 are clamped.
  void add_row(ReportRow row);
  const std::vector<ReportRow>& rows() const { return rows_; }

  void add_summary(std::string name, double value) { summary.push_back({std::move(name), value}); }
  // Throws PreconditionError if absent.
  double summary_value(std::string_view name) const;
  bool has_summary(std::string_view name) const;

 private:
  std::vector<ReportRow> rows_;
  std::set<std::pair<std::string, Method>> keys_;
};

enum class ReportFormat { kCsv, kJson };

ReportFormat parse_format(std::string_view name);

// Header `probe_id,method,descriptor,p_class1,entropy_nats`; floats with 9
// significant digits. Output depends only on the report contents.
std::string render_csv(const UncertaintyReport& r);
std::string render_json(const UncertaintyReport& r);

// Throws IoError when the file cannot be written.
void write_report(const UncertaintyReport& r, const std::filesystem::path& path, ReportFormat format);

}  // namespace ue::harness
