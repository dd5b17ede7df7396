#include "ue/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ue/error.hpp"
#include "ue/numerics/prob.hpp"
#include "ue/numerics/special.hpp"

namespace ue::harness {

namespace {

constexpr double kConsistencyTol = 1e-9;
constexpr double kOvershootTol = 1e-12;

std::string g9(double v) { return fmt::format("{:.9g}", v); }

// JSON numbers carry the same 9 significant digits as the CSV.
double round9(double v) { return std::stod(g9(v)); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void UncertaintyReport::add_row(ReportRow row) {
  if (!std::isfinite(row.p_class1) || row.p_class1 < 0.0 || row.p_class1 > 1.0) {
    throw PreconditionError(fmt::format("row {}: p_class1 {} outside [0, 1]", row.probe_id, row.p_class1));
  }
  if (!std::isfinite(row.entropy_nats) || row.entropy_nats < -kOvershootTol ||
      row.entropy_nats > kLn2 + kOvershootTol) {
    throw PreconditionError(fmt::format("row {}: entropy {} outside [0, ln 2]", row.probe_id, row.entropy_nats));
  }
  row.entropy_nats = std::clamp(row.entropy_nats, 0.0, kLn2);
  if (std::abs(row.entropy_nats - binary_entropy(row.p_class1)) > kConsistencyTol) {
    throw PreconditionError(fmt::format("row {}: entropy {} disagrees with p_class1 {}", row.probe_id,
                                        row.entropy_nats, row.p_class1));
  }
  if (!keys_.emplace(row.probe_id, row.method).second) {
    throw PreconditionError(fmt::format("duplicate row ({}, {})", row.probe_id, to_string(row.method)));
  }
  rows_.push_back(std::move(row));
}

bool UncertaintyReport::has_summary(std::string_view name) const {
  for (const auto& s : summary) {
    if (s.name == name) return true;
  }
  return false;
}

double UncertaintyReport::summary_value(std::string_view name) const {
  for (const auto& s : summary) {
    if (s.name == name) return s.value;
  }
  throw PreconditionError(fmt::format("report has no summary entry '{}'", name));
}

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw PreconditionError(fmt::format("unknown report format '{}'", name));
}

std::string render_csv(const UncertaintyReport& r) {
  std::string out = "probe_id,method,descriptor,p_class1,entropy_nats\n";
  for (const auto& row : r.rows()) {
    out += fmt::format("{},{},{},{},{}\n", csv_field(row.probe_id), to_string(row.method), csv_field(row.descriptor),
                       g9(row.p_class1), g9(row.entropy_nats));
  }
  return out;
}

std::string render_json(const UncertaintyReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["experiment"] = r.experiment;
  ordered_json meta;
  meta["seed"] = r.seed;
  meta["config_digest"] = r.config_digest;
  meta["entropy_units"] = "nats";
  ordered_json hashes = ordered_json::object();
  for (const auto& [k, v] : r.model_hashes) hashes[k] = v;
  meta["model_hashes"] = hashes;
  j["metadata"] = meta;
  ordered_json summary = ordered_json::array();
  for (const auto& s : r.summary) summary.push_back({{"name", s.name}, {"value", round9(s.value)}});
  j["summary"] = summary;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows()) {
    ordered_json o;
    o["probe_id"] = row.probe_id;
    o["method"] = std::string(to_string(row.method));
    o["descriptor"] = row.descriptor;
    o["p_class1"] = round9(row.p_class1);
    o["entropy_nats"] = round9(row.entropy_nats);
    if (row.mean_member_entropy) o["mean_member_entropy"] = round9(*row.mean_member_entropy);
    rows.push_back(std::move(o));
  }
  j["rows"] = rows;
  return j.dump(1) + "\n";
}

void write_report(const UncertaintyReport& r, const std::filesystem::path& path, ReportFormat format) {
  const std::string text = format == ReportFormat::kCsv ? render_csv(r) : render_json(r);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write report {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing report {}", path.string()));
}

}  // namespace ue::harness
