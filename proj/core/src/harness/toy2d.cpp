#include <array>

#include <fmt/format.h>

#include "models.hpp"
#include "ue/harness/experiment.hpp"

namespace ue::harness {

namespace {

struct NamedPoint {
  const char* id;
  double x;
  double y;
};

// Far from the decision boundary x = -y on either side, then the origin,
// which sits on the boundary.
constexpr std::array<NamedPoint, 5> kNamed = {{
    {"pt_6_6", 6.0, 6.0},
    {"pt_m6_m6", -6.0, -6.0},
    {"pt_5_4", 5.0, 4.0},
    {"pt_m4_m5", -4.0, -5.0},
    {"pt_0_0", 0.0, 0.0},
}};
constexpr std::size_t kFarCount = 4;

}  // namespace

UncertaintyReport run_toy2d(const ExperimentConfig& cfg, const RunOptions& options) {
  using namespace detail;
  cfg.validate();
  const std::uint64_t seed = cfg.seed();
  const Dataset train = make_toy2d(cfg.get_size("toy.n_per_class"), seed);
  const double lo = cfg.get_double("grid.min");
  const double hi = cfg.get_double("grid.max");
  const std::size_t res = cfg.get_size("grid.resolution");
  const DenseMatrix grid = grid2d(lo, hi, lo, hi, res);
  const auto n_grid = static_cast<std::size_t>(grid.cols());

  DenseMatrix probes(2, grid.cols() + static_cast<Eigen::Index>(kNamed.size()));
  probes.leftCols(grid.cols()) = grid;
  std::vector<std::string> ids;
  std::vector<std::string> desc;
  for (std::size_t k = 0; k < n_grid; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    ids.push_back(fmt::format("grid_{:05}", k));
    desc.push_back(fmt::format("x={};y={}", num(grid(0, c)), num(grid(1, c))));
  }
  for (std::size_t k = 0; k < kNamed.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(n_grid + k);
    probes(0, c) = kNamed[k].x;
    probes(1, c) = kNamed[k].y;
    ids.emplace_back(kNamed[k].id);
    desc.push_back(fmt::format("x={};y={}", num(kNamed[k].x), num(kNamed[k].y)));
  }

  // The 2x2 block of grid points at each corner.
  std::vector<std::size_t> corners;
  if (res >= 2) {
    for (std::size_t iy : {std::size_t{0}, std::size_t{1}, res - 2, res - 1}) {
      for (std::size_t ix : {std::size_t{0}, std::size_t{1}, res - 2, res - 1}) corners.push_back(iy * res + ix);
    }
  }

  UncertaintyReport report = make_report(cfg);
  for (Method m : cfg.methods()) {
    const auto model = fit_model(m, train, cfg, "toy2d", options);
    for (const auto& [k, v] : model->hashes) report.model_hashes[k] = v;
    progress(options, fmt::format("evaluating {} on {} probes", to_string(m), probes.cols()));
    const MethodOutput out = model->predict(probes);
    add_rows(report, m, out, ids, desc);

    const std::string name(to_string(m));
    report.add_summary(name + ".train_accuracy", point_accuracy(*model, train));
    if (!corners.empty()) {
      double sum = 0.0;
      for (std::size_t k : corners) sum += out.entropy(static_cast<Eigen::Index>(k));
      report.add_summary(name + ".corner16_mean_entropy", sum / static_cast<double>(corners.size()));
    }
    double far = 0.0;
    for (std::size_t k = 0; k < kFarCount; ++k) far += out.entropy(static_cast<Eigen::Index>(n_grid + k));
    report.add_summary(name + ".far_mean_entropy", far / static_cast<double>(kFarCount));
    report.add_summary(name + ".origin_entropy", out.entropy(static_cast<Eigen::Index>(n_grid + kFarCount)));
  }
  return report;
}

}  // namespace ue::harness
