#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "models.hpp"
#include "ue/gp/laplace.hpp"
#include "ue/harness/experiment.hpp"
#include "ue/numerics/special.hpp"

namespace ue::harness {

namespace {

// Far-field targets, in the same units as the predicted probability.
constexpr double kFarDeviation = 1e-6;
constexpr double kVanishingKernel = 1e-8;
constexpr double kFarDistanceScales = 10.0;
constexpr double kMinClass1Probability = 0.7;
// Rounding allowance when comparing successive deviations along a ray.
constexpr double kMonotoneSlack = 1e-15;

struct Violation {
  double epsilon;
  double deviation;
  std::string what;
};

}  // namespace

UncertaintyReport run_theorem_check(const ExperimentConfig& cfg) {
  using namespace detail;
  cfg.validate();
  const Dataset train = make_toy2d(cfg.get_size("toy.n_per_class"), cfg.seed());
  const auto grid = gp::length_scale_grid(static_cast<int>(cfg.get_int("gp.length_scale_min_exp")),
                                          static_cast<int>(cfg.get_int("gp.length_scale_max_exp")),
                                          cfg.get_double("gp.signal_variance"));
  gp::LaplaceOptions lo;
  lo.link = gp::parse_link(cfg.get_string("gp.link"));
  lo.tol = cfg.get_double("gp.tol");
  lo.max_iter = cfg.get_size("gp.max_iter");
  const gp::HyperparamFit fit = gp::fit_hyperparams(train, grid, lo);
  const gp::LaplaceGPState& s = fit.state;
  const double ell = fit.params.length_scale;
  const auto n = static_cast<double>(s.size());
  const double c = s.grad.cwiseAbs().maxCoeff() + 1.0;

  const std::size_t rays = cfg.get_size("theorem.rays");
  const std::size_t steps = cfg.get_size("theorem.steps");
  const double max_distance = cfg.get_double("theorem.max_distance") * ell;
  const std::vector<double> epsilons = cfg.get_doubles("theorem.epsilons");
  if (rays < 1 || steps < 2 || !(max_distance > 0.0)) {
    throw PreconditionError("theorem-check needs rays >= 1, steps >= 2 and a positive max_distance");
  }

  // Each ray leaves the origin along a unit direction u and starts where the
  // projection of every training point onto u has been passed, so the distance
  // to every training point grows monotonically along the ray.
  const auto n_probes = static_cast<Eigen::Index>(rays * steps + 1);
  DenseMatrix probes(2, n_probes);
  std::vector<std::string> ids;
  std::vector<std::string> desc;
  for (std::size_t r = 0; r < rays; ++r) {
    const double angle = 2.0 * kPi * (static_cast<double>(r) + 0.5) / static_cast<double>(rays);
    Vector u(2);
    u << std::cos(angle), std::sin(angle);
    const double start = (u.transpose() * s.inputs).maxCoeff();
    for (std::size_t k = 0; k < steps; ++k) {
      const double along = start + max_distance * static_cast<double>(k) / static_cast<double>(steps - 1);
      const auto col = static_cast<Eigen::Index>(r * steps + k);
      probes.col(col) = along * u;
      ids.push_back(fmt::format("ray{}_step{:02}", r, k));
    }
  }
  // A class-1 training input.
  const std::size_t class1 = train.indices_of(1).front();
  probes.col(n_probes - 1) = train.sample(class1);
  ids.emplace_back("train_class1");

  const gp::BatchPrediction pred = gp::predict_batch(s, probes);
  Vector nearest(n_probes);
  for (Eigen::Index j = 0; j < n_probes; ++j) {
    nearest(j) = (s.inputs.colwise() - probes.col(j)).colwise().norm().minCoeff();
  }
  for (Eigen::Index j = 0; j < n_probes; ++j) {
    desc.push_back(fmt::format("x={};y={};nearest={};kmax={}", num(probes(0, j)), num(probes(1, j)), num(nearest(j)),
                               num(pred.k_max(j))));
  }

  MethodOutput out;
  out.p_class1 = pred.p_class1;
  out.entropy.resize(n_probes);
  for (Eigen::Index j = 0; j < n_probes; ++j) out.entropy(j) = binary_entropy(pred.p_class1(j));

  UncertaintyReport report = make_report(cfg);
  add_rows(report, Method::kGp, out, ids, desc);
  report.add_summary("gp.length_scale", ell);
  report.add_summary("gp.log_marginal", s.log_marginal);
  report.add_summary("gp.bound_constant", c);
  report.add_summary("gp.train_size", n);

  std::vector<Violation> violations;
  const Eigen::Index n_ray = n_probes - 1;
  auto deviation = [&](Eigen::Index j) { return std::abs(pred.p_class1(j) - 0.5); };

  for (double eps : epsilons) {
    double worst = 0.0;
    std::size_t count = 0;
    for (Eigen::Index j = 0; j < n_ray; ++j) {
      if (pred.k_max(j) >= eps) continue;
      ++count;
      worst = std::max(worst, deviation(j));
      if (deviation(j) >= c * eps * n) {
        violations.push_back({eps, deviation(j), fmt::format("{} exceeds c*eps*n = {}", ids[j], c * eps * n)});
      }
    }
    report.add_summary(fmt::format("eps={}.probes", num(eps)), static_cast<double>(count));
    report.add_summary(fmt::format("eps={}.max_deviation", num(eps)), worst);
    report.add_summary(fmt::format("eps={}.bound", num(eps)), c * eps * n);
  }

  double worst_vanishing = 0.0;
  double worst_entropy_gap = 0.0;
  for (Eigen::Index j = 0; j < n_ray; ++j) {
    if (pred.k_max(j) >= kVanishingKernel) continue;
    worst_vanishing = std::max(worst_vanishing, deviation(j));
    const double gap = std::abs(out.entropy(j) - kLn2);
    worst_entropy_gap = std::max(worst_entropy_gap, gap);
    if (deviation(j) >= kFarDeviation || gap >= kFarDeviation) {
      violations.push_back({kVanishingKernel, deviation(j), fmt::format("{}: entropy gap {}", ids[j], gap)});
    }
  }
  report.add_summary("vanishing_kernel.max_deviation", worst_vanishing);
  report.add_summary("vanishing_kernel.max_entropy_gap", worst_entropy_gap);

  double worst_far = 0.0;
  for (Eigen::Index j = 0; j < n_ray; ++j) {
    if (nearest(j) < kFarDistanceScales * ell) continue;
    worst_far = std::max(worst_far, deviation(j));
    if (deviation(j) >= kFarDeviation) {
      violations.push_back({pred.k_max(j), deviation(j), fmt::format("{} at >= 10 length scales", ids[j])});
    }
  }
  report.add_summary("far10.max_deviation", worst_far);

  std::size_t monotone_breaks = 0;
  for (std::size_t r = 0; r < rays; ++r) {
    for (std::size_t k = 1; k < steps; ++k) {
      const auto prev = static_cast<Eigen::Index>(r * steps + k - 1);
      const auto cur = prev + 1;
      if (deviation(cur) > deviation(prev) + kMonotoneSlack) {
        ++monotone_breaks;
        violations.push_back({pred.k_max(cur), deviation(cur),
                              fmt::format("{} deviates more than the previous probe on its ray", ids[cur])});
      }
    }
  }
  report.add_summary("ray.monotone_breaks", static_cast<double>(monotone_breaks));

  const double p_train = pred.p_class1(n_probes - 1);
  report.add_summary("train_class1.p_class1", p_train);
  if (p_train < kMinClass1Probability) {
    violations.push_back({pred.k_max(n_probes - 1), deviation(n_probes - 1),
                          fmt::format("class-1 training input predicted at {}", p_train)});
  }
  report.add_summary("violations", static_cast<double>(violations.size()));

  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw TheoremViolation(fmt::format("far-field check failed: epsilon {}, deviation {} ({}); {} violation(s)",
                                       v.epsilon, v.deviation, v.what, violations.size()),
                           std::make_shared<const UncertaintyReport>(std::move(report)));
  }
  return report;
}

}  // namespace ue::harness
