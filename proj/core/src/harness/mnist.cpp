#include <map>

#include <fmt/format.h>

#include "models.hpp"
#include "ue/datasets/probes.hpp"
#include "ue/harness/experiment.hpp"
#include "ue/numerics/rng.hpp"

namespace ue::harness {

UncertaintyReport run_mnist_interp(const ExperimentConfig& cfg, const RunOptions& options) {
  using namespace detail;
  cfg.validate();
  progress(options, "loading MNIST");
  const MnistData data = load_mnist(cfg);
  const std::vector<double> t_grid =
      linear_grid(cfg.get_double("interp.t_min"), cfg.get_double("interp.t_max"), cfg.get_size("interp.t_points"));
  const std::vector<SweepProbe> sweep =
      probe_sweep(data.test01, cfg.get_size("interp.pairs"), t_grid, derive_seed(cfg.seed(), kProbePairs));

  DenseMatrix probes(data.test01.dim(), static_cast<Eigen::Index>(sweep.size()));
  std::vector<std::string> ids;
  std::vector<std::string> desc;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const SweepProbe& s = sweep[i];
    probes.col(static_cast<Eigen::Index>(i)) = s.features;
    const std::size_t t_index = i % t_grid.size();
    ids.push_back(fmt::format("pair{:03}_t{:02}", s.pair_id, t_index));
    desc.push_back(fmt::format("pair={};t={}", s.pair_id, num(s.t)));
  }

  UncertaintyReport report = make_report(cfg);
  for (Method m : cfg.methods()) {
    const auto model = fit_model(m, data.train01, cfg, "mnist", options);
    for (const auto& [k, v] : model->hashes) report.model_hashes[k] = v;
    progress(options, fmt::format("evaluating {} on {} probes", to_string(m), probes.cols()));
    const MethodOutput out = model->predict(probes);
    add_rows(report, m, out, ids, desc);

    const std::string name(to_string(m));
    report.add_summary(name + ".train_accuracy", point_accuracy(*model, data.train01));
    report.add_summary(name + ".test_accuracy", point_accuracy(*model, data.test01));
    std::vector<double> sums(t_grid.size(), 0.0);
    std::vector<std::size_t> counts(t_grid.size(), 0);
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      sums[i % t_grid.size()] += out.entropy(static_cast<Eigen::Index>(i));
      ++counts[i % t_grid.size()];
    }
    std::size_t best = 0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      sums[k] /= static_cast<double>(counts[k]);
      report.add_summary(fmt::format("{}.mean_entropy.t={}", name, num(t_grid[k])), sums[k]);
      if (sums[k] > sums[best]) best = k;
    }
    report.add_summary(name + ".argmax_t", t_grid[best]);
  }
  return report;
}

UncertaintyReport run_digit_table(const ExperimentConfig& cfg, const RunOptions& options) {
  using namespace detail;
  cfg.validate();
  progress(options, "loading MNIST");
  const MnistData data = load_mnist(cfg);
  const Dataset& test = data.test_all;

  std::vector<std::string> ids;
  std::vector<std::string> desc;
  for (std::size_t i = 0; i < test.size(); ++i) {
    ids.push_back(fmt::format("test{:05}", i));
    desc.push_back(fmt::format("class={}", test.label(i)));
  }

  UncertaintyReport report = make_report(cfg);
  const auto model = fit_model(Method::kMcDropout, data.train01, cfg, "mnist", options);
  for (const auto& [k, v] : model->hashes) report.model_hashes[k] = v;
  progress(options, fmt::format("evaluating mcdropout on {} test digits", test.size()));
  const MethodOutput out = model->predict(test.features());
  add_rows(report, Method::kMcDropout, out, ids, desc);

  report.add_summary("mcdropout.train_accuracy", point_accuracy(*model, data.train01));
  report.add_summary("mcdropout.test_accuracy", point_accuracy(*model, data.test01));
  std::map<int, double> sums;
  std::map<int, double> pass_sums;
  std::map<int, std::size_t> counts;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    sums[test.label(i)] += out.entropy(j);
    pass_sums[test.label(i)] += (*out.mean_member_entropy)(j);
    ++counts[test.label(i)];
  }
  for (const auto& [digit, count] : counts) {
    const double n = static_cast<double>(count);
    report.add_summary(fmt::format("mcdropout.digit={}.mean_entropy", digit), sums[digit] / n);
    report.add_summary(fmt::format("mcdropout.digit={}.mean_pass_entropy", digit), pass_sums[digit] / n);
    report.add_summary(fmt::format("mcdropout.digit={}.count", digit), n);
  }
  return report;
}

}  // namespace ue::harness
