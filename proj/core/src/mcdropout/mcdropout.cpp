#include "ue/mcdropout/mcdropout.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/numerics/parallel.hpp"

namespace ue::mcdropout {

namespace {

constexpr Eigen::Index kChunk = 256;

double column_entropy(const Eigen::Ref<const Vector>& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  }
  return h;
}

}  // namespace

void MCDropoutConfig::validate() const {
  if (n_samples < 1) throw PreconditionError("MC dropout needs at least one pass");
  if (!(dropout_rate > 0.0 && dropout_rate < 1.0)) {
    throw PreconditionError(fmt::format("MC dropout rate {} not in (0, 1)", dropout_rate));
  }
}

ProbVector mc_average(const nnet::MLPParams& p, const Eigen::Ref<const Vector>& x, const MCDropoutConfig& cfg) {
  const DenseMatrix probe = x;
  const BatchResult r = mc_average_batch(p, probe, cfg);
  const Vector col = r.mean_probs.col(0);
  return ProbVector(std::vector<double>(col.data(), col.data() + col.size()));
}

double mc_entropy(const nnet::MLPParams& p, const Eigen::Ref<const Vector>& x, const MCDropoutConfig& cfg) {
  return entropy(mc_average(p, x, cfg));
}

BatchResult mc_average_batch(const nnet::MLPParams& p, const DenseMatrix& probes, const MCDropoutConfig& cfg) {
  cfg.validate();
  if (probes.rows() != static_cast<Eigen::Index>(p.input_dim())) {
    throw DimensionMismatch(fmt::format("MC dropout: probe dim {} but network expects {}", probes.rows(), p.input_dim()));
  }
  const Eigen::Index m = probes.cols();
  const auto c = static_cast<Eigen::Index>(p.output_dim());
  BatchResult r;
  r.mean_probs = DenseMatrix::Zero(c, m);
  r.mean_pass_entropy = Vector::Zero(m);
  const auto n_chunks = static_cast<std::size_t>((m + kChunk - 1) / kChunk);
  const std::size_t threads = evaluation_threads();
  const RngStream root(cfg.seed);

  for (std::size_t pass = 0; pass < cfg.n_samples; ++pass) {
    RngStream rng = root.split(pass);
    const nnet::DropoutMasks masks = nnet::sample_masks(p, cfg.dropout_rate, 1, rng);
    parallel_chunks(n_chunks, threads, [&](std::size_t k) {
      const Eigen::Index begin = static_cast<Eigen::Index>(k) * kChunk;
      const Eigen::Index len = std::min(kChunk, m - begin);
      const DenseMatrix probs = softmax_columns(nnet::forward_batch(p, probes.middleCols(begin, len), &masks));
      r.mean_probs.middleCols(begin, len) += probs;
      for (Eigen::Index j = 0; j < len; ++j) r.mean_pass_entropy(begin + j) += column_entropy(probs.col(j));
    });
  }
  const double inv = 1.0 / static_cast<double>(cfg.n_samples);
  r.mean_probs *= inv;
  r.mean_pass_entropy *= inv;
  r.predictive_entropy.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) r.predictive_entropy(j) = column_entropy(r.mean_probs.col(j));
  return r;
}

std::map<int, double> per_class_mean_entropy(const nnet::MLPParams& p, const Dataset& d, const MCDropoutConfig& cfg,
                                             std::span<const int> classes) {
  if (classes.empty()) throw PreconditionError("per_class_mean_entropy: no classes requested");
  for (int cls : classes) {
    if (d.indices_of(cls).empty()) throw EmptyResult(fmt::format("no samples of class {}", cls));
  }
  const BatchResult r = mc_average_batch(p, d.features(), cfg);
  std::map<int, double> sums;
  std::map<int, std::size_t> counts;
  for (int cls : classes) {
    sums[cls] = 0.0;
    counts[cls] = 0;
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto it = sums.find(d.label(i));
    if (it == sums.end()) continue;
    it->second += r.predictive_entropy(static_cast<Eigen::Index>(i));
    ++counts[d.label(i)];
  }
  for (auto& [cls, s] : sums) s /= static_cast<double>(counts[cls]);
  return sums;
}

std::map<int, double> per_class_mean_entropy(const nnet::MLPParams& p, const Dataset& d, const MCDropoutConfig& cfg) {
  if (d.size() == 0) throw EmptyResult("per_class_mean_entropy: empty dataset");
  const std::vector<int> classes = d.classes();
  return per_class_mean_entropy(p, d, cfg, classes);
}

}  // namespace ue::mcdropout
