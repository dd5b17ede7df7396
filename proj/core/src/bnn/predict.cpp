#include "ue/bnn/predict.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/numerics/parallel.hpp"

namespace ue::bnn {

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

EnsemblePrediction ensemble_predict(std::span<const std::size_t> layer_sizes, std::size_t n_members,
                                    const MemberFn& member, const DenseMatrix& probes) {
  if (n_members < 1) throw PreconditionError("posterior prediction needs at least one parameter draw");
  const std::vector<std::size_t> sizes(layer_sizes.begin(), layer_sizes.end());
  if (sizes.size() < 2) throw PreconditionError("posterior prediction needs an architecture");
  if (probes.rows() != static_cast<Eigen::Index>(sizes.front())) {
    throw DimensionMismatch(fmt::format("probe dim {} but network expects {}", probes.rows(), sizes.front()));
  }
  const Eigen::Index m = probes.cols();
  const auto c = static_cast<Eigen::Index>(sizes.back());
  EnsemblePrediction r;
  r.mean_probs = DenseMatrix::Zero(c, m);
  r.mean_member_entropy = Vector::Zero(m);
  const auto n_chunks = static_cast<std::size_t>((m + kChunk - 1) / kChunk);
  const std::size_t threads = evaluation_threads();

  for (std::size_t k = 0; k < n_members; ++k) {
    const nnet::MLPParams net(sizes, member(k));
    parallel_chunks(n_chunks, threads, [&](std::size_t chunk) {
      const Eigen::Index begin = static_cast<Eigen::Index>(chunk) * kChunk;
      const Eigen::Index len = std::min(kChunk, m - begin);
      const DenseMatrix probs = softmax_columns(nnet::forward_batch(net, probes.middleCols(begin, len)));
      r.mean_probs.middleCols(begin, len) += probs;
      for (Eigen::Index j = 0; j < len; ++j) r.mean_member_entropy(begin + j) += column_entropy(probs.col(j));
    });
  }
  const double inv = 1.0 / static_cast<double>(n_members);
  r.mean_probs *= inv;
  r.mean_member_entropy *= inv;
  r.predictive_entropy.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) r.predictive_entropy(j) = column_entropy(r.mean_probs.col(j));
  return r;
}

ProbVector posterior_predict(std::span<const std::size_t> layer_sizes, std::span<const Vector> samples,
                             const Eigen::Ref<const Vector>& x) {
  if (samples.empty()) throw PreconditionError("posterior_predict needs at least one sample");
  const DenseMatrix probe = x;
  const EnsemblePrediction r =
      ensemble_predict(layer_sizes, samples.size(), [&](std::size_t k) { return samples[k]; }, probe);
  const Vector col = r.mean_probs.col(0);
  return ProbVector(std::vector<double>(col.data(), col.data() + col.size()));
}

}  // namespace ue::bnn
