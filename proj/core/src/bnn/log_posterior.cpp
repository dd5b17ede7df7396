#include "ue/bnn/log_posterior.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue::bnn {

namespace {

constexpr std::size_t kChunk = 512;

}  // namespace

double log_likelihood_and_grad(const nnet::MLPParams& omega, const Dataset& d, std::span<const std::size_t> indices,
                               Eigen::Ref<Vector> grad) {
  if (d.dim() != static_cast<Eigen::Index>(omega.input_dim())) {
    throw DimensionMismatch(fmt::format("dataset dim {} but network expects {}", d.dim(), omega.input_dim()));
  }
  grad.setZero();
  const std::size_t n = indices.empty() ? d.size() : indices.size();
  double loss = 0.0;
  DenseMatrix x;
  std::vector<int> y;
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t len = std::min(kChunk, n - start);
    x.resize(d.dim(), static_cast<Eigen::Index>(len));
    y.resize(len);
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t i = indices.empty() ? start + j : indices[start + j];
      x.col(static_cast<Eigen::Index>(j)) = d.sample(i);
      y[j] = d.label(i);
    }
    loss += nnet::accumulate_gradient(omega, x, y, nullptr, grad);
  }
  grad = -grad;
  return -loss;
}

LogPosterior log_posterior_and_grad(const nnet::MLPParams& omega, const Dataset& d, double prior_precision) {
  if (!(prior_precision > 0.0)) throw PreconditionError("prior precision must be positive");
  if (d.size() == 0) throw PreconditionError("log posterior over an empty dataset");
  LogPosterior r;
  r.gradient.resize(static_cast<Eigen::Index>(omega.n_params()));
  r.log_likelihood = log_likelihood_and_grad(omega, d, {}, r.gradient);
  r.log_prior = -0.5 * prior_precision * omega.flat().squaredNorm();
  r.gradient -= prior_precision * omega.flat();
  r.value = r.log_likelihood + r.log_prior;
  if (!std::isfinite(r.value) || !r.gradient.allFinite()) {
    throw NonFinite(fmt::format("log posterior is not finite ({})", r.value));
  }
  return r;
}

}  // namespace ue::bnn
