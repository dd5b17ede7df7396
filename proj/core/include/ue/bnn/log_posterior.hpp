#pragma once

#include <span>

#include "ue/datasets/dataset.hpp"
#include "ue/nnet/mlp.hpp"

namespace ue::bnn {

struct LogPosterior {
  double value = 0.0;           // log_likelihood + log_prior
  double log_likelihood = 0.0;  // -sum of cross-entropies over the dataset
  double log_prior = 0.0;       // -(precision / 2) |omega|^2, constant dropped
  Vector gradient;              // d value / d omega
};

// Unnormalized log posterior of an MLP classifier under an isotropic Gaussian
// prior. Throws NonFinite if the value or gradient overflows.
LogPosterior log_posterior_and_grad(const nnet::MLPParams& omega, const Dataset& d, double prior_precision);

// Summed log-likelihood of the listed samples; writes its gradient into grad
// (overwritten). An empty index list means every sample.
double log_likelihood_and_grad(const nnet::MLPParams& omega, const Dataset& d, std::span<const std::size_t> indices,
                               Eigen::Ref<Vector> grad);

}  // namespace ue::bnn
