#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ue/datasets/dataset.hpp"
#include "ue/nnet/mlp.hpp"
#include "ue/numerics/rng.hpp"

namespace ue::bnn {

// Lower clamp on rho before the softplus, so sigma stays representable and
// log sigma finite.
inline constexpr double kMinRho = -40.0;

// Fully factorized Gaussian over the flat MLP parameter vector; the standard
// deviation is softplus(rho).
struct MeanFieldPosterior {
  std::vector<std::size_t> layer_sizes;
  Vector mu;
  Vector rho;

  void validate() const;
  Vector stddev() const;
  nnet::MLPParams mean_network() const;
  // mu + sigma * eps with eps ~ N(0, I) drawn in index order.
  Vector sample(RngStream& rng) const;
};

Vector softplus_stddev(const Vector& rho);

// KL(N(mu, diag sigma^2) || N(0, I / precision)).
double kl_gaussian(const Vector& mu, const Vector& sigma, double prior_precision);
double kl_gaussian(const MeanFieldPosterior& q, double prior_precision);

// Full-data log-likelihood log p(D | omega).
using LogLikelihoodFn = std::function<double(const Vector& omega)>;

struct ElboEstimate {
  double value = 0.0;             // expected_log_lik - kl_weight * kl
  double expected_log_lik = 0.0;  // Monte Carlo mean
  double kl = 0.0;
  double std_error = 0.0;  // standard error of the Monte Carlo mean
};

ElboEstimate elbo_estimate(const Vector& mu, const Vector& rho, const LogLikelihoodFn& log_lik, std::size_t n_mc,
                           double kl_weight, double prior_precision, RngStream& rng);
ElboEstimate elbo_estimate(const MeanFieldPosterior& q, const Dataset& d, std::size_t n_mc, double kl_weight,
                           double prior_precision, RngStream& rng);

struct MFVIConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double kl_weight = 0.1;
  double prior_precision = 100.0;
  double learning_rate = 1e-3;
  double rho_init = -5.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Summed log-likelihood of a minibatch and its gradient (written to grad).
using BatchLogLikFn =
    std::function<double(const Vector& omega, std::span<const std::size_t> batch, Eigen::Ref<Vector> grad)>;

struct MeanFieldFit {
  Vector mu;
  Vector rho;
  std::vector<double> epoch_losses;  // per-sample negative ELBO, averaged over the epoch
};

// Reparameterized stochastic ELBO ascent with Adam on (mu, rho), one draw per
// step. Each step minimizes -[(N/B) log p(batch) - kl_weight KL] / N.
MeanFieldFit fit_mean_field(Vector mu_init, std::size_t n_data, const BatchLogLikFn& log_lik, const MFVIConfig& cfg);

struct MFVIResult {
  MeanFieldPosterior posterior;
  std::vector<double> epoch_losses;
  double train_accuracy = 0.0;  // of the posterior-mean network
};

// Bayes by backprop for an MLP classifier; mu starts from Glorot init.
MFVIResult mfvi_train(std::span<const std::size_t> arch, const Dataset& d, const MFVIConfig& cfg);

}  // namespace ue::bnn
