#include "ue/bnn/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ue/bnn/log_posterior.hpp"
#include "ue/error.hpp"
#include "ue/nnet/adam.hpp"
#include "ue/nnet/train.hpp"
#include "ue/numerics/special.hpp"

namespace ue::bnn {

Vector softplus_stddev(const Vector& rho) {
  return rho.unaryExpr([](double r) { return softplus(std::max(r, kMinRho)); });
}

void MeanFieldPosterior::validate() const {
  if (mu.size() != rho.size()) throw DimensionMismatch("mean-field mu and rho differ in length");
  if (!layer_sizes.empty() && static_cast<std::size_t>(mu.size()) != nnet::parameter_count(layer_sizes)) {
    throw DimensionMismatch("mean-field posterior does not match its architecture");
  }
  if (!mu.allFinite() || !rho.allFinite()) throw NonFinite("mean-field posterior has non-finite entries");
}

Vector MeanFieldPosterior::stddev() const { return softplus_stddev(rho); }

nnet::MLPParams MeanFieldPosterior::mean_network() const { return nnet::MLPParams(layer_sizes, mu); }

Vector MeanFieldPosterior::sample(RngStream& rng) const {
  const Vector sigma = stddev();
  Vector w(mu.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = mu(i) + sigma(i) * rng.normal();
  return w;
}

double kl_gaussian(const Vector& mu, const Vector& sigma, double prior_precision) {
  if (!(prior_precision > 0.0)) throw PreconditionError("prior precision must be positive");
  if (mu.size() != sigma.size()) throw DimensionMismatch("kl_gaussian: mu and sigma differ in length");
  const double log_sp = -0.5 * std::log(prior_precision);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double s = sigma(i);
    if (!(s > 0.0)) throw PreconditionError("kl_gaussian: standard deviations must be positive");
    kl += log_sp - std::log(s) + 0.5 * prior_precision * (s * s + mu(i) * mu(i)) - 0.5;
  }
  return std::max(kl, 0.0);
}

double kl_gaussian(const MeanFieldPosterior& q, double prior_precision) {
  return kl_gaussian(q.mu, q.stddev(), prior_precision);
}

ElboEstimate elbo_estimate(const Vector& mu, const Vector& rho, const LogLikelihoodFn& log_lik, std::size_t n_mc,
                           double kl_weight, double prior_precision, RngStream& rng) {
  if (n_mc < 1) throw PreconditionError("elbo_estimate needs n_mc >= 1");
  if (mu.size() != rho.size()) throw DimensionMismatch("elbo_estimate: mu and rho differ in length");
  const Vector sigma = softplus_stddev(rho);
  double mean = 0.0;
  double m2 = 0.0;
  Vector w(mu.size());
  for (std::size_t k = 0; k < n_mc; ++k) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = mu(i) + sigma(i) * rng.normal();
    const double v = log_lik(w);
    if (!std::isfinite(v)) throw NonFinite("elbo_estimate: non-finite log-likelihood");
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  ElboEstimate e;
  e.expected_log_lik = mean;
  e.kl = kl_gaussian(mu, sigma, prior_precision);
  e.value = mean - kl_weight * e.kl;
  e.std_error = n_mc > 1 ? std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc)) : 0.0;
  return e;
}

ElboEstimate elbo_estimate(const MeanFieldPosterior& q, const Dataset& d, std::size_t n_mc, double kl_weight,
                           double prior_precision, RngStream& rng) {
  q.validate();
  Vector scratch(q.mu.size());
  const LogLikelihoodFn ll = [&](const Vector& w) {
    return log_likelihood_and_grad(nnet::MLPParams(q.layer_sizes, w), d, {}, scratch);
  };
  return elbo_estimate(q.mu, q.rho, ll, n_mc, kl_weight, prior_precision, rng);
}

void MFVIConfig::validate() const {
  if (epochs < 1) throw PreconditionError("MFVI epochs must be at least 1");
  if (batch_size < 1) throw PreconditionError("MFVI batch_size must be at least 1");
  if (!(kl_weight >= 0.0)) throw PreconditionError("kl_weight must be non-negative");
  if (!(prior_precision > 0.0)) throw PreconditionError("prior precision must be positive");
  if (!(learning_rate > 0.0)) throw PreconditionError("learning_rate must be positive");
  if (!std::isfinite(rho_init)) throw PreconditionError("rho_init must be finite");
}

MeanFieldFit fit_mean_field(Vector mu_init, std::size_t n_data, const BatchLogLikFn& log_lik, const MFVIConfig& cfg) {
  cfg.validate();
  if (n_data == 0) throw PreconditionError("fit_mean_field: no data");
  MeanFieldFit fit;
  fit.mu = std::move(mu_init);
  fit.rho = Vector::Constant(fit.mu.size(), cfg.rho_init);
  const Eigen::Index p = fit.mu.size();
  const double n = static_cast<double>(n_data);
  const double prec = cfg.prior_precision;

  const RngStream base(cfg.seed);
  RngStream shuffle_rng = base.split(0);
  RngStream noise_rng = base.split(1);
  nnet::Adam adam_mu(static_cast<std::size_t>(p), nnet::AdamConfig{cfg.learning_rate});
  nnet::Adam adam_rho(static_cast<std::size_t>(p), nnet::AdamConfig{cfg.learning_rate});

  std::vector<std::size_t> order(n_data);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector eps(p), sigma(p), omega(p), g_ll(p), g_mu(p), g_rho(p);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n_data; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n_data; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n_data - start);
      const std::span<const std::size_t> batch(order.data() + start, len);
      sigma = softplus_stddev(fit.rho);
      for (Eigen::Index i = 0; i < p; ++i) eps(i) = noise_rng.normal();
      omega = fit.mu + sigma.cwiseProduct(eps);
      const double ll = log_lik(omega, batch, g_ll);
      const double kl = kl_gaussian(fit.mu, sigma, prec);
      const double b = static_cast<double>(len);
      const double loss = -((n / b) * ll - cfg.kl_weight * kl) / n;
      if (!std::isfinite(loss) || !g_ll.allFinite()) {
        throw Divergence(fmt::format("MFVI diverged in epoch {} (loss {})", epoch, loss));
      }
      // d loss / d omega, then chain through omega = mu + softplus(rho) * eps
      const double kw = cfg.kl_weight / n;
      for (Eigen::Index i = 0; i < p; ++i) {
        const double g_w = -g_ll(i) / b;
        const double s = sigma(i);
        g_mu(i) = g_w + kw * prec * fit.mu(i);
        g_rho(i) = (g_w * eps(i) + kw * (-1.0 / s + prec * s)) * sigmoid(fit.rho(i));
      }
      adam_mu.step(fit.mu, g_mu);
      adam_rho.step(fit.rho, g_rho);
      loss_sum += loss;
      ++batches;
    }
    fit.epoch_losses.push_back(loss_sum / static_cast<double>(batches));
  }
  return fit;
}

MFVIResult mfvi_train(std::span<const std::size_t> arch, const Dataset& d, const MFVIConfig& cfg) {
  if (!d.is_binary()) throw PreconditionError("mfvi_train needs labels in {0, 1}");
  if (d.size() == 0) throw PreconditionError("mfvi_train: empty dataset");
  nnet::MLPParams init = nnet::mlp_init(arch, derive_seed(cfg.seed, 0));
  if (d.dim() != static_cast<Eigen::Index>(init.input_dim()) || init.output_dim() != 2) {
    throw DimensionMismatch("mfvi_train: architecture does not fit the dataset");
  }
  const std::vector<std::size_t> sizes = init.layer_sizes();
  const BatchLogLikFn ll = [&](const Vector& w, std::span<const std::size_t> batch, Eigen::Ref<Vector> grad) {
    return log_likelihood_and_grad(nnet::MLPParams(sizes, w), d, batch, grad);
  };
  MFVIConfig inner = cfg;
  inner.seed = derive_seed(cfg.seed, 1);
  MeanFieldFit fit = fit_mean_field(std::move(init.flat()), d.size(), ll, inner);

  MFVIResult r;
  r.posterior = MeanFieldPosterior{sizes, std::move(fit.mu), std::move(fit.rho)};
  r.epoch_losses = std::move(fit.epoch_losses);
  r.train_accuracy = nnet::accuracy(r.posterior.mean_network(), d);
  return r;
}

}  // namespace ue::bnn
