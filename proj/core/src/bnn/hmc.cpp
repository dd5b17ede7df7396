#include "ue/bnn/hmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ue/bnn/log_posterior.hpp"
#include "ue/error.hpp"
#include "ue/nnet/adam.hpp"
#include "ue/numerics/rng.hpp"

namespace ue::bnn {

namespace {

constexpr double kMinBurnInAcceptance = 0.01;

struct Trajectory {
  Vector position;
  Vector momentum;
  Vector grad;
  double potential = 0.0;
};

// Leapfrog from a state whose gradient is already known.
Trajectory integrate(Vector position, Vector momentum, Vector grad, const PotentialFn& potential, double step_size,
                     std::size_t steps) {
  Trajectory t;
  momentum -= 0.5 * step_size * grad;
  for (std::size_t i = 0; i < steps; ++i) {
    position += step_size * momentum;
    t.potential = potential(position, grad);
    if (!std::isfinite(t.potential) || !grad.allFinite() || !position.allFinite()) {
      throw NonFinite(fmt::format("leapfrog trajectory diverged at step {}", i + 1));
    }
    if (i + 1 < steps) momentum -= step_size * grad;
  }
  momentum -= 0.5 * step_size * grad;
  if (!momentum.allFinite()) throw NonFinite("leapfrog momentum became non-finite");
  t.position = std::move(position);
  t.momentum = std::move(momentum);
  t.grad = std::move(grad);
  return t;
}

void check_step(double step_size, std::size_t steps) {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw PreconditionError("leapfrog step size must be positive");
  if (steps < 1) throw PreconditionError("leapfrog needs at least one step");
}

}  // namespace

PhasePoint leapfrog(Vector position, Vector momentum, const PotentialFn& potential, double step_size,
                    std::size_t steps) {
  check_step(step_size, steps);
  if (position.size() != momentum.size()) throw DimensionMismatch("leapfrog: position and momentum differ in length");
  Vector grad(position.size());
  const double u0 = potential(position, grad);
  if (!std::isfinite(u0) || !grad.allFinite()) throw NonFinite("leapfrog: potential not finite at the start");
  Trajectory t = integrate(std::move(position), std::move(momentum), std::move(grad), potential, step_size, steps);
  return {std::move(t.position), std::move(t.momentum)};
}

void HMCConfig::validate() const {
  check_step(step_size, trajectory_length);
  if (n_samples < 1) throw PreconditionError("HMC needs at least one retained sample");
  if (thin < 1) throw PreconditionError("HMC thinning must be at least 1");
  if (!(prior_precision > 0.0)) throw PreconditionError("prior precision must be positive");
}

PosteriorChain hmc_sample(const PotentialFn& potential, Vector initial, const HMCConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.seed);
  Vector x = std::move(initial);
  Vector g(x.size());
  double u = potential(x, g);
  if (!std::isfinite(u) || !g.allFinite()) throw NonFinite("HMC: potential not finite at the initial point");

  PosteriorChain chain;
  const std::size_t total = cfg.burn_in + cfg.n_samples * cfg.thin;
  chain.energies.reserve(total);
  chain.accepted.reserve(total);
  chain.samples.reserve(cfg.n_samples);
  std::size_t burn_accepts = 0;
  std::size_t accepts = 0;
  Vector p(x.size());

  for (std::size_t it = 0; it < total; ++it) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = rng.normal();
    const double h_old = u + 0.5 * p.squaredNorm();
    bool ok = true;
    Trajectory t;
    try {
      t = integrate(x, p, g, potential, cfg.step_size, cfg.trajectory_length);
    } catch (const NonFinite&) {
      ok = false;
    }
    const double h_new = ok ? t.potential + 0.5 * t.momentum.squaredNorm() : 0.0;
    const double log_u = std::log(rng.uniform_open());
    const bool accept = ok && std::isfinite(h_new) && log_u < h_old - h_new;
    if (accept) {
      x = std::move(t.position);
      g = std::move(t.grad);
      u = t.potential;
    }
    chain.accepted.push_back(accept ? 1 : 0);
    chain.energies.push_back(accept ? h_new : h_old);

    if (it < cfg.burn_in) {
      burn_accepts += accept ? 1 : 0;
      if (it + 1 == cfg.burn_in) {
        chain.burn_in_accept_rate = static_cast<double>(burn_accepts) / static_cast<double>(cfg.burn_in);
        if (chain.burn_in_accept_rate < kMinBurnInAcceptance) {
          throw Divergence(fmt::format("HMC burn-in acceptance rate {} is below {}; step size too large?",
                                       chain.burn_in_accept_rate, kMinBurnInAcceptance));
        }
      }
    } else {
      accepts += accept ? 1 : 0;
      if ((it - cfg.burn_in + 1) % cfg.thin == 0) chain.samples.push_back(x);
    }
  }
  chain.accept_rate = static_cast<double>(accepts) / static_cast<double>(total - cfg.burn_in);
  return chain;
}

PosteriorChain hmc_sample(const Dataset& d, std::span<const std::size_t> arch, const HMCConfig& cfg,
                          const MapWarmStart& warm) {
  cfg.validate();
  if (!d.is_binary()) throw PreconditionError("hmc_sample needs labels in {0, 1}");
  if (d.size() == 0) throw PreconditionError("hmc_sample: empty dataset");
  nnet::MLPParams net = nnet::mlp_init(arch, derive_seed(cfg.seed, 0));
  if (d.dim() != static_cast<Eigen::Index>(net.input_dim()) || net.output_dim() != 2) {
    throw DimensionMismatch("hmc_sample: architecture does not fit the dataset");
  }
  const std::vector<std::size_t> sizes = net.layer_sizes();
  const double prec = cfg.prior_precision;

  if (warm.epochs > 0) {
    if (warm.batch_size < 1) throw PreconditionError("warm start batch size must be positive");
    // Minibatch estimate of -log posterior / N
    RngStream shuffle(derive_seed(cfg.seed, 1));
    nnet::Adam adam(net.n_params(), nnet::AdamConfig{warm.learning_rate});
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Vector grad(net.flat().size());
    for (std::size_t e = 0; e < warm.epochs; ++e) {
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.uniform_index(i)]);
      for (std::size_t start = 0; start < n; start += warm.batch_size) {
        const std::size_t len = std::min(warm.batch_size, n - start);
        const double ll = log_likelihood_and_grad(net, d, std::span(order.data() + start, len), grad);
        if (!std::isfinite(ll)) throw Divergence("HMC warm start diverged");
        grad = -grad / static_cast<double>(len) + (prec / static_cast<double>(n)) * net.flat();
        adam.step(net.flat(), grad);
      }
    }
  }

  const PotentialFn potential = [&](const Vector& w, Vector& grad) {
    const nnet::MLPParams params(sizes, w);
    grad.resize(w.size());
    const double ll = log_likelihood_and_grad(params, d, {}, grad);
    grad = -grad + prec * w;
    return -ll + 0.5 * prec * w.squaredNorm();
  };
  HMCConfig inner = cfg;
  inner.seed = derive_seed(cfg.seed, 2);
  PosteriorChain chain = hmc_sample(potential, std::move(net.flat()), inner);
  chain.layer_sizes = sizes;
  return chain;
}

}  // namespace ue::bnn
