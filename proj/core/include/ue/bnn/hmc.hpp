#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ue/datasets/dataset.hpp"
#include "ue/numerics/types.hpp"

namespace ue::bnn {

// Potential energy U (negative log target density); writes dU/dx into grad.
using PotentialFn = std::function<double(const Vector& position, Vector& grad)>;

struct PhasePoint {
  Vector position;
  Vector momentum;
};

// `steps` leapfrog steps with unit mass: half kick, drift, half kick.
// Throws NonFinite if the trajectory leaves the finite range.
PhasePoint leapfrog(Vector position, Vector momentum, const PotentialFn& potential, double step_size,
                    std::size_t steps);

struct HMCConfig {
  double step_size = 5e-4;
  std::size_t trajectory_length = 3;  // leapfrog steps per proposal
  std::size_t n_samples = 300;        // retained samples
  std::size_t burn_in = 200;
  std::size_t thin = 1;  // keep every thin-th iteration after burn-in
  double prior_precision = 5.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PosteriorChain {
  std::vector<std::size_t> layer_sizes;  // empty for a generic target
  std::vector<Vector> samples;
  double accept_rate = 0.0;          // over the post-burn-in iterations
  double burn_in_accept_rate = 0.0;  // over the burn-in iterations
  std::vector<double> energies;       // Hamiltonian of the chain state after each iteration
  std::vector<std::uint8_t> accepted;  // one flag per iteration, burn-in first
};

// Metropolis-corrected HMC. Throws Divergence when fewer than 1% of the
// burn-in proposals are accepted.
PosteriorChain hmc_sample(const PotentialFn& potential, Vector initial, const HMCConfig& cfg);

// Optional Adam warm start towards the MAP point before sampling.
struct MapWarmStart {
  std::size_t epochs = 0;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
};

// HMC over the weights of an MLP classifier with the full-batch log
// posterior of d as target.
PosteriorChain hmc_sample(const Dataset& d, std::span<const std::size_t> arch, const HMCConfig& cfg,
                          const MapWarmStart& warm = {});

}  // namespace ue::bnn
