#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ue/nnet/mlp.hpp"
#include "ue/numerics/prob.hpp"

namespace ue::bnn {

// Mean of the softmax outputs of the given parameter draws.
ProbVector posterior_predict(std::span<const std::size_t> layer_sizes, std::span<const Vector> samples,
                             const Eigen::Ref<const Vector>& x);

struct EnsemblePrediction {
  DenseMatrix mean_probs;       // classes x probes
  Vector predictive_entropy;    // entropy of the averaged prediction
  Vector mean_member_entropy;   // average of the per-draw entropies
};

// Produces draw k on demand, so large posteriors never need to be held in
// memory at once.
using MemberFn = std::function<Vector(std::size_t k)>;

// Draws are visited in index order; probes are split into fixed chunks
// across evaluation_threads().
EnsemblePrediction ensemble_predict(std::span<const std::size_t> layer_sizes, std::size_t n_members,
                                    const MemberFn& member, const DenseMatrix& probes);

}  // namespace ue::bnn
