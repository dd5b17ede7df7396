#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>

#include "ue/datasets/dataset.hpp"
#include "ue/nnet/mlp.hpp"
#include "ue/numerics/prob.hpp"

namespace ue::mcdropout {

struct MCDropoutConfig {
  std::size_t n_samples = 100;  // stochastic passes per prediction
  double dropout_rate = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// Pass m uses the masks drawn from RngStream(seed).split(m); a mask is shared
// by every probe in that pass, so a probe's prediction does not depend on
// which other probes it is evaluated with.
ProbVector mc_average(const nnet::MLPParams& p, const Eigen::Ref<const Vector>& x, const MCDropoutConfig& cfg);

// Entropy of the averaged prediction, in nats.
double mc_entropy(const nnet::MLPParams& p, const Eigen::Ref<const Vector>& x, const MCDropoutConfig& cfg);

struct BatchResult {
  DenseMatrix mean_probs;    // classes x probes
  Vector predictive_entropy;  // entropy of the averaged prediction
  Vector mean_pass_entropy;   // average of the per-pass entropies
};

// Column-wise mc_average over a probe matrix, split into fixed chunks across
// evaluation_threads(). Passes are reduced in index order.
BatchResult mc_average_batch(const nnet::MLPParams& p, const DenseMatrix& probes, const MCDropoutConfig& cfg);

// Mean predictive entropy per label. Throws EmptyResult if a requested
// class has no samples in d.
std::map<int, double> per_class_mean_entropy(const nnet::MLPParams& p, const Dataset& d, const MCDropoutConfig& cfg,
                                             std::span<const int> classes);
// Same, over every label present in d.
std::map<int, double> per_class_mean_entropy(const nnet::MLPParams& p, const Dataset& d, const MCDropoutConfig& cfg);

}  // namespace ue::mcdropout
