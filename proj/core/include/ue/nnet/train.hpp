#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ue/datasets/dataset.hpp"
#include "ue/nnet/mlp.hpp"

namespace ue::nnet {

enum class Optimizer { kSgd, kAdam };

std::string_view to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view name);

struct TrainConfig {
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t epochs = 50;
  double dropout_rate = 0.0;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  MLPParams params;
  double train_accuracy = 0.0;
  std::vector<double> epoch_losses;  // mean minibatch loss per epoch
};

// Minibatch training with a per-epoch shuffle. Bit-reproducible for a fixed
// config. Throws Divergence when a batch loss is not finite.
TrainResult train(MLPParams init, const Dataset& d, const TrainConfig& cfg);

// Fraction of samples whose deterministic argmax equals the label.
double accuracy(const MLPParams& p, const Dataset& d);

}  // namespace ue::nnet
