#include "ue/nnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/nnet/adam.hpp"

namespace ue::nnet {

std::string_view to_string(Optimizer o) { return o == Optimizer::kAdam ? "adam" : "sgd"; }

Optimizer parse_optimizer(std::string_view name) {
  if (name == "adam") return Optimizer::kAdam;
  if (name == "sgd") return Optimizer::kSgd;
  throw PreconditionError(fmt::format("unknown optimizer '{}'", name));
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw PreconditionError("learning_rate must be positive");
  if (epochs < 1) throw PreconditionError("epochs must be at least 1");
  if (batch_size < 1) throw PreconditionError("batch_size must be at least 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw PreconditionError("dropout_rate must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw PreconditionError("weight_decay must be non-negative");
}

namespace {

void check_labels(const MLPParams& p, const Dataset& d) {
  if (d.dim() != static_cast<Eigen::Index>(p.input_dim())) {
    throw DimensionMismatch(fmt::format("dataset dim {} but network expects {}", d.dim(), p.input_dim()));
  }
  for (int y : d.labels()) {
    if (y < 0 || static_cast<std::size_t>(y) >= p.output_dim()) {
      throw PreconditionError(fmt::format("label {} out of range for a {}-class network", y, p.output_dim()));
    }
  }
}

}  // namespace

TrainResult train(MLPParams init, const Dataset& d, const TrainConfig& cfg) {
  cfg.validate();
  if (d.size() == 0) throw PreconditionError("train: empty dataset");
  check_labels(init, d);

  TrainResult r;
  r.params = std::move(init);
  MLPParams& p = r.params;
  const RngStream base(cfg.seed);
  RngStream shuffle_rng = base.split(0);
  RngStream dropout_rng = base.split(1);
  Adam adam(p.n_params(), AdamConfig{cfg.learning_rate});

  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  DenseMatrix xb;
  std::vector<int> yb;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      xb.resize(d.dim(), static_cast<Eigen::Index>(len));
      yb.resize(len);
      for (std::size_t j = 0; j < len; ++j) {
        xb.col(static_cast<Eigen::Index>(j)) = d.sample(order[start + j]);
        yb[j] = d.label(order[start + j]);
      }
      const DropoutMasks masks = sample_masks(p, cfg.dropout_rate, static_cast<Eigen::Index>(len), dropout_rng);
      const LossGradient lg = backward(p, xb, yb, &masks, cfg.weight_decay);
      if (!std::isfinite(lg.loss) || !lg.gradient.flat().allFinite()) {
        throw Divergence(fmt::format("training diverged in epoch {} (loss {})", epoch, lg.loss));
      }
      if (cfg.optimizer == Optimizer::kAdam) {
        adam.step(p.flat(), lg.gradient.flat());
      } else {
        p.flat() -= cfg.learning_rate * lg.gradient.flat();
      }
      loss_sum += lg.loss;
      ++batches;
    }
    r.epoch_losses.push_back(loss_sum / static_cast<double>(batches));
  }
  r.train_accuracy = accuracy(p, d);
  return r;
}

double accuracy(const MLPParams& p, const Dataset& d) {
  if (d.size() == 0) throw PreconditionError("accuracy: empty dataset");
  constexpr Eigen::Index kChunk = 1024;
  const auto n = static_cast<Eigen::Index>(d.size());
  std::size_t correct = 0;
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, n - start);
    const DenseMatrix logits = forward_batch(p, d.features().middleCols(start, len));
    for (Eigen::Index j = 0; j < len; ++j) {
      Eigen::Index arg = 0;
      logits.col(j).maxCoeff(&arg);
      if (arg == d.label(static_cast<std::size_t>(start + j))) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace ue::nnet
