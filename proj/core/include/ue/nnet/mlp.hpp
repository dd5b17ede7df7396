#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ue/numerics/rng.hpp"
#include "ue/numerics/types.hpp"

namespace ue::nnet {

// Dense ReLU network with an identity output layer. All weights and biases
// live in one flat vector, layer by layer: the (out x in) weight matrix in
// column-major order followed by the bias vector.
class MLPParams {
 public:
  MLPParams() = default;
  // Zero-filled parameters for the given layer widths (input first).
  explicit MLPParams(std::vector<std::size_t> layer_sizes);
  MLPParams(std::vector<std::size_t> layer_sizes, Vector flat);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t n_layers() const { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  std::size_t n_params() const { return static_cast<std::size_t>(flat_.size()); }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }

  Vector& flat() { return flat_; }
  const Vector& flat() const { return flat_; }

  Eigen::Map<DenseMatrix> weights(std::size_t layer);
  Eigen::Map<const DenseMatrix> weights(std::size_t layer) const;
  Eigen::Map<Vector> biases(std::size_t layer);
  Eigen::Map<const Vector> biases(std::size_t layer) const;

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const;
  // 1 for weight entries, 0 for biases; used for the L2 penalty.
  Vector weight_indicator() const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  Vector flat_;
};

std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

// Glorot-uniform weights, zero biases.
MLPParams mlp_init(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

// Inverted-dropout scale factors (0 or 1/(1-rate)) for each hidden layer.
// A mask with one column is shared by every sample of a batch; otherwise it
// has one column per sample.
struct DropoutMasks {
  std::vector<DenseMatrix> hidden;
  bool empty() const { return hidden.empty(); }
};

// Draws masks for `cols` columns. Rate 0 returns empty masks and leaves the
// stream untouched.
DropoutMasks sample_masks(const MLPParams& p, double rate, Eigen::Index cols, RngStream& rng);

struct ForwardCache {
  std::vector<DenseMatrix> inputs;  // input to each layer (after ReLU and dropout)
  std::vector<DenseMatrix> pre;     // pre-activations of the hidden layers
  DropoutMasks masks;
};

// Logits (output_dim x n) for the columns of x.
DenseMatrix forward_batch(const MLPParams& p, const DenseMatrix& x, const DropoutMasks* masks = nullptr,
                          ForwardCache* cache = nullptr);

struct ForwardResult {
  Vector logits;
  ForwardCache cache;
};

// Single-input pass. With rng set and rate > 0 each hidden unit is dropped
// independently; with rng null the pass is deterministic.
ForwardResult forward(const MLPParams& p, const Eigen::Ref<const Vector>& x, double dropout_rate, RngStream* rng);

// -log softmax(logits)[label]
double cross_entropy(const Eigen::Ref<const Vector>& logits, int label);

// Adds the summed cross-entropy gradient over the columns of x into
// grad_sum and returns the summed loss. No averaging, no penalty.
double accumulate_gradient(const MLPParams& p, const DenseMatrix& x, std::span<const int> labels,
                           const DropoutMasks* masks, Eigen::Ref<Vector> grad_sum);

struct LossGradient {
  double loss = 0.0;  // mean cross-entropy + weight_decay * |W|^2 / 2
  MLPParams gradient;
};

LossGradient backward(const MLPParams& p, const DenseMatrix& x, std::span<const int> labels,
                      const DropoutMasks* masks = nullptr, double weight_decay = 0.0);

// Deterministic activations after `upto_layer` layers (ReLU applied unless
// that is the output layer). 1 <= upto_layer <= n_layers().
Vector encode(const MLPParams& p, const Eigen::Ref<const Vector>& x, std::size_t upto_layer);
DenseMatrix encode_batch(const MLPParams& p, const DenseMatrix& x, std::size_t upto_layer);

}  // namespace ue::nnet
