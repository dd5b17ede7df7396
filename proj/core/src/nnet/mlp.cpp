#include "ue/nnet/mlp.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue::nnet {

std::size_t parameter_count(std::span<const std::size_t> layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) n += (layer_sizes[l] + 1) * layer_sizes[l + 1];
  return n;
}

MLPParams::MLPParams(std::vector<std::size_t> layer_sizes)
    : MLPParams(layer_sizes, Vector::Zero(static_cast<Eigen::Index>(parameter_count(layer_sizes)))) {}

MLPParams::MLPParams(std::vector<std::size_t> layer_sizes, Vector flat) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw PreconditionError("MLP needs at least an input and an output size");
  for (std::size_t s : sizes_) {
    if (s == 0) throw PreconditionError("MLP layer sizes must be positive");
  }
  const std::size_t n = parameter_count(sizes_);
  if (static_cast<std::size_t>(flat.size()) != n) {
    throw DimensionMismatch(fmt::format("MLP parameter vector has {} entries, architecture needs {}", flat.size(), n));
  }
  flat_ = std::move(flat);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(off);
    off += (sizes_[l] + 1) * sizes_[l + 1];
  }
}

std::size_t MLPParams::bias_offset(std::size_t layer) const {
  return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
}

Eigen::Map<DenseMatrix> MLPParams::weights(std::size_t layer) {
  return {flat_.data() + offsets_[layer], static_cast<Eigen::Index>(sizes_[layer + 1]),
          static_cast<Eigen::Index>(sizes_[layer])};
}

Eigen::Map<const DenseMatrix> MLPParams::weights(std::size_t layer) const {
  return {flat_.data() + offsets_[layer], static_cast<Eigen::Index>(sizes_[layer + 1]),
          static_cast<Eigen::Index>(sizes_[layer])};
}

Eigen::Map<Vector> MLPParams::biases(std::size_t layer) {
  return {flat_.data() + bias_offset(layer), static_cast<Eigen::Index>(sizes_[layer + 1])};
}

Eigen::Map<const Vector> MLPParams::biases(std::size_t layer) const {
  return {flat_.data() + bias_offset(layer), static_cast<Eigen::Index>(sizes_[layer + 1])};
}

Vector MLPParams::weight_indicator() const {
  Vector ind = Vector::Zero(flat_.size());
  for (std::size_t l = 0; l < n_layers(); ++l) {
    ind.segment(static_cast<Eigen::Index>(offsets_[l]), static_cast<Eigen::Index>(sizes_[l] * sizes_[l + 1]))
        .setOnes();
  }
  return ind;
}

MLPParams mlp_init(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
  MLPParams p(std::vector<std::size_t>(layer_sizes.begin(), layer_sizes.end()));
  RngStream rng(seed);
  for (std::size_t l = 0; l < p.n_layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer_sizes[l] + layer_sizes[l + 1]));
    auto w = p.weights(l);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-limit, limit);
    }
  }
  return p;
}

DropoutMasks sample_masks(const MLPParams& p, double rate, Eigen::Index cols, RngStream& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw PreconditionError(fmt::format("dropout rate {} not in [0, 1)", rate));
  DropoutMasks m;
  if (rate == 0.0) return m;
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t l = 0; l + 1 < p.n_layers(); ++l) {
    DenseMatrix mask(static_cast<Eigen::Index>(p.layer_sizes()[l + 1]), cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < mask.rows(); ++i) mask(i, j) = rng.uniform() < rate ? 0.0 : scale;
    }
    m.hidden.push_back(std::move(mask));
  }
  return m;
}

namespace {

void check_masks(const MLPParams& p, const DropoutMasks& m, Eigen::Index cols) {
  if (m.empty()) return;
  if (m.hidden.size() + 1 != p.n_layers()) throw DimensionMismatch("dropout masks do not match hidden layer count");
  for (std::size_t l = 0; l < m.hidden.size(); ++l) {
    const auto& mk = m.hidden[l];
    if (mk.rows() != static_cast<Eigen::Index>(p.layer_sizes()[l + 1]) || (mk.cols() != 1 && mk.cols() != cols)) {
      throw DimensionMismatch(fmt::format("dropout mask {} has shape {}x{}", l, mk.rows(), mk.cols()));
    }
  }
}

void apply_mask(DenseMatrix& a, const DenseMatrix& mask) {
  if (mask.cols() == 1) {
    a.array().colwise() *= mask.col(0).array();
  } else {
    a.array() *= mask.array();
  }
}

}  // namespace

DenseMatrix forward_batch(const MLPParams& p, const DenseMatrix& x, const DropoutMasks* masks, ForwardCache* cache) {
  if (x.rows() != static_cast<Eigen::Index>(p.input_dim())) {
    throw DimensionMismatch(fmt::format("forward: input dim {} but network expects {}", x.rows(), p.input_dim()));
  }
  if (masks != nullptr) check_masks(p, *masks, x.cols());
  const bool use_masks = masks != nullptr && !masks->empty();
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre.clear();
    cache->masks = use_masks ? *masks : DropoutMasks{};
    cache->inputs.push_back(x);
  }
  DenseMatrix a = x;
  for (std::size_t l = 0; l < p.n_layers(); ++l) {
    DenseMatrix z = p.weights(l) * a;
    z.colwise() += p.biases(l);
    if (l + 1 == p.n_layers()) return z;
    if (cache != nullptr) cache->pre.push_back(z);
    a = z.cwiseMax(0.0);
    if (use_masks) apply_mask(a, masks->hidden[l]);
    if (cache != nullptr) cache->inputs.push_back(a);
  }
  return a;  // unreachable: n_layers() >= 1
}

ForwardResult forward(const MLPParams& p, const Eigen::Ref<const Vector>& x, double dropout_rate, RngStream* rng) {
  DropoutMasks masks;
  if (rng != nullptr) masks = sample_masks(p, dropout_rate, 1, *rng);
  ForwardResult r;
  const DenseMatrix in = x;
  r.logits = forward_batch(p, in, &masks, &r.cache).col(0);
  return r;
}

double cross_entropy(const Eigen::Ref<const Vector>& logits, int label) {
  if (label < 0 || label >= logits.size()) {
    throw PreconditionError(fmt::format("label {} out of range for {} classes", label, logits.size()));
  }
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return lse - logits(label);
}

double accumulate_gradient(const MLPParams& p, const DenseMatrix& x, std::span<const int> labels,
                           const DropoutMasks* masks, Eigen::Ref<Vector> grad_sum) {
  if (x.cols() == 0) throw PreconditionError("backward: empty batch");
  if (static_cast<std::size_t>(x.cols()) != labels.size()) {
    throw DimensionMismatch(fmt::format("backward: {} inputs but {} labels", x.cols(), labels.size()));
  }
  if (static_cast<std::size_t>(grad_sum.size()) != p.n_params()) {
    throw DimensionMismatch("backward: gradient buffer does not match the parameter count");
  }
  ForwardCache cache;
  const DenseMatrix logits = forward_batch(p, x, masks, &cache);
  const Eigen::Index n = x.cols();
  const Eigen::Index c = logits.rows();

  // d loss / d logits = softmax - onehot, column by column
  DenseMatrix delta(c, n);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int y = labels[static_cast<std::size_t>(j)];
    if (y < 0 || y >= c) throw PreconditionError(fmt::format("label {} out of range for {} classes", y, c));
    const double m = logits.col(j).maxCoeff();
    const auto e = (logits.col(j).array() - m).exp();
    const double s = e.sum();
    loss += m + std::log(s) - logits(y, j);
    delta.col(j) = e / s;
    delta(y, j) -= 1.0;
  }

  for (std::size_t li = p.n_layers(); li-- > 0;) {
    const auto rows = static_cast<Eigen::Index>(p.layer_sizes()[li + 1]);
    const auto cols = static_cast<Eigen::Index>(p.layer_sizes()[li]);
    Eigen::Map<DenseMatrix> gw(grad_sum.data() + p.weight_offset(li), rows, cols);
    Eigen::Map<Vector> gb(grad_sum.data() + p.bias_offset(li), rows);
    gw.noalias() += delta * cache.inputs[li].transpose();
    gb += delta.rowwise().sum();
    if (li == 0) break;
    DenseMatrix back = p.weights(li).transpose() * delta;
    back.array() *= (cache.pre[li - 1].array() > 0.0).cast<double>();
    if (!cache.masks.empty()) apply_mask(back, cache.masks.hidden[li - 1]);
    delta = std::move(back);
  }
  return loss;
}

LossGradient backward(const MLPParams& p, const DenseMatrix& x, std::span<const int> labels,
                      const DropoutMasks* masks, double weight_decay) {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(p.n_params()));
  const double sum = accumulate_gradient(p, x, labels, masks, g);
  const double n = static_cast<double>(x.cols());
  g /= n;
  double loss = sum / n;
  if (weight_decay != 0.0) {
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
      const auto w = p.weights(l);
      loss += 0.5 * weight_decay * w.squaredNorm();
      g.segment(static_cast<Eigen::Index>(p.weight_offset(l)), w.size()) +=
          weight_decay * Eigen::Map<const Vector>(w.data(), w.size());
    }
  }
  return {loss, MLPParams(p.layer_sizes(), std::move(g))};
}

DenseMatrix encode_batch(const MLPParams& p, const DenseMatrix& x, std::size_t upto_layer) {
  if (upto_layer < 1 || upto_layer > p.n_layers()) {
    throw PreconditionError(fmt::format("encode: upto_layer {} not in [1, {}]", upto_layer, p.n_layers()));
  }
  if (x.rows() != static_cast<Eigen::Index>(p.input_dim())) {
    throw DimensionMismatch(fmt::format("encode: input dim {} but network expects {}", x.rows(), p.input_dim()));
  }
  DenseMatrix a = x;
  for (std::size_t l = 0; l < upto_layer; ++l) {
    DenseMatrix z = p.weights(l) * a;
    z.colwise() += p.biases(l);
    a = (l + 1 == p.n_layers()) ? std::move(z) : DenseMatrix(z.cwiseMax(0.0));
  }
  return a;
}

Vector encode(const MLPParams& p, const Eigen::Ref<const Vector>& x, std::size_t upto_layer) {
  const DenseMatrix in = x;
  return encode_batch(p, in, upto_layer).col(0);
}

}  // namespace ue::nnet
