#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ue/numerics/types.hpp"

namespace ue {

// Normalized class distribution. Construction validates: every entry in
// [0, 1] and the sum within 1e-12 of one.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t c) const { return probs_[c]; }
  std::span<const double> values() const { return probs_; }
  std::size_t argmax() const;

 private:
  std::vector<double> probs_;
};

// -sum_c p_c ln p_c in nats, with 0 ln 0 = 0.
double entropy(const ProbVector& p);
double entropy(std::span<const double> p);

// Entropy of the distribution [1 - p1, p1].
double binary_entropy(double p1);

// Max-subtracted softmax.
ProbVector softmax(std::span<const double> logits);
ProbVector softmax(const Vector& logits);

// Column-wise softmax of a (classes x samples) logit matrix.
DenseMatrix softmax_columns(const DenseMatrix& logits);

}  // namespace ue
