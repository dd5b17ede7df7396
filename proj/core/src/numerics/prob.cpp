#include "ue/numerics/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue {

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw PreconditionError("ProbVector: empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError(fmt::format("ProbVector: entry {} outside [0, 1]", p));
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw PreconditionError(fmt::format("ProbVector: entries sum to {:.17g}", sum));
  }
}

std::size_t ProbVector::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::max(h, 0.0);
}

double entropy(const ProbVector& p) { return entropy(p.values()); }

double binary_entropy(double p1) {
  const double p[2] = {1.0 - p1, p1};
  return entropy(std::span<const double>(p, 2));
}

ProbVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw PreconditionError("softmax: empty logits");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return ProbVector(std::move(out));
}

ProbVector softmax(const Vector& logits) {
  return softmax(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.size())));
}

DenseMatrix softmax_columns(const DenseMatrix& logits) {
  DenseMatrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double top = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - top).exp();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

}  // namespace ue
