#include "ue/gp/kernel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue::gp {

void KernelParams::validate() const {
  if (!(std::isfinite(length_scale) && length_scale > 0.0)) {
    throw PreconditionError(fmt::format("length_scale must be positive and finite, got {}", length_scale));
  }
  if (!(std::isfinite(signal_variance) && signal_variance > 0.0)) {
    throw PreconditionError(fmt::format("signal_variance must be positive and finite, got {}", signal_variance));
  }
}

namespace {

double squared_distance(const double* a, const double* b, Eigen::Index dim) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

double rbf(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, const KernelParams& p) {
  p.validate();
  if (a.size() != b.size()) {
    throw DimensionMismatch(fmt::format("rbf: inputs of length {} and {}", a.size(), b.size()));
  }
  const double inv = 1.0 / (2.0 * p.length_scale * p.length_scale);
  return p.signal_variance * std::exp(-squared_distance(a.data(), b.data(), a.size()) * inv);
}

DenseMatrix kernel_matrix(const DenseMatrix& a, const DenseMatrix& b, const KernelParams& p) {
  p.validate();
  if (a.rows() != b.rows()) {
    throw DimensionMismatch(fmt::format("kernel_matrix: input dims {} and {}", a.rows(), b.rows()));
  }
  const double inv = 1.0 / (2.0 * p.length_scale * p.length_scale);
  const Eigen::Index dim = a.rows();
  DenseMatrix k(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    const double* bj = b.col(j).data();
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      k(i, j) = p.signal_variance * std::exp(-squared_distance(a.col(i).data(), bj, dim) * inv);
    }
  }
  return k;
}

std::vector<KernelParams> length_scale_grid(int lo_exp, int hi_exp, double signal_variance) {
  if (lo_exp > hi_exp) {
    throw PreconditionError(fmt::format("length_scale_grid: empty range [{}, {}]", lo_exp, hi_exp));
  }
  std::vector<KernelParams> grid;
  for (int e = lo_exp; e <= hi_exp; ++e) {
    KernelParams p{std::ldexp(1.0, e), signal_variance};
    p.validate();
    grid.push_back(p);
  }
  return grid;
}

}  // namespace ue::gp
