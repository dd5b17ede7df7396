#include "ue/numerics/linalg.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue {

namespace {

void require_square(const DenseMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw PreconditionError(fmt::format("{}: matrix is {}x{}, expected square", what, a.rows(), a.cols()));
  }
}

}  // namespace

DenseMatrix cholesky(const DenseMatrix& a) {
  require_square(a, "cholesky");
  if (a.size() == 0) return a;
  if (!a.allFinite()) throw NumericalError("cholesky: non-finite entry");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw PreconditionError(fmt::format("cholesky: matrix not symmetric (max |A - A^T| = {:.3g})", asym));
  }
  Eigen::LLT<DenseMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: non-positive pivot");
  }
  DenseMatrix lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) {
      throw NotPositiveDefinite(fmt::format("cholesky: pivot {} is {}", i, lower(i, i)));
    }
  }
  return lower;
}

JitteredCholesky cholesky_with_jitter(const DenseMatrix& a) {
  require_square(a, "cholesky_with_jitter");
  try {
    return {cholesky(a), 0.0};
  } catch (const NotPositiveDefinite&) {
  }
  const double mean_diag = a.rows() > 0 ? a.diagonal().mean() : 0.0;
  const double base = mean_diag > 0.0 ? mean_diag : 1.0;
  for (double rel = 1e-9; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * base;
    DenseMatrix shifted = a;
    shifted.diagonal().array() += jitter;
    try {
      return {cholesky(shifted), jitter};
    } catch (const NotPositiveDefinite&) {
    }
  }
  throw NotPositiveDefinite("cholesky_with_jitter: still not positive definite at jitter 1e-4 * mean diagonal");
}

Vector solve_triangular(const DenseMatrix& t, const Vector& b, Triangle side) {
  require_square(t, "solve_triangular");
  const Eigen::Index n = t.rows();
  if (b.size() != n) {
    throw DimensionMismatch(fmt::format("solve_triangular: rhs has {} entries, matrix is {}x{}", b.size(), n, n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (t(i, i) == 0.0) throw SingularMatrix(fmt::format("solve_triangular: zero diagonal at {}", i));
  }
  Vector x = b;
  if (side == Triangle::kLower) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = x(i);
      for (Eigen::Index k = 0; k < i; ++k) s -= t(i, k) * x(k);
      x(i) = s / t(i, i);
    }
  } else {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double s = x(i);
      for (Eigen::Index k = i + 1; k < n; ++k) s -= t(i, k) * x(k);
      x(i) = s / t(i, i);
    }
  }
  return x;
}

DenseMatrix solve_triangular(const DenseMatrix& t, const DenseMatrix& b, Triangle side) {
  require_square(t, "solve_triangular");
  if (b.rows() != t.rows()) {
    throw DimensionMismatch(fmt::format("solve_triangular: rhs has {} rows, matrix is {}x{}", b.rows(), t.rows(), t.cols()));
  }
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (t(i, i) == 0.0) throw SingularMatrix(fmt::format("solve_triangular: zero diagonal at {}", i));
  }
  if (side == Triangle::kLower) return t.triangularView<Eigen::Lower>().solve(b);
  return t.triangularView<Eigen::Upper>().solve(b);
}

}  // namespace ue
