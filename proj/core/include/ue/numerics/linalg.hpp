#pragma once

#include "ue/numerics/types.hpp"

namespace ue {

enum class Triangle { kLower, kUpper };

// Lower Cholesky factor L with L * L^T == a. Throws NotPositiveDefinite when
// a pivot is not strictly positive and PreconditionError when `a` is not
// square or not symmetric to within 1e-10 (relative to its largest entry).
DenseMatrix cholesky(const DenseMatrix& a);

struct JitteredCholesky {
  DenseMatrix lower;
  double jitter = 0.0;  // absolute amount added to the diagonal
};

// Retries the factorization with diagonal jitter 1e-9 * mean(diag(a)),
// escalating by x10 up to 1e-4 * mean(diag(a)). The first attempt uses no
// jitter. Rethrows NotPositiveDefinite once the ladder is exhausted.
JitteredCholesky cholesky_with_jitter(const DenseMatrix& a);

// Solves t * x = b for a triangular t. Only the named triangle of `t` is
// read. Throws SingularMatrix on a zero diagonal entry.
Vector solve_triangular(const DenseMatrix& t, const Vector& b, Triangle side);

// Matrix right-hand side variant; column j of the result solves against
// column j of `b`.
DenseMatrix solve_triangular(const DenseMatrix& t, const DenseMatrix& b, Triangle side);

}  // namespace ue
