#pragma once

#include <Eigen/Core>

namespace ue {

// Column-major, float64 throughout. Each column of a feature matrix is one
// sample.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Eigen::Ref<const DenseMatrix>& m) { return m.allFinite(); }

}  // namespace ue
