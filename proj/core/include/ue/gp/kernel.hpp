#pragma once

#include <vector>

#include "ue/numerics/types.hpp"

namespace ue::gp {

struct KernelParams {
  double length_scale = 1.0;     // input-space units
  double signal_variance = 1.0;  // prior variance of the latent function

  // Throws PreconditionError unless both fields are finite and positive.
  void validate() const;
};

// signal_variance * exp(-|a - b|^2 / (2 length_scale^2))
double rbf(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, const KernelParams& p);

// Entry (i, j) is rbf(column i of a, column j of b). Distances are summed
// coordinate by coordinate, so entries agree bitwise with rbf().
DenseMatrix kernel_matrix(const DenseMatrix& a, const DenseMatrix& b, const KernelParams& p);

// Length scales 2^lo_exp .. 2^hi_exp at a fixed signal variance.
std::vector<KernelParams> length_scale_grid(int lo_exp, int hi_exp, double signal_variance = 1.0);

}  // namespace ue::gp
