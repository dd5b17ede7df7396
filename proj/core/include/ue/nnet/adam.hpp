#pragma once

#include <cstddef>

#include "ue/numerics/types.hpp"

namespace ue::nnet {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n_params, AdamConfig cfg = {});

  // params -= lr * m_hat / (sqrt(v_hat) + eps)
  void step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grad);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  Vector m_;
  Vector v_;
  std::size_t t_ = 0;
};

}  // namespace ue::nnet
