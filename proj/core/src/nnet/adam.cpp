#include "ue/nnet/adam.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue::nnet {

Adam::Adam(std::size_t n_params, AdamConfig cfg)
    : cfg_(cfg), m_(Vector::Zero(static_cast<Eigen::Index>(n_params))), v_(Vector::Zero(static_cast<Eigen::Index>(n_params))) {
  if (!(cfg.learning_rate > 0.0) || !(cfg.epsilon > 0.0) || !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw PreconditionError("Adam: invalid hyperparameters");
  }
}

void Adam::step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw DimensionMismatch(fmt::format("Adam: state of size {} but params {} and grad {}", m_.size(), params.size(),
                                        grad.size()));
  }
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
}

}  // namespace ue::nnet
