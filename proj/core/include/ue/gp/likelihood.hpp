#pragma once

#include <string_view>

namespace ue::gp {

enum class Link { kProbit, kLogistic };

std::string_view to_string(Link link);
Link parse_link(std::string_view name);

// Per-observation terms of log p(y | f) for a label y in {-1, +1}.
struct PointLikelihood {
  double log_lik = 0.0;
  double grad = 0.0;      // d/df log p(y|f)
  double neg_hess = 0.0;  // -d^2/df^2 log p(y|f), always >= 0
};

PointLikelihood point_likelihood(Link link, double y, double f);

// Integral of link(f) * N(f | mean, variance) df. Probit is closed form,
// logistic uses 50-node Gauss-Hermite quadrature.
double predictive_probability(Link link, double mean, double variance);

}  // namespace ue::gp
