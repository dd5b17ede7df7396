#include "ue/gp/likelihood.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/numerics/special.hpp"

namespace ue::gp {

std::string_view to_string(Link link) {
  return link == Link::kProbit ? "probit" : "logistic";
}

Link parse_link(std::string_view name) {
  if (name == "probit") return Link::kProbit;
  if (name == "logistic") return Link::kLogistic;
  throw PreconditionError(fmt::format("unknown link '{}'", name));
}

PointLikelihood point_likelihood(Link link, double y, double f) {
  if (y != 1.0 && y != -1.0) {
    throw PreconditionError(fmt::format("latent label must be -1 or +1, got {}", y));
  }
  PointLikelihood out;
  const double z = y * f;
  if (link == Link::kProbit) {
    const double r = normal_pdf_cdf_ratio(z);
    out.log_lik = log_std_normal_cdf(z);
    out.grad = y * r;
    out.neg_hess = r * r + z * r;
  } else {
    const double pi = sigmoid(f);
    out.log_lik = log_sigmoid(z);
    out.grad = 0.5 * (y + 1.0) - pi;
    out.neg_hess = pi * (1.0 - pi);
  }
  return out;
}

double predictive_probability(Link link, double mean, double variance) {
  if (!(variance >= 0.0) || !std::isfinite(mean)) {
    throw PreconditionError(fmt::format("predictive_probability: mean {} variance {}", mean, variance));
  }
  if (link == Link::kProbit) {
    return std_normal_cdf(mean / std::sqrt(1.0 + variance));
  }
  static const GaussHermiteRule rule = gauss_hermite(50);
  const double scale = std::sqrt(2.0 * variance);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * sigmoid(mean + scale * rule.nodes[i]);
  }
  return acc / kSqrtPi;
}

}  // namespace ue::gp
