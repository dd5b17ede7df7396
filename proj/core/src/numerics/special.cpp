#include "ue/numerics/special.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLowerTail = -30.0;

// 1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - 945/z^10: Phi(z) ~ phi(z)/(-z) * series.
double mills_series(double z) {
  const double inv2 = 1.0 / (z * z);
  return 1.0 + inv2 * (-1.0 + inv2 * (3.0 + inv2 * (-15.0 + inv2 * (105.0 - 945.0 * inv2))));
}

}  // namespace

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_std_normal_cdf(double z) {
  if (z > kLowerTail) return std::log(std_normal_cdf(z));
  return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * kPi) + std::log(mills_series(z));
}

double normal_pdf_cdf_ratio(double z) {
  if (z > kLowerTail) return std_normal_pdf(z) / std_normal_cdf(z);
  return -z / mills_series(z);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double log_sigmoid(double z) { return -softplus(-z); }

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n < 1 || n > 100) {
    throw PreconditionError(fmt::format("gauss_hermite: order {} outside [1, 100]", n));
  }
  // Newton iteration on the orthonormal Hermite recurrence, largest root
  // first; roots are symmetric so only half are computed.
  constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^(-1/4)
  constexpr int kMaxIter = 100;
  const auto nd = static_cast<double>(n);
  std::vector<double> x(n), w(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = kPiQuarterInv;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const auto jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double prev = z;
      z = prev - p1 / pp;
      if (std::abs(z - prev) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[half - 1] = 0.0;
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
  return {std::move(x), std::move(w)};
}

}  // namespace ue
