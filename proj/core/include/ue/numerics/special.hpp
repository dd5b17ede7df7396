#pragma once

#include <cstddef>
#include <vector>

namespace ue {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kLn2 = 0.69314718055994530942;

double std_normal_pdf(double z);
double std_normal_cdf(double z);

// log Phi(z), accurate far into the lower tail.
double log_std_normal_cdf(double z);

// phi(z) / Phi(z) (inverse Mills ratio), stable for very negative z.
double normal_pdf_cdf_ratio(double z);

double sigmoid(double z);
double log_sigmoid(double z);
double softplus(double z);

struct GaussHermiteRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // against the weight function exp(-x^2)
};

// n-point physicists' Gauss-Hermite rule, 1 <= n <= 100.
GaussHermiteRule gauss_hermite(std::size_t n);

}  // namespace ue
