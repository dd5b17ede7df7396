#include "ue/datasets/probes.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/numerics/rng.hpp"

namespace ue {

Vector interpolate(const InterpolationProbe& p) {
  if (p.x0.size() != p.x1.size()) {
    throw DimensionMismatch(fmt::format("interpolate: endpoints have {} and {} entries", p.x0.size(), p.x1.size()));
  }
  if (!std::isfinite(p.t)) throw PreconditionError("interpolate: non-finite t");
  return p.t * p.x1 + (1.0 - p.t) * p.x0;
}

std::vector<SweepProbe> probe_sweep(const Dataset& d, std::size_t n_pairs, std::span<const double> t_grid,
                                    std::uint64_t seed) {
  if (n_pairs < 1) throw PreconditionError("probe_sweep: n_pairs must be >= 1");
  const auto zeros = d.indices_of(0);
  const auto ones = d.indices_of(1);
  if (zeros.empty() || ones.empty()) throw EmptyResult("probe_sweep: dataset lacks class 0 or class 1");
  RngStream rng(seed);
  std::vector<SweepProbe> out;
  out.reserve(n_pairs * t_grid.size());
  for (std::size_t pair = 0; pair < n_pairs; ++pair) {
    const std::size_t i0 = zeros[rng.uniform_index(zeros.size())];
    const std::size_t i1 = ones[rng.uniform_index(ones.size())];
    InterpolationProbe probe{d.sample(i0), d.sample(i1), 0.0};
    for (double t : t_grid) {
      probe.t = t;
      out.push_back(SweepProbe{pair, t, i0, i1, interpolate(probe)});
    }
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const auto last = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const auto kd = static_cast<double>(k);
    out[k] = (lo * (last - kd) + hi * kd) / last;
  }
  return out;
}

}  // namespace ue
