#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ue/datasets/dataset.hpp"

namespace ue {

struct InterpolationProbe {
  Vector x0;  // class-0 sample
  Vector x1;  // class-1 sample
  double t = 0.0;
};

// t * x1 + (1 - t) * x0, elementwise and unclipped.
Vector interpolate(const InterpolationProbe& p);

struct SweepProbe {
  std::size_t pair_id = 0;
  double t = 0.0;
  std::size_t index0 = 0;  // source sample indices in the swept dataset
  std::size_t index1 = 0;
  Vector features;
};

// n_pairs random (class-0, class-1) pairs, each swept across t_grid. Probes
// are ordered pair-major. Throws EmptyResult when either class is missing.
std::vector<SweepProbe> probe_sweep(const Dataset& d, std::size_t n_pairs, std::span<const double> t_grid,
                                    std::uint64_t seed);

// n equally spaced values from lo to hi, computed as (lo*(n-1-k) + hi*k)/(n-1)
// so integer end points give correctly rounded interior values (0.6, not
// 0.6000000000000001).
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace ue
