#pragma once

#include <cstddef>
#include <cstdint>

namespace ue {

// Counter-based pseudo random stream. Draw i of a stream is a pure function
// of (seed, i), so equal seeds give identical sequences on every platform.
// Streams are cheap values; every thread owns its own.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  // Independent stream keyed by (this stream's seed, index). Does not
  // advance this stream.
  RngStream split(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed for sub-stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ue
