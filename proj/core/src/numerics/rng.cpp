#include "ue/numerics/rng.hpp"

#include <cmath>

#include "ue/error.hpp"
#include "ue/numerics/special.hpp"

namespace ue {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), key_(mix64(seed + kGolden)) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv; }

double RngStream::uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * kTwoPow53Inv; }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw PreconditionError("RngStream::uniform_index: empty range");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * kPi * uniform();
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

RngStream RngStream::split(std::uint64_t index) const { return RngStream(derive_seed(seed_, index)); }

}  // namespace ue
