#pragma once

#include <cmath>
#include <cstdint>

#include "tsnsim/time.hpp"

namespace tsnsim {

/// PCG32 (Melissa O'Neill's pcg32, LCG multiplier 6364136223846793005).
/// The stream id selects the LCG increment, so every traffic source gets an
/// independent sequence: identical (seed, stream, draw index) yields the
/// identical value on every platform, and adding or removing a stream never
/// perturbs the others.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32u) | next_u32();
  }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi], inclusive, rejection-debiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    TSNSIM_CHECK(lo <= hi, "uniform_int: empty range");
    const auto bound = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (bound == 0) return static_cast<std::int64_t>(next_u64());  // full range
    const std::uint64_t threshold = (0u - bound) % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return lo + static_cast<std::int64_t>(x % bound);
    }
  }

  /// Exponential holding time with the given rate (events per second), in ns.
  SimTime exponential_ns(double rate_per_s) {
    TSNSIM_CHECK(rate_per_s > 0.0, "exponential rate must be positive");
    const double u = next_double();
    const double seconds = -std::log1p(-u) / rate_per_s;
    return static_cast<SimTime>(std::llround(seconds * 1e9));
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

/// FNV-1a, used to derive per-flow stream ids from flow names so that adding
/// or removing a flow leaves every other flow's draws untouched.
inline std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace tsnsim
