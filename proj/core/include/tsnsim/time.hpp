#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tsnsim {

/// Simulation time in integer nanoseconds. One tick = 1 ns keeps every
/// transmission time at 100 Mbit/s exact (one byte takes 80 ns).
using SimTime = std::int64_t;

inline constexpr SimTime kTicksPerSecond = 1'000'000'000;

/// Shaper state (CBS credit, ATS tokens) in scaled bits: 1 bit = 1e9 units.
/// rate_bps * delta_ns lands directly in this unit, so credit and token
/// evolution stays exact integer arithmetic for any integer bit rate.
using ScaledBits = std::int64_t;

inline constexpr ScaledBits kScaledPerBit = 1'000'000'000;

[[noreturn]] inline void fail(const std::string& msg) {
  throw std::logic_error(msg);
}

#define TSNSIM_CHECK(cond, msg) \
  do {                          \
    if (!(cond)) ::tsnsim::fail(msg); \
  } while (0)

inline std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  TSNSIM_CHECK(den > 0 && num >= 0, "ceil_div domain");
  return (num + den - 1) / den;
}

/// Wire time of a frame: ceil((bytes + overhead) * 8 / rate), in ns.
inline SimTime transmission_time(std::int64_t size_bytes, std::int64_t rate_bps,
                                 std::int64_t overhead_bytes = 0) {
  TSNSIM_CHECK(rate_bps > 0, "link rate must be positive");
  const __int128 bit_ns =
      static_cast<__int128>(size_bytes + overhead_bytes) * 8 * kTicksPerSecond;
  return static_cast<SimTime>((bit_ns + rate_bps - 1) / rate_bps);
}

}  // namespace tsnsim
