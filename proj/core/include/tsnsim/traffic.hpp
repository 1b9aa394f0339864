#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tsnsim/rng.hpp"
#include "tsnsim/time.hpp"

namespace tsnsim {

/// Packet size distribution: a fixed value or a uniform integer range,
/// bounds inclusive.
struct SizeDist {
  std::int64_t min_bytes = 0;
  std::int64_t max_bytes = 0;

  bool fixed() const { return min_bytes == max_bytes; }
  std::int64_t sample(RngStream& rng) const;

  static SizeDist fixed_bytes(std::int64_t b) { return {b, b}; }
  static SizeDist uniform_bytes(std::int64_t lo, std::int64_t hi) {
    return {lo, hi};
  }
};

/// Periodic source: a burst of burst_len frames every period, first burst at
/// offset. Burst frames share one arrival instant unless spacing > 0, in
/// which case frame j is emitted at offset + n*period + j*spacing (used by
/// the time-aware mode, where end stations serialize their bursts on the
/// schedule).
struct DetBurstSpec {
  SimTime period = 0;
  SimTime offset = 0;
  std::int64_t burst_len = 1;
  SizeDist size;
  SimTime spacing = 0;
};

/// Two-state MMPP: Poisson arrivals whose rate switches between a fast and a
/// slow phase. Transition rates are per second into the named phase.
struct MmppSpec {
  double to_fast_per_s = 0;  // slow -> fast
  double to_slow_per_s = 0;  // fast -> slow
  double rate_fast_per_s = 0;
  double rate_slow_per_s = 0;
  SizeDist size;

  double stationary_fast() const {
    return to_fast_per_s / (to_fast_per_s + to_slow_per_s);
  }
  double mean_rate_per_s() const {
    const double pf = stationary_fast();
    return pf * rate_fast_per_s + (1.0 - pf) * rate_slow_per_s;
  }
};

struct MmppState {
  enum class Phase { Fast, Slow };
  Phase phase = Phase::Slow;
};

struct FlowArrival {
  SimTime time = 0;
  std::int64_t size_bytes = 0;
};

/// The n-th burst of a deterministic source. Sizes are drawn in emission
/// order so the sequence is reproducible per (seed, stream).
std::vector<FlowArrival> det_next_burst(const DetBurstSpec& spec,
                                        std::int64_t n, RngStream& rng);

/// Advances one MMPP arrival: inter-arrival drawn at the current phase's
/// rate, with phase switches as a competing exponential clock (switches do
/// not emit frames). Returns the elapsed time to the arrival.
FlowArrival mmpp_step(MmppState& state, const MmppSpec& spec, RngStream& rng);

/// ATS shaping parameters carried by a flow.
struct AtsParams {
  std::int64_t cir_bps = 0;
  std::int64_t cbs_bits = 0;
};

struct FlowSpec {
  std::int32_t index = 0;
  std::string id;
  std::string cls;  // free-form label; lowest priority flows form the BE class
  int priority = 0;
  std::variant<DetBurstSpec, MmppSpec> source;
  std::vector<std::int32_t> route;  // link indices, in traversal order
  AtsParams ats;
  std::uint64_t stream = 0;  // rng stream id, derived from the flow id

  bool deterministic() const {
    return std::holds_alternative<DetBurstSpec>(source);
  }
  /// Largest frame this flow can emit, in bits.
  std::int64_t max_frame_bits() const;
  /// Long-term offered rate implied by the primitive parameters, bits/s.
  double implied_rate_bps() const;
};

}  // namespace tsnsim
