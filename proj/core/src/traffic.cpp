#include "tsnsim/traffic.hpp"

namespace tsnsim {

std::int64_t SizeDist::sample(RngStream& rng) const {
  if (fixed()) return min_bytes;
  return rng.uniform_int(min_bytes, max_bytes);
}

std::vector<FlowArrival> det_next_burst(const DetBurstSpec& spec,
                                        std::int64_t n, RngStream& rng) {
  TSNSIM_CHECK(spec.burst_len >= 1, "burst_len must be >= 1");
  std::vector<FlowArrival> burst;
  burst.reserve(static_cast<std::size_t>(spec.burst_len));
  const SimTime start = spec.offset + n * spec.period;
  for (std::int64_t j = 0; j < spec.burst_len; ++j) {
    burst.push_back({start + j * spec.spacing, spec.size.sample(rng)});
  }
  return burst;
}

FlowArrival mmpp_step(MmppState& state, const MmppSpec& spec, RngStream& rng) {
  SimTime elapsed = 0;
  for (;;) {
    const bool fast = state.phase == MmppState::Phase::Fast;
    const double arrival_rate = fast ? spec.rate_fast_per_s : spec.rate_slow_per_s;
    const double switch_rate = fast ? spec.to_slow_per_s : spec.to_fast_per_s;

    const SimTime to_arrival = rng.exponential_ns(arrival_rate);
    if (switch_rate <= 0.0) {
      elapsed += to_arrival;
      return {elapsed, spec.size.sample(rng)};
    }
    const SimTime to_switch = rng.exponential_ns(switch_rate);
    if (to_arrival <= to_switch) {
      elapsed += to_arrival;
      return {elapsed, spec.size.sample(rng)};
    }
    elapsed += to_switch;
    state.phase = fast ? MmppState::Phase::Slow : MmppState::Phase::Fast;
  }
}

std::int64_t FlowSpec::max_frame_bits() const {
  if (const auto* det = std::get_if<DetBurstSpec>(&source)) {
    return det->size.max_bytes * 8;
  }
  return std::get<MmppSpec>(source).size.max_bytes * 8;
}

double FlowSpec::implied_rate_bps() const {
  if (const auto* det = std::get_if<DetBurstSpec>(&source)) {
    if (det->period <= 0) return 0.0;
    const double mean_size =
        0.5 * static_cast<double>(det->size.min_bytes + det->size.max_bytes);
    const double bits_per_period =
        static_cast<double>(det->burst_len) * mean_size * 8.0;
    return bits_per_period * 1e9 / static_cast<double>(det->period);
  }
  const auto& mmpp = std::get<MmppSpec>(source);
  const double mean_size =
      0.5 * static_cast<double>(mmpp.size.min_bytes + mmpp.size.max_bytes);
  return mmpp.mean_rate_per_s() * mean_size * 8.0;
}

}  // namespace tsnsim
