#pragma once

// Independent reference implementations used to check the production
// shapers. These deliberately share no code with core/: the credit oracle
// integrates a piecewise-linear trace, the token bucket works in exact
// scaled arithmetic, and the DRR reference is the textbook byte-deficit
// loop driven by arrival times.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "tsnsim/time.hpp"

namespace tsnsim::oracle {

enum class CbsPhaseRef { IdleEmpty, Blocked, Transmitting };

struct CbsSegment {
  SimTime duration = 0;
  CbsPhaseRef phase = CbsPhaseRef::IdleEmpty;
  bool queue_empties_at_end = false;  // apply the positive-credit reset
};

/// Integrates credit (scaled bits) over the segments.
inline std::vector<ScaledBits> cbs_credit_trace(
    std::int64_t idle_slope_bps, std::int64_t link_rate_bps,
    const std::vector<CbsSegment>& segments) {
  std::vector<ScaledBits> out;
  ScaledBits credit = 0;
  const std::int64_t send_slope = idle_slope_bps - link_rate_bps;
  for (const CbsSegment& seg : segments) {
    switch (seg.phase) {
      case CbsPhaseRef::Blocked:
        credit += idle_slope_bps * seg.duration;
        break;
      case CbsPhaseRef::Transmitting:
        credit += send_slope * seg.duration;
        break;
      case CbsPhaseRef::IdleEmpty:
        if (credit < 0) {
          credit += idle_slope_bps * seg.duration;
          if (credit > 0) credit = 0;
        }
        break;
    }
    if (seg.queue_empties_at_end && credit > 0) credit = 0;
    out.push_back(credit);
  }
  return out;
}

/// Token bucket reference: earliest eligibility per frame, exact arithmetic.
class TokenBucketRef {
 public:
  TokenBucketRef(std::int64_t cir_bps, std::int64_t cbs_bits)
      : cir_(cir_bps), cap_(cbs_bits * kScaledPerBit), tokens_(cap_) {}

  SimTime eligibility(std::int64_t frame_bits, SimTime arrival) {
    const ScaledBits need = frame_bits * kScaledPerBit;
    SimTime t = arrival > clock_ ? arrival : clock_;
    // Tokens at t.
    ScaledBits at = tokens_ + cir_ * (t - clock_);
    if (at > cap_) at = cap_;
    if (at < need) {
      const SimTime wait = (need - at + cir_ - 1) / cir_;
      t += wait;
      at += cir_ * wait;
      if (at > cap_) at = cap_;
    }
    tokens_ = at - need;
    clock_ = t;
    return t;
  }

 private:
  std::int64_t cir_;
  ScaledBits cap_;
  ScaledBits tokens_;
  SimTime clock_ = 0;
};

struct DrrFrameRef {
  SimTime arrival = 0;
  int queue = 0;
  std::int64_t bytes = 0;
  int tag = 0;  // caller-assigned identity
};

/// Textbook deficit round robin over timed arrivals: when the round-robin
/// pointer reaches a non-empty queue it adds the quantum once, serves head
/// frames while the deficit suffices, then saves the deficit and moves on.
/// Queues join the active list in arrival order and leave it (deficit reset)
/// when drained. Returns frame tags in transmission order.
inline std::vector<int> drr_reference_order(std::vector<DrrFrameRef> frames,
                                            const std::vector<std::int64_t>& quanta,
                                            std::int64_t rate_bps) {
  std::stable_sort(frames.begin(), frames.end(),
                   [](const DrrFrameRef& a, const DrrFrameRef& b) {
                     return a.arrival < b.arrival;
                   });
  const std::size_t n_queues = quanta.size();
  std::vector<std::deque<DrrFrameRef>> queues(n_queues);
  std::vector<std::int64_t> deficit(n_queues, 0);
  std::vector<bool> active(n_queues, false);
  std::deque<std::size_t> ring;
  std::vector<int> order;

  std::size_t next_arrival = 0;
  SimTime now = 0;
  auto admit_until = [&](SimTime t) {
    while (next_arrival < frames.size() && frames[next_arrival].arrival <= t) {
      const DrrFrameRef& f = frames[next_arrival];
      const auto q = static_cast<std::size_t>(f.queue);
      queues[q].push_back(f);
      if (!active[q]) {
        active[q] = true;
        ring.push_back(q);
      }
      ++next_arrival;
    }
  };

  admit_until(0);
  bool fresh_visit = true;
  while (order.size() < frames.size()) {
    if (ring.empty()) {
      now = frames[next_arrival].arrival;
      admit_until(now);
      fresh_visit = true;
      continue;
    }
    const std::size_t q = ring.front();
    if (fresh_visit) {
      deficit[q] += quanta[q];
      fresh_visit = false;
    }
    if (!queues[q].empty() && queues[q].front().bytes <= deficit[q]) {
      const DrrFrameRef f = queues[q].front();
      queues[q].pop_front();
      order.push_back(f.tag);
      now += (f.bytes * 8 * kTicksPerSecond + rate_bps - 1) / rate_bps;
      deficit[q] -= f.bytes;
      admit_until(now);
      if (queues[q].empty()) {
        deficit[q] = 0;
        active[q] = false;
        ring.pop_front();
        fresh_visit = true;
      }
      continue;
    }
    ring.pop_front();
    ring.push_back(q);
    fresh_visit = true;
  }
  return order;
}

}  // namespace tsnsim::oracle
