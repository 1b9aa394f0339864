#pragma once

#include <cstdint>

#include "tsnsim/time.hpp"

namespace tsnsim {

/// Observable queue state driving the credit slope.
enum class CbsPhase : std::uint8_t {
  IdleEmpty,     // no queued frame, none in transmission
  Blocked,       // backlogged but not transmitting (link busy or credit < 0)
  Transmitting,  // this queue's frame occupies the link
};

/// Credit-based shaper state for one queue. Credit rises at idleSlope while
/// the queue is backlogged and not transmitting, falls at
/// sendSlope = idleSlope - linkrate during its own transmissions, and is
/// reset to zero when the queue empties with positive credit. An empty queue
/// with negative credit recovers at idleSlope up to zero.
///
/// Credit is exact: stored in scaled bits (1 bit = 1e9) so slope * delta_ns
/// needs no rounding.
class CbsCredit {
 public:
  CbsCredit(std::int64_t idle_slope_bps, std::int64_t link_rate_bps)
      : idle_slope_(idle_slope_bps), send_slope_(idle_slope_bps - link_rate_bps) {
    TSNSIM_CHECK(idle_slope_bps > 0 && idle_slope_bps <= link_rate_bps,
                 "idleSlope must be in (0, linkrate]");
  }

  /// Integrates the credit from the last update to `to` under `phase`.
  void advance(SimTime to, CbsPhase phase) {
    TSNSIM_CHECK(to >= last_, "credit update going backwards");
    const SimTime dt = to - last_;
    last_ = to;
    if (dt == 0) return;
    switch (phase) {
      case CbsPhase::Blocked:
        credit_ += idle_slope_ * dt;
        break;
      case CbsPhase::Transmitting:
        credit_ += send_slope_ * dt;
        break;
      case CbsPhase::IdleEmpty:
        if (credit_ < 0) {
          credit_ += idle_slope_ * dt;
          if (credit_ > 0) credit_ = 0;
        }
        break;
    }
  }

  /// Reset rule: leftover positive credit is dropped when the queue empties.
  void on_queue_emptied() {
    if (credit_ > 0) credit_ = 0;
  }

  /// Frames may start transmission at credit >= 0; zero is eligible.
  bool eligible() const { return credit_ >= 0; }

  /// Time at which a negative credit reaches zero under the Blocked slope.
  SimTime zero_crossing() const {
    TSNSIM_CHECK(credit_ < 0, "no crossing pending");
    return last_ + ceil_div(-credit_, idle_slope_);
  }

  ScaledBits credit() const { return credit_; }
  SimTime last_update() const { return last_; }
  std::int64_t idle_slope_bps() const { return idle_slope_; }
  std::int64_t send_slope_bps() const { return send_slope_; }

 private:
  std::int64_t idle_slope_;
  std::int64_t send_slope_;
  ScaledBits credit_ = 0;
  SimTime last_ = 0;
};

}  // namespace tsnsim
