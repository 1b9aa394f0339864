#pragma once

#include <cstdint>

#include "tsnsim/time.hpp"

namespace tsnsim {

/// Per-flow token bucket emulation. Tokens replenish at cir (bits/s) up to
/// cbs (bits); a frame of L bits becomes eligible at the earliest instant at
/// or after its arrival when L tokens are available, and the tokens are
/// debited at that instant. Per-flow eligibility times are non-decreasing,
/// so frames of one flow never reorder.
class AtsTokenBucket {
 public:
  AtsTokenBucket(std::int64_t cir_bps, std::int64_t cbs_bits)
      : cir_(cir_bps),
        cbs_scaled_(cbs_bits * kScaledPerBit),
        tokens_(cbs_bits * kScaledPerBit) {
    TSNSIM_CHECK(cir_bps > 0, "cir must be positive");
    TSNSIM_CHECK(cbs_bits > 0, "cbs must be positive");
  }

  /// Assigns the eligibility time for a frame of frame_bits arriving at
  /// `arrival` and debits the bucket. Frames larger than cbs can never
  /// become eligible; callers must reject them at configuration time.
  SimTime eligibility_for(std::int64_t frame_bits, SimTime arrival) {
    const ScaledBits need = frame_bits * kScaledPerBit;
    TSNSIM_CHECK(need <= cbs_scaled_, "frame larger than committed burst size");

    // Earliest fill time measured from the last debit instant.
    SimTime ready = last_;
    if (tokens_ < need) ready += ceil_div(need - tokens_, cir_);

    const SimTime eligible = ready > arrival ? ready : arrival;
    refill_to(eligible);
    tokens_ -= need;
    last_ = eligible;
    return eligible;
  }

  ScaledBits tokens_at(SimTime t) const {
    TSNSIM_CHECK(t >= last_, "token query behind bucket clock");
    const SimTime dt = t - last_;
    if (dt >= ceil_div(cbs_scaled_ - tokens_, cir_)) return cbs_scaled_;
    const ScaledBits grown = tokens_ + cir_ * dt;
    return grown > cbs_scaled_ ? cbs_scaled_ : grown;
  }

  ScaledBits cbs_scaled() const { return cbs_scaled_; }

 private:
  void refill_to(SimTime t) {
    tokens_ = tokens_at(t);
    last_ = t;
  }

  std::int64_t cir_;
  ScaledBits cbs_scaled_;
  ScaledBits tokens_;
  SimTime last_ = 0;
};

}  // namespace tsnsim
