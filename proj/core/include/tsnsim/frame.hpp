#pragma once

#include <cstdint>

#include "tsnsim/time.hpp"

namespace tsnsim {

struct Frame {
  std::uint64_t id = 0;        // global emission order
  std::int32_t flow = 0;       // flow index
  std::uint64_t flow_seq = 0;  // per-flow emission index
  int priority = 0;
  std::int64_t size_bytes = 0;
  SimTime emitted = 0;      // source emission instant
  SimTime enqueued_at = 0;  // arrival at the current egress queue
  int hop = 0;              // progress along the flow's route
};

}  // namespace tsnsim
