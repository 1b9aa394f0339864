#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "tsnsim/gcl.hpp"
#include "tsnsim/topology.hpp"
#include "tsnsim/traffic.hpp"

namespace tsnsim {

class SynthesisError : public std::runtime_error {
 public:
  SynthesisError(std::string flow, const std::string& why)
      : std::runtime_error("gcl synthesis failed at flow '" + flow + "': " + why),
        flow_id(std::move(flow)) {}
  std::string flow_id;
};

struct SynthResult {
  SimTime hyperperiod = 0;
  SimTime guard_band = 0;
  std::map<std::int32_t, GateControlList> gcls;  // link index -> schedule
  std::map<std::int32_t, SimTime> offsets;       // flow index -> source offset
};

/// No-wait first-fit schedule for the periodic flows above the BE priority.
///
/// Each scheduled flow gets one source offset; its burst is paced back to
/// back, so hop h of instance n occupies [offset + n*period + h*tx,
/// ... + burst_len*tx) and no two scheduled frames ever contend at a port.
/// Gate bits of scheduled priorities open exactly during their windows;
/// every other queue is open in the complement. Fails listing the first
/// flow that cannot be placed, or when windows plus guard bands fill a
/// cycle completely.
SynthResult synthesize_no_wait(const Topology& topo,
                               const std::vector<FlowSpec>& flows,
                               int be_priority,
                               std::int64_t max_interfering_bytes);

}  // namespace tsnsim
