#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "tsnsim/event_queue.hpp"
#include "tsnsim/metrics.hpp"
#include "tsnsim/port.hpp"
#include "tsnsim/topology.hpp"
#include "tsnsim/traffic.hpp"

namespace tsnsim {

struct SimConfig {
  Topology topo;  // egress PortConfigs fully resolved
  std::vector<FlowSpec> flows;
  SimTime duration = 0;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 1;
  std::uint64_t scenario_hash = 0;
  SimTime processing_delay = 0;  // store-and-forward hop delay at switches
  bool trace_hops = false;
};

/// One deterministic run: single-threaded event loop over [0, duration).
/// Frames still queued, on the wire or at a not-yet-fired arrival when the
/// horizon is reached count as in-system; nothing is lost or duplicated.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg);
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  MetricSeries run();

  const EgressPort& port(std::int32_t link) const { return *ports_[static_cast<std::size_t>(link)]; }
  const EventQueue& kernel() const { return queue_; }

 private:
  struct DetSourceState {
    std::int64_t burst = 0;
    std::int64_t next_in_burst = 0;
    std::vector<FlowArrival> pending;
  };
  struct MmppSourceState {
    MmppState mmpp;
    std::int64_t pending_size = 0;
  };
  struct SourceState {
    RngStream rng;
    DetSourceState det;
    MmppSourceState mmpp;
    std::uint64_t next_seq = 0;
  };

  struct Binding;  // PortScheduler/PortObserver adapter per port

  void prime_sources();
  void on_source_wakeup(std::int32_t flow, SimTime now);
  void schedule_mmpp(std::int32_t flow, SimTime now);
  void emit(std::int32_t flow, SimTime now, std::int64_t size_bytes);
  void on_complete(std::int32_t link, SimTime now);
  void forward(Frame frame, SimTime now);

  SimConfig cfg_;
  EventQueue queue_;
  std::vector<std::unique_ptr<Binding>> bindings_;
  std::vector<std::unique_ptr<EgressPort>> ports_;
  std::vector<SourceState> sources_;
  std::unordered_map<std::uint64_t, Frame> parked_;  // frames in FrameArrival flight
  MetricSeries series_;
  std::uint64_t next_frame_id_ = 0;
  std::uint64_t next_park_ = 0;
};

/// Convenience wrapper used by tests and the sweep runner.
MetricSeries run_simulation(SimConfig cfg);

}  // namespace tsnsim
