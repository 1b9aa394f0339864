#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsnsim/ats.hpp"
#include "tsnsim/cbs.hpp"
#include "tsnsim/event_queue.hpp"
#include "tsnsim/frame.hpp"
#include "tsnsim/gcl.hpp"
#include "tsnsim/traffic.hpp"

namespace tsnsim {

enum class ForwardingMode : std::uint8_t { StrictPriority, Fifo, Cbs, Ats, Drr, Tas };

const char* to_string(ForwardingMode mode);
std::optional<ForwardingMode> parse_mode(const std::string& name);

struct QueueConfig {
  int priority = 0;
  std::int64_t idle_slope_bps = 0;  // > 0: CBS-shaped queue
  std::int64_t quantum_bytes = 0;   // > 0 required for every queue in Drr mode
  bool ats_shaped = false;          // Ats mode: frames carry per-flow eligibility
};

struct PortConfig {
  std::string node;  // owning node id
  std::string link;  // link label, e.g. "sw->sink"
  std::int64_t link_rate_bps = 100'000'000;
  ForwardingMode mode = ForwardingMode::StrictPriority;
  std::vector<QueueConfig> queues;  // ascending priority
  std::int64_t overhead_bytes = 0;  // per-frame wire overhead
  std::optional<GateControlList> gcl;  // Tas mode
  bool audit_windows = false;  // Tas: flag transmissions overlapping higher windows
};

/// Kernel access handed to a port; the engine binds the port identity.
class PortScheduler {
 public:
  virtual ~PortScheduler() = default;
  virtual EventHandle schedule_port_event(SimTime t, EventKind kind) = 0;
  virtual bool cancel_event(EventHandle handle) = 0;
};

class PortObserver {
 public:
  virtual ~PortObserver() = default;
  virtual void backlog_sample(SimTime /*t*/, int /*priority*/,
                              std::int64_t /*bytes*/, std::int64_t /*frames*/) {}
  virtual void tx_start(SimTime /*t*/, const Frame& /*frame*/,
                        SimTime /*waited*/) {}
};

/// Always-on counters for the work-conservation and gate audits.
struct PortAudit {
  std::uint64_t work_conservation_violations = 0;  // SP/FIFO/DRR only; must stay 0
  std::uint64_t idle_backlog_intervals = 0;        // CBS/ATS/TAS shaping idles
  SimTime idle_backlog_time = 0;
  std::uint64_t window_overlaps = 0;  // TAS: transmissions into higher windows
  std::uint64_t drr_quantum_adds = 0;
  std::int64_t drr_max_deficit = 0;
};

/// A TSN egress port: up to eight priority queues, a per-queue transmission
/// selection algorithm, optional time gates, and strict priority among the
/// queues that are ready. Non-preemptive: a started frame always finishes.
class EgressPort {
 public:
  EgressPort(PortConfig cfg, PortScheduler& sched, PortObserver* observer,
             const std::vector<FlowSpec>* flows);

  /// Frame arrival. Appends to the frame's priority queue (eligibility-ordered
  /// in ATS mode) and kicks transmission selection if the link is idle.
  void enqueue(Frame frame, SimTime now);

  /// The engine calls this when the scheduled TransmissionComplete fires;
  /// returns the transmitted frame for delivery to the next hop.
  Frame complete_transmission(SimTime now);

  /// Shaper/gate wake-up (CreditZeroCrossing, EligibilityReached, GateChange).
  void wakeup(SimTime now);

  bool busy() const { return busy_; }
  std::int64_t backlog_bytes() const;
  std::int64_t backlog_frames() const;
  std::int64_t queue_bytes(int priority) const;
  std::int64_t queue_frames(int priority) const;
  ScaledBits cbs_credit(int priority) const;
  std::int64_t drr_deficit(int priority) const;
  const PortAudit& audit() const { return audit_; }
  const PortConfig& config() const { return cfg_; }

  SimTime tx_time(const Frame& f) const {
    return transmission_time(f.size_bytes, cfg_.link_rate_bps, cfg_.overhead_bytes);
  }

 private:
  struct AtsEntry {
    SimTime eligible = 0;
    std::uint64_t order = 0;  // arrival order at this port
    Frame frame;
    bool operator<(const AtsEntry& o) const {
      if (eligible != o.eligible) return eligible < o.eligible;
      return order < o.order;
    }
  };

  struct QueueRt {
    QueueConfig cfg;
    std::deque<Frame> fifo;
    std::set<AtsEntry> ats;
    std::optional<CbsCredit> cbs;
    CbsPhase phase = CbsPhase::IdleEmpty;
    std::int64_t deficit = 0;
    bool in_ring = false;
    std::int64_t bytes = 0;

    bool empty() const { return fifo.empty() && ats.empty(); }
    std::int64_t frames() const {
      return static_cast<std::int64_t>(fifo.size() + ats.size());
    }
  };

  int queue_index(int priority) const;
  QueueRt& rt(int priority);
  const QueueRt& rt(int priority) const;
  AtsTokenBucket& bucket_for(std::int32_t flow);
  void try_select(SimTime now);
  int drr_walk(SimTime now);
  void start_tx(int qi, SimTime now);
  Frame pop_head(QueueRt& q);
  const Frame* peek_head(const QueueRt& q) const;
  void set_wakeup(SimTime t, EventKind kind);
  void clear_wakeup();
  void sample(SimTime now, const QueueRt& q);
  void check_window_overlap(int priority, SimTime start, SimTime end);

  PortConfig cfg_;
  PortScheduler& sched_;
  PortObserver* observer_;
  const std::vector<FlowSpec>* flows_;

  std::vector<QueueRt> queues_;  // ascending priority
  std::array<std::int8_t, 8> prio_to_queue_;

  bool busy_ = false;
  int tx_queue_ = -1;
  Frame in_flight_;

  bool wakeup_pending_ = false;
  EventHandle wakeup_handle_ = 0;
  SimTime wakeup_time_ = 0;
  EventKind wakeup_kind_ = EventKind::GateChange;

  std::deque<int> ring_;         // Drr: active queue indices, service order
  bool quantum_added_ = false;   // for the current ring front visit

  std::unordered_map<std::int32_t, AtsTokenBucket> buckets_;
  std::uint64_t ats_order_ = 0;

  std::vector<std::vector<GclWindow>> higher_windows_;  // per queue, Tas audit

  SimTime idle_backlog_since_ = -1;
  PortAudit audit_;
};

}  // namespace tsnsim
