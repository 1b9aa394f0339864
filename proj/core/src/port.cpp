#include "tsnsim/port.hpp"

#include <algorithm>
#include <limits>

namespace tsnsim {

namespace {
constexpr SimTime kNoWake = std::numeric_limits<SimTime>::max();
}

const char* to_string(ForwardingMode mode) {
  switch (mode) {
    case ForwardingMode::StrictPriority: return "sp";
    case ForwardingMode::Fifo: return "fifo";
    case ForwardingMode::Cbs: return "cbs";
    case ForwardingMode::Ats: return "ats";
    case ForwardingMode::Drr: return "drr";
    case ForwardingMode::Tas: return "tas";
  }
  return "?";
}

std::optional<ForwardingMode> parse_mode(const std::string& name) {
  if (name == "sp") return ForwardingMode::StrictPriority;
  if (name == "fifo") return ForwardingMode::Fifo;
  if (name == "cbs") return ForwardingMode::Cbs;
  if (name == "ats") return ForwardingMode::Ats;
  if (name == "drr") return ForwardingMode::Drr;
  if (name == "tas") return ForwardingMode::Tas;
  return std::nullopt;
}

EgressPort::EgressPort(PortConfig cfg, PortScheduler& sched,
                       PortObserver* observer, const std::vector<FlowSpec>* flows)
    : cfg_(std::move(cfg)), sched_(sched), observer_(observer), flows_(flows) {
  TSNSIM_CHECK(!cfg_.queues.empty(), "port needs at least one queue");
  prio_to_queue_.fill(-1);

  std::int64_t slope_sum = 0;
  for (std::size_t i = 0; i < cfg_.queues.size(); ++i) {
    const QueueConfig& qc = cfg_.queues[i];
    TSNSIM_CHECK(qc.priority >= 0 && qc.priority < 8, "queue priority out of range");
    TSNSIM_CHECK(prio_to_queue_[static_cast<std::size_t>(qc.priority)] == -1,
                 "duplicate queue priority on port " + cfg_.link);
    if (i > 0) {
      TSNSIM_CHECK(qc.priority > cfg_.queues[i - 1].priority,
                   "queues must be in ascending priority order");
    }
    prio_to_queue_[static_cast<std::size_t>(qc.priority)] =
        static_cast<std::int8_t>(i);

    QueueRt q;
    q.cfg = qc;
    if (cfg_.mode == ForwardingMode::Cbs && qc.idle_slope_bps > 0) {
      q.cbs.emplace(qc.idle_slope_bps, cfg_.link_rate_bps);
      slope_sum += qc.idle_slope_bps;
    }
    if (cfg_.mode == ForwardingMode::Drr) {
      TSNSIM_CHECK(qc.quantum_bytes >= 1,
                   "drr mode requires a quantum on every queue");
    }
    queues_.push_back(std::move(q));
  }
  TSNSIM_CHECK(slope_sum <= cfg_.link_rate_bps,
               "sum of idleSlopes exceeds link rate on port " + cfg_.link);

  if (cfg_.mode == ForwardingMode::Tas) {
    TSNSIM_CHECK(cfg_.gcl.has_value(), "tas mode requires a gate control list");
    cfg_.gcl->validate();
    if (cfg_.audit_windows) {
      higher_windows_.resize(queues_.size());
      for (std::size_t i = 0; i < queues_.size(); ++i) {
        for (std::size_t j = i + 1; j < queues_.size(); ++j) {
          auto wins = cfg_.gcl->windows_of(queues_[j].cfg.priority);
          higher_windows_[i].insert(higher_windows_[i].end(), wins.begin(),
                                    wins.end());
        }
      }
    }
  }
}

int EgressPort::queue_index(int priority) const {
  if (cfg_.mode == ForwardingMode::Fifo) return 0;
  TSNSIM_CHECK(priority >= 0 && priority < 8, "priority out of range");
  const int qi = prio_to_queue_[static_cast<std::size_t>(priority)];
  TSNSIM_CHECK(qi >= 0, "no queue configured for priority " +
                            std::to_string(priority) + " on port " + cfg_.link);
  return qi;
}

EgressPort::QueueRt& EgressPort::rt(int priority) {
  return queues_[static_cast<std::size_t>(queue_index(priority))];
}
const EgressPort::QueueRt& EgressPort::rt(int priority) const {
  return queues_[static_cast<std::size_t>(queue_index(priority))];
}

std::int64_t EgressPort::backlog_bytes() const {
  std::int64_t sum = 0;
  for (const auto& q : queues_) sum += q.bytes;
  return sum;
}

std::int64_t EgressPort::backlog_frames() const {
  std::int64_t sum = 0;
  for (const auto& q : queues_) sum += q.frames();
  return sum;
}

std::int64_t EgressPort::queue_bytes(int priority) const { return rt(priority).bytes; }
std::int64_t EgressPort::queue_frames(int priority) const { return rt(priority).frames(); }

ScaledBits EgressPort::cbs_credit(int priority) const {
  const QueueRt& q = rt(priority);
  TSNSIM_CHECK(q.cbs.has_value(), "queue has no credit state");
  return q.cbs->credit();
}

std::int64_t EgressPort::drr_deficit(int priority) const {
  return rt(priority).deficit;
}

AtsTokenBucket& EgressPort::bucket_for(std::int32_t flow) {
  auto it = buckets_.find(flow);
  if (it == buckets_.end()) {
    TSNSIM_CHECK(flows_ != nullptr, "ats mode needs the flow table");
    const FlowSpec& spec = (*flows_)[static_cast<std::size_t>(flow)];
    TSNSIM_CHECK(spec.ats.cir_bps > 0 && spec.ats.cbs_bits > 0,
                 "flow " + spec.id + " reaches an ats queue without shaping parameters");
    it = buckets_
             .emplace(flow, AtsTokenBucket(spec.ats.cir_bps, spec.ats.cbs_bits))
             .first;
  }
  return it->second;
}

void EgressPort::sample(SimTime now, const QueueRt& q) {
  if (observer_ != nullptr) {
    observer_->backlog_sample(now, q.cfg.priority, q.bytes, q.frames());
  }
}

void EgressPort::enqueue(Frame frame, SimTime now) {
  const int qi = queue_index(frame.priority);
  QueueRt& q = queues_[static_cast<std::size_t>(qi)];
  frame.enqueued_at = now;

  const bool transmitting_self = busy_ && tx_queue_ == qi;
  if (q.cbs) {
    q.cbs->advance(now, q.phase);
    if (q.empty() && !transmitting_self) q.phase = CbsPhase::Blocked;
  }

  q.bytes += frame.size_bytes;
  if (cfg_.mode == ForwardingMode::Ats && q.cfg.ats_shaped) {
    const SimTime eligible =
        bucket_for(frame.flow).eligibility_for(frame.size_bytes * 8, now);
    q.ats.insert(AtsEntry{eligible, ats_order_++, std::move(frame)});
  } else {
    q.fifo.push_back(std::move(frame));
  }

  if (cfg_.mode == ForwardingMode::Drr && !q.in_ring) {
    ring_.push_back(qi);
    q.in_ring = true;
  }

  sample(now, q);
  if (!busy_) try_select(now);
}

const Frame* EgressPort::peek_head(const QueueRt& q) const {
  if (!q.fifo.empty()) return &q.fifo.front();
  if (!q.ats.empty()) return &q.ats.begin()->frame;
  return nullptr;
}

Frame EgressPort::pop_head(QueueRt& q) {
  if (!q.fifo.empty()) {
    Frame f = std::move(q.fifo.front());
    q.fifo.pop_front();
    q.bytes -= f.size_bytes;
    return f;
  }
  TSNSIM_CHECK(!q.ats.empty(), "pop from empty queue");
  Frame f = q.ats.begin()->frame;
  q.ats.erase(q.ats.begin());
  q.bytes -= f.size_bytes;
  return f;
}

int EgressPort::drr_walk(SimTime now) {
  (void)now;
  if (ring_.empty()) return -1;
  // Bounded by the rounds needed to accumulate one max-size frame.
  for (std::uint64_t guard = 0;; ++guard) {
    TSNSIM_CHECK(guard < (1u << 24), "drr walk does not progress");
    const int qi = ring_.front();
    QueueRt& q = queues_[static_cast<std::size_t>(qi)];
    TSNSIM_CHECK(!q.empty(), "empty queue left in drr ring");
    if (!quantum_added_) {
      q.deficit += q.cfg.quantum_bytes;
      quantum_added_ = true;
      ++audit_.drr_quantum_adds;
      audit_.drr_max_deficit = std::max(audit_.drr_max_deficit, q.deficit);
    }
    if (q.fifo.front().size_bytes <= q.deficit) return qi;
    // Deficit insufficient: keep it and move to the next queue in the ring.
    ring_.pop_front();
    ring_.push_back(qi);
    quantum_added_ = false;
  }
}

void EgressPort::try_select(SimTime now) {
  if (busy_) return;

  int chosen = -1;
  SimTime wake = kNoWake;
  EventKind wake_kind = EventKind::GateChange;

  switch (cfg_.mode) {
    case ForwardingMode::StrictPriority:
    case ForwardingMode::Fifo: {
      for (int qi = static_cast<int>(queues_.size()) - 1; qi >= 0; --qi) {
        if (!queues_[static_cast<std::size_t>(qi)].empty()) {
          chosen = qi;
          break;
        }
      }
      break;
    }
    case ForwardingMode::Cbs: {
      for (int qi = static_cast<int>(queues_.size()) - 1; qi >= 0; --qi) {
        QueueRt& q = queues_[static_cast<std::size_t>(qi)];
        if (q.empty()) continue;
        if (!q.cbs) {
          chosen = qi;
          break;
        }
        q.cbs->advance(now, q.phase);
        if (q.cbs->eligible()) {
          chosen = qi;
          break;
        }
        const SimTime cross = q.cbs->zero_crossing();
        if (cross < wake) {
          wake = cross;
          wake_kind = EventKind::CreditZeroCrossing;
        }
      }
      break;
    }
    case ForwardingMode::Ats: {
      for (int qi = static_cast<int>(queues_.size()) - 1; qi >= 0; --qi) {
        QueueRt& q = queues_[static_cast<std::size_t>(qi)];
        if (q.empty()) continue;
        if (!q.cfg.ats_shaped) {
          chosen = qi;
          break;
        }
        const SimTime eligible = q.ats.begin()->eligible;
        if (eligible <= now) {
          chosen = qi;
          break;
        }
        if (eligible < wake) {
          wake = eligible;
          wake_kind = EventKind::EligibilityReached;
        }
      }
      break;
    }
    case ForwardingMode::Drr: {
      chosen = drr_walk(now);
      break;
    }
    case ForwardingMode::Tas: {
      for (int qi = static_cast<int>(queues_.size()) - 1; qi >= 0; --qi) {
        QueueRt& q = queues_[static_cast<std::size_t>(qi)];
        if (q.empty()) continue;
        const SimTime tx = tx_time(*peek_head(q));
        if (cfg_.gcl->can_start(q.cfg.priority, now, tx)) {
          chosen = qi;
          break;
        }
        const SimTime next = cfg_.gcl->next_can_start(q.cfg.priority, now, tx);
        if (next >= 0 && next < wake) {
          wake = next;
          wake_kind = EventKind::GateChange;
        }
      }
      break;
    }
  }

  if (chosen >= 0) {
    start_tx(chosen, now);
    return;
  }

  if (backlog_frames() > 0) {
    switch (cfg_.mode) {
      case ForwardingMode::StrictPriority:
      case ForwardingMode::Fifo:
      case ForwardingMode::Drr:
        ++audit_.work_conservation_violations;
        break;
      default:
        if (idle_backlog_since_ < 0) idle_backlog_since_ = now;
        break;
    }
  }

  if (wake != kNoWake) {
    set_wakeup(wake, wake_kind);
  } else {
    clear_wakeup();
  }
}

void EgressPort::start_tx(int qi, SimTime now) {
  QueueRt& q = queues_[static_cast<std::size_t>(qi)];
  Frame frame = pop_head(q);

  if (q.cbs) {
    q.cbs->advance(now, q.phase);
    q.phase = CbsPhase::Transmitting;
  }

  const SimTime tx = tx_time(frame);
  if (cfg_.mode == ForwardingMode::Tas && cfg_.audit_windows) {
    check_window_overlap(qi, now, now + tx);
  }
  if (observer_ != nullptr) {
    observer_->tx_start(now, frame, now - frame.enqueued_at);
  }
  sample(now, q);

  if (idle_backlog_since_ >= 0) {
    if (now > idle_backlog_since_) {
      ++audit_.idle_backlog_intervals;
      audit_.idle_backlog_time += now - idle_backlog_since_;
    }
    idle_backlog_since_ = -1;
  }

  busy_ = true;
  tx_queue_ = qi;
  in_flight_ = std::move(frame);
  sched_.schedule_port_event(now + tx, EventKind::TransmissionComplete);
  clear_wakeup();
}

Frame EgressPort::complete_transmission(SimTime now) {
  TSNSIM_CHECK(busy_, "completion without transmission");
  QueueRt& q = queues_[static_cast<std::size_t>(tx_queue_)];

  if (q.cbs) {
    q.cbs->advance(now, CbsPhase::Transmitting);
    if (q.empty()) {
      q.cbs->on_queue_emptied();
      q.phase = CbsPhase::IdleEmpty;
    } else {
      q.phase = CbsPhase::Blocked;
    }
  }

  if (cfg_.mode == ForwardingMode::Drr) {
    q.deficit -= in_flight_.size_bytes;
    TSNSIM_CHECK(q.deficit >= 0, "drr deficit went negative");
    TSNSIM_CHECK(!ring_.empty() && ring_.front() == tx_queue_,
                 "drr ring out of step");
    if (q.empty()) {
      q.deficit = 0;
      q.in_ring = false;
      ring_.pop_front();
      quantum_added_ = false;
    }
  }

  busy_ = false;
  tx_queue_ = -1;
  Frame out = std::move(in_flight_);
  try_select(now);
  return out;
}

void EgressPort::wakeup(SimTime now) {
  wakeup_pending_ = false;
  if (!busy_) try_select(now);
}

void EgressPort::set_wakeup(SimTime t, EventKind kind) {
  if (wakeup_pending_ && wakeup_time_ == t && wakeup_kind_ == kind) return;
  clear_wakeup();
  wakeup_handle_ = sched_.schedule_port_event(t, kind);
  wakeup_pending_ = true;
  wakeup_time_ = t;
  wakeup_kind_ = kind;
}

void EgressPort::clear_wakeup() {
  if (!wakeup_pending_) return;
  sched_.cancel_event(wakeup_handle_);
  wakeup_pending_ = false;
}

void EgressPort::check_window_overlap(int qi, SimTime start, SimTime end) {
  const auto& windows = higher_windows_[static_cast<std::size_t>(qi)];
  if (windows.empty()) return;
  const SimTime cycle = cfg_.gcl->cycle;
  for (const GclWindow& w : windows) {
    // Compare against the window instances around the transmission interval.
    const SimTime k = (start - w.open) / cycle;
    for (SimTime inst = k - 1; inst <= k + 1; ++inst) {
      const SimTime open = w.open + inst * cycle;
      const SimTime close = w.close + inst * cycle;
      if (open < end && start < close) {
        ++audit_.window_overlaps;
        return;
      }
    }
  }
}

}  // namespace tsnsim
