#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "tsnsim/time.hpp"

namespace tsnsim {

/// Event kinds, in tie-break rank order at equal time. State updates (gate
/// changes, completions, shaper wake-ups) must run before the selections and
/// arrivals that read them.
enum class EventKind : std::uint8_t {
  GateChange = 0,
  TransmissionComplete = 1,
  EligibilityReached = 2,
  CreditZeroCrossing = 3,
  FrameArrival = 4,
  SourceWakeup = 5,
  DrrVisit = 6,
};

const char* to_string(EventKind kind);

struct Event {
  SimTime time = 0;
  EventKind kind = EventKind::FrameArrival;
  std::int32_t target = 0;  // component id (port or source index)
  std::uint64_t aux = 0;    // frame id, queue id, ... interpreted per kind
  std::uint64_t seq = 0;    // global issue order, last tie-break
};

using EventHandle = std::uint64_t;

/// Deterministic pending-event set. Total order is (time, kind rank, seq);
/// no two events ever compare equal because seq is unique.
///
/// Cancellation is lazy: the heap keeps a stale copy until popped, but a
/// cancelled event is never delivered and cancel() reports whether the event
/// was still pending.
class EventQueue {
 public:
  /// Schedules an event at t >= now(). Scheduling in the past is a fatal
  /// logic error: it would mean a shaper computed a wake-up behind the clock.
  EventHandle schedule(SimTime time, EventKind kind, std::int32_t target,
                       std::uint64_t aux = 0);

  /// True iff the event had not yet fired nor been cancelled. Cancelled
  /// events never fire.
  bool cancel(EventHandle handle);

  /// Pops the globally least pending event and advances the clock to its
  /// time. Empty queue means end of simulation.
  std::optional<Event> pop_next();

  SimTime now() const { return now_; }
  bool empty() const { return live_.empty(); }
  std::size_t pending() const { return live_.size(); }

  std::uint64_t scheduled_total() const { return scheduled_; }
  std::uint64_t fired_total() const { return fired_; }
  std::uint64_t cancelled_total() const { return cancelled_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.kind != b.kind) return a.kind > b.kind;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::unordered_set<EventHandle> live_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t scheduled_ = 0;
  std::uint64_t fired_ = 0;
  std::uint64_t cancelled_ = 0;
};

}  // namespace tsnsim
