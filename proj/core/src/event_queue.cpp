#include "tsnsim/event_queue.hpp"

#include <string>

namespace tsnsim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::GateChange: return "GateChange";
    case EventKind::TransmissionComplete: return "TransmissionComplete";
    case EventKind::EligibilityReached: return "EligibilityReached";
    case EventKind::CreditZeroCrossing: return "CreditZeroCrossing";
    case EventKind::FrameArrival: return "FrameArrival";
    case EventKind::SourceWakeup: return "SourceWakeup";
    case EventKind::DrrVisit: return "DrrVisit";
  }
  return "?";
}

EventHandle EventQueue::schedule(SimTime time, EventKind kind,
                                 std::int32_t target, std::uint64_t aux) {
  TSNSIM_CHECK(time >= now_, std::string("schedule in the past: ") +
                                 to_string(kind) + " at t=" +
                                 std::to_string(time) + " < now=" +
                                 std::to_string(now_));
  Event ev;
  ev.time = time;
  ev.kind = kind;
  ev.target = target;
  ev.aux = aux;
  ev.seq = next_seq_++;
  heap_.push(ev);
  live_.insert(ev.seq);
  ++scheduled_;
  return ev.seq;
}

bool EventQueue::cancel(EventHandle handle) {
  const bool was_live = live_.erase(handle) != 0;
  if (was_live) ++cancelled_;
  return was_live;
}

std::optional<Event> EventQueue::pop_next() {
  while (!heap_.empty()) {
    Event ev = heap_.top();
    heap_.pop();
    if (live_.erase(ev.seq) == 0) continue;  // cancelled, skip stale copy
    now_ = ev.time;
    ++fired_;
    return ev;
  }
  return std::nullopt;
}

}  // namespace tsnsim
