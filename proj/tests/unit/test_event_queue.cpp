#include <algorithm>
#include <vector>

#include "doctest.h"
#include "tsnsim/event_queue.hpp"
#include "tsnsim/rng.hpp"

using namespace tsnsim;

TEST_CASE("gate changes pop before arrivals at equal time") {
  EventQueue q;
  q.schedule(0, EventKind::FrameArrival, 1);
  q.schedule(0, EventKind::GateChange, 2);
  auto first = q.pop_next();
  auto second = q.pop_next();
  REQUIRE(first.has_value());
  CHECK(first->kind == EventKind::GateChange);
  CHECK(second->kind == EventKind::FrameArrival);
}

TEST_CASE("full kind rank order at equal time") {
  EventQueue q;
  const std::vector<EventKind> reversed = {
      EventKind::DrrVisit,           EventKind::SourceWakeup,
      EventKind::FrameArrival,       EventKind::CreditZeroCrossing,
      EventKind::EligibilityReached, EventKind::TransmissionComplete,
      EventKind::GateChange,
  };
  for (const auto kind : reversed) q.schedule(5, kind, 0);
  std::vector<EventKind> popped;
  while (auto ev = q.pop_next()) popped.push_back(ev->kind);
  REQUIRE(popped.size() == 7);
  for (std::size_t i = 1; i < popped.size(); ++i) {
    CHECK(static_cast<int>(popped[i - 1]) < static_cast<int>(popped[i]));
  }
}

TEST_CASE("same time and kind breaks ties by issue order") {
  EventQueue q;
  const auto h1 = q.schedule(5, EventKind::FrameArrival, 10);
  const auto h2 = q.schedule(5, EventKind::FrameArrival, 20);
  CHECK(h1 < h2);
  CHECK(q.pop_next()->target == 10);
  CHECK(q.pop_next()->target == 20);
}

TEST_CASE("scheduling at the current time is accepted, in the past is fatal") {
  EventQueue q;
  q.schedule(100, EventKind::SourceWakeup, 0);
  REQUIRE(q.pop_next()->time == 100);
  CHECK(q.now() == 100);
  CHECK_NOTHROW(q.schedule(100, EventKind::SourceWakeup, 0));
  CHECK_THROWS_AS(q.schedule(99, EventKind::SourceWakeup, 0), std::logic_error);
}

TEST_CASE("clock advances to the popped event") {
  EventQueue q;
  q.schedule(7, EventKind::SourceWakeup, 0);
  CHECK(q.pop_next()->time == 7);
  CHECK(q.now() == 7);
  CHECK(!q.pop_next().has_value());  // end of simulation
}

TEST_CASE("cancel semantics") {
  EventQueue q;
  const auto h = q.schedule(10, EventKind::GateChange, 0);

  SUBCASE("cancel before pop: event never fires") {
    CHECK(q.cancel(h));
    CHECK(!q.pop_next().has_value());
  }
  SUBCASE("cancel after fire returns false") {
    REQUIRE(q.pop_next().has_value());
    CHECK(!q.cancel(h));
  }
  SUBCASE("double cancel returns false") {
    CHECK(q.cancel(h));
    CHECK(!q.cancel(h));
  }
}

TEST_CASE("random schedules: monotone clock, strict order, conservation") {
  RngStream rng(42, 0);
  EventQueue q;
  std::vector<EventHandle> handles;
  std::uint64_t fired = 0, cancelled = 0, scheduled = 0;

  SimTime last = 0;
  std::uint64_t last_seq = 0;
  EventKind last_kind = EventKind::GateChange;
  for (int step = 0; step < 20000; ++step) {
    const auto action = rng.uniform_int(0, 2);
    if (action == 0 || handles.size() > 64) {
      if (auto ev = q.pop_next()) {
        ++fired;
        CHECK(ev->time >= last);
        if (ev->time == last) {
          // (time, kind, seq) is a strict total order.
          const bool ordered = static_cast<int>(ev->kind) > static_cast<int>(last_kind) ||
                               (ev->kind == last_kind && ev->seq > last_seq);
          CHECK(ordered);
        }
        last = ev->time;
        last_seq = ev->seq;
        last_kind = ev->kind;
      }
    } else if (action == 1) {
      const SimTime t = q.now() + rng.uniform_int(0, 1000);
      const auto kind = static_cast<EventKind>(rng.uniform_int(0, 6));
      handles.push_back(q.schedule(t, kind, 0));
      ++scheduled;
    } else if (!handles.empty()) {
      const auto idx = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(handles.size()) - 1));
      if (q.cancel(handles[idx])) ++cancelled;
      handles.erase(handles.begin() + static_cast<std::ptrdiff_t>(idx));
    }
  }
  while (q.pop_next()) ++fired;

  // Every scheduled event fired exactly once or was cancelled exactly once.
  CHECK(scheduled == fired + cancelled);
  CHECK(q.scheduled_total() == scheduled);
  CHECK(q.fired_total() == fired);
  CHECK(q.cancelled_total() == cancelled);
}
