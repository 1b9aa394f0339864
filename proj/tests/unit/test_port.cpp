#include "doctest.h"
#include "port_harness.hpp"
#include "tsnsim/rng.hpp"

using namespace tsnsim;
using test::PortHarness;

namespace {

PortConfig base_port(ForwardingMode mode, std::vector<QueueConfig> queues) {
  PortConfig cfg;
  cfg.node = "sw";
  cfg.link = "sw->sink";
  cfg.mode = mode;
  cfg.queues = std::move(queues);
  return cfg;
}

std::vector<FlowSpec> ats_flows(std::int64_t cir, std::int64_t cbs, int n,
                                int priority = 7) {
  std::vector<FlowSpec> flows;
  for (int i = 0; i < n; ++i) {
    FlowSpec f;
    f.index = i;
    f.id = "f" + std::to_string(i);
    f.priority = priority;
    f.ats = {cir, cbs};
    flows.push_back(f);
  }
  return flows;
}

}  // namespace

TEST_CASE("transmission times are exact") {
  PortHarness h(base_port(ForwardingMode::StrictPriority, {{7}}));
  CHECK(h.port->tx_time(h.make_frame(7, 1000)) == 80'000);
  CHECK(h.port->tx_time(h.make_frame(7, 1542)) == 123'360);
}

TEST_CASE("sp: empty port transmits immediately, lower waits for higher") {
  PortHarness h(base_port(ForwardingMode::StrictPriority, {{6}, {7}}));
  // Backlog of three priority-7 frames, then one priority-6 frame.
  for (int i = 0; i < 3; ++i) h.arrive_at(0, h.make_frame(7, 1000));
  h.arrive_at(10'000, h.make_frame(6, 1000));
  h.run_until(10'000'000);

  REQUIRE(h.completed.size() == 4);
  CHECK(h.starts[0].first == 0);  // immediate start on the empty port
  // First enqueue on the empty queue samples 1000 bytes, one frame.
  REQUIRE(!h.backlog_samples.empty());
  CHECK(h.backlog_samples[0].bytes == 1000);
  CHECK(h.backlog_samples[0].frames == 1);
  for (int i = 0; i < 3; ++i) CHECK(h.completed[static_cast<std::size_t>(i)].second.priority == 7);
  CHECK(h.completed[3].second.priority == 6);
  CHECK(h.completed[3].first == 4 * 80'000);  // waits for the whole backlog
  CHECK(h.port->audit().work_conservation_violations == 0);
}

TEST_CASE("unmapped priority is a configuration error") {
  PortHarness h(base_port(ForwardingMode::StrictPriority, {{7}}));
  CHECK_THROWS_AS(h.port->enqueue(h.make_frame(3, 100), 0), std::logic_error);
}

TEST_CASE("fifo: one shared queue in arrival order across priorities") {
  PortHarness h(base_port(ForwardingMode::Fifo, {{0}}));
  h.arrive_at(0, h.make_frame(6, 1000));
  h.arrive_at(1, h.make_frame(7, 1000));
  h.arrive_at(2, h.make_frame(6, 500));
  h.run_until(10'000'000);
  REQUIRE(h.completed.size() == 3);
  CHECK(h.completed[0].second.priority == 6);
  CHECK(h.completed[1].second.priority == 7);  // no overtaking
  CHECK(h.completed[2].second.size_bytes == 500);
}

TEST_CASE("per-queue fifo order is preserved") {
  PortHarness h(base_port(ForwardingMode::StrictPriority, {{6}, {7}}));
  RngStream rng(8, 0);
  SimTime t = 0;
  for (int i = 0; i < 200; ++i) {
    t += rng.uniform_int(0, 50'000);
    h.arrive_at(t, h.make_frame(rng.uniform_int(0, 1) == 0 ? 6 : 7,
                                rng.uniform_int(64, 1500)));
  }
  h.run_until(t + 1'000'000'000);
  std::uint64_t last6 = 0, last7 = 0;
  bool first6 = true, first7 = true;
  for (const auto& [time, f] : h.completed) {
    if (f.priority == 6) {
      if (!first6) CHECK(f.id > last6);
      last6 = f.id;
      first6 = false;
    } else {
      if (!first7) CHECK(f.id > last7);
      last7 = f.id;
      first7 = false;
    }
  }
}

// --- cbs --------------------------------------------------------------------

TEST_CASE("cbs: negative credit lets best effort through immediately") {
  PortHarness h(base_port(ForwardingMode::Cbs,
                          {{6, 0, 0, false}, {7, 25'000'000, 0, false}}));
  // Two HP frames back to back: the first transmits, leaving -6000 bits of
  // credit; the second must wait 240 us for recovery.
  h.arrive_at(0, h.make_frame(7, 1000));
  h.arrive_at(0, h.make_frame(7, 1000));
  h.arrive_at(100'000, h.make_frame(6, 1000));
  h.run_until(10'000'000);

  REQUIRE(h.completed.size() == 3);
  CHECK(h.completed[0].second.priority == 7);
  // BE starts right at 100 us although HP backlog exists (credit < 0).
  CHECK(h.completed[1].second.priority == 6);
  CHECK(h.starts[1].first == 100'000);
  CHECK(h.completed[2].second.priority == 7);
  // Shaping idled the link with HP backlog between 80 us and 100 us.
  CHECK(h.port->audit().idle_backlog_intervals >= 1);
}

TEST_CASE("cbs: zero-crossing wakeup starts the transmission exactly on time") {
  PortHarness h(base_port(ForwardingMode::Cbs,
                          {{6, 0, 0, false}, {7, 25'000'000, 0, false}}));
  h.arrive_at(0, h.make_frame(7, 1000));
  h.arrive_at(0, h.make_frame(7, 1000));
  h.run_until(10'000'000);
  REQUIRE(h.completed.size() == 2);
  CHECK(h.starts[0].first == 0);
  // credit after 80 us of transmission: -75 Mbit/s * 80 us = -6000 bits;
  // recovery at 25 Mbit/s takes 240 us.
  CHECK(h.starts[1].first == 80'000 + 240'000);
  CHECK(h.port->audit().idle_backlog_time == 240'000);
}

TEST_CASE("cbs: credit reset on emptying keeps later bursts honest") {
  PortHarness h(base_port(ForwardingMode::Cbs,
                          {{6, 0, 0, false}, {7, 50'000'000, 0, false}}));
  // Block the HP queue behind a BE frame so it accrues credit, then let it
  // empty: the leftover positive credit must not carry to the next burst.
  h.arrive_at(0, h.make_frame(6, 1542));       // busy till 123.36 us
  h.arrive_at(10'000, h.make_frame(7, 1000));  // waits, accrues credit
  h.run_until(400'000);
  CHECK(h.port->cbs_credit(7) == 0);  // emptied with positive credit -> reset

  h.arrive_at(400'000, h.make_frame(7, 1000));
  h.run_until(1'000'000);
  REQUIRE(h.completed.size() == 3);
  CHECK(h.starts[2].first == 400'000);  // zero credit is eligible
}

TEST_CASE("cbs: sp among eligible queues, be vs shaped hp") {
  PortHarness h(base_port(ForwardingMode::Cbs,
                          {{6, 0, 0, false}, {7, 50'000'000, 0, false}}));
  h.arrive_at(0, h.make_frame(7, 1000));
  h.arrive_at(0, h.make_frame(6, 1000));
  h.run_until(10'000'000);
  // Both eligible at t=0: priority 7 goes first.
  CHECK(h.completed[0].second.priority == 7);
  CHECK(h.completed[1].second.priority == 6);
}

// --- ats --------------------------------------------------------------------

TEST_CASE("ats: shared queue orders by eligibility, arrival breaks ties") {
  const auto flows = ats_flows(50'000'000, 8000, 3);
  PortHarness h(base_port(ForwardingMode::Ats,
                          {{6, 0, 0, false}, {7, 0, 0, true}}),
                &flows);
  // Flow 0 drains its bucket: next frame eligible at 160 us.
  h.arrive_at(0, h.make_frame(7, 1000, 0));
  h.arrive_at(0, h.make_frame(7, 1000, 0));
  // Flow 1 arrives later with a full bucket: eligible immediately, so it
  // overtakes flow 0's waiting second frame.
  h.arrive_at(90'000, h.make_frame(7, 1000, 1));
  h.run_until(10'000'000);

  REQUIRE(h.completed.size() == 3);
  CHECK(h.completed[0].second.flow == 0);
  CHECK(h.completed[1].second.flow == 1);
  CHECK(h.starts[1].first == 90'000);
  CHECK(h.completed[2].second.flow == 0);
  CHECK(h.starts[2].first == 170'000);  // eligibility 160 us, link busy till 170
}

TEST_CASE("ats: distinct flows may burst together") {
  const auto flows = ats_flows(10'000'000, 8000, 3);
  PortHarness h(base_port(ForwardingMode::Ats,
                          {{6, 0, 0, false}, {7, 0, 0, true}}),
                &flows);
  for (int i = 0; i < 3; ++i) h.arrive_at(0, h.make_frame(7, 1000, i));
  h.run_until(10'000'000);
  REQUIRE(h.completed.size() == 3);
  // All eligible at once: back-to-back burst of three different flows.
  CHECK(h.completed[2].first == 3 * 80'000);
}

TEST_CASE("ats: head ineligible blocks the queue but not lower priorities") {
  const auto flows = ats_flows(50'000'000, 8000, 2);
  PortHarness h(base_port(ForwardingMode::Ats,
                          {{6, 0, 0, false}, {7, 0, 0, true}}),
                &flows);
  h.arrive_at(0, h.make_frame(7, 1000, 0));
  h.arrive_at(0, h.make_frame(7, 1000, 0));  // eligible at 160 us
  h.arrive_at(85'000, h.make_frame(6, 1000, 1));
  h.run_until(10'000'000);

  REQUIRE(h.completed.size() == 3);
  CHECK(h.completed[1].second.priority == 6);  // BE passes the shaped queue
  CHECK(h.starts[1].first == 85'000);
  CHECK(h.starts[2].first == 165'000);  // HP resumes once eligible and idle
  CHECK(h.port->audit().idle_backlog_intervals >= 1);
}

TEST_CASE("ats: eligibility wakeup fires when nothing else moves") {
  const auto flows = ats_flows(50'000'000, 8000, 1);
  PortHarness h(base_port(ForwardingMode::Ats, {{7, 0, 0, true}}), &flows);
  h.arrive_at(0, h.make_frame(7, 1000, 0));
  h.arrive_at(0, h.make_frame(7, 1000, 0));
  h.run_until(10'000'000);
  REQUIRE(h.completed.size() == 2);
  CHECK(h.starts[1].first == 160'000);
  CHECK(h.port->audit().idle_backlog_time == 80'000);  // 80 us to 160 us
}

// --- tas --------------------------------------------------------------------

TEST_CASE("tas: closed gate holds a frame until its window") {
  GateControlList gcl;
  gcl.cycle = 1'000'000;
  gcl.entries = {{0, 0x40}, {500'000, 0x80}, {580'000, 0x40}};
  gcl.validate();
  auto cfg = base_port(ForwardingMode::Tas, {{6, 0, 0, false}, {7, 0, 0, false}});
  cfg.gcl = gcl;
  PortHarness h(cfg);

  h.arrive_at(0, h.make_frame(7, 1000));  // gate closed until 500 us
  h.run_until(10'000'000);
  REQUIRE(h.completed.size() == 1);
  CHECK(h.starts[0].first == 500'000);
}

TEST_CASE("tas: a best-effort frame never straddles a protected window") {
  GateControlList gcl;
  gcl.cycle = 1'000'000;
  gcl.entries = {{0, 0x40}, {500'000, 0x80}, {580'000, 0x40}};
  gcl.validate();
  auto cfg = base_port(ForwardingMode::Tas, {{6, 0, 0, false}, {7, 0, 0, false}});
  cfg.gcl = gcl;
  cfg.audit_windows = true;
  PortHarness h(cfg);

  // 123.36 us frame arriving 100 us before the window: would overrun, waits.
  h.arrive_at(400'000, h.make_frame(6, 1542));
  h.arrive_at(500'000, h.make_frame(7, 1000));
  h.run_until(10'000'000);
  REQUIRE(h.completed.size() == 2);
  CHECK(h.completed[0].second.priority == 7);
  CHECK(h.starts[0].first == 500'000);       // protected window undisturbed
  CHECK(h.starts[1].first == 580'000);       // BE resumes after the window
  CHECK(h.port->audit().window_overlaps == 0);

  // An exact fit in front of the window is legal.
  h.arrive_at(1'420'000, h.make_frame(6, 1000));  // 80 us before 1.5 ms window
  h.run_until(2'000'000);
  CHECK(h.starts[2].first == 1'420'000);
  CHECK(h.port->audit().window_overlaps == 0);
}

// --- work conservation audit -------------------------------------------------

TEST_CASE("sp/fifo/drr never idle with backlog on random arrivals") {
  RngStream rng(31, 0);
  for (const auto mode : {ForwardingMode::StrictPriority, ForwardingMode::Fifo,
                          ForwardingMode::Drr}) {
    std::vector<QueueConfig> queues;
    if (mode == ForwardingMode::Fifo) {
      queues = {{0, 0, 0, false}};
    } else {
      queues = {{5, 0, 200, false}, {6, 0, 300, false}, {7, 0, 500, false}};
    }
    PortHarness h(base_port(mode, queues));
    SimTime t = 0;
    for (int i = 0; i < 400; ++i) {
      t += rng.uniform_int(0, 100'000);
      const int prio = mode == ForwardingMode::Fifo
                           ? static_cast<int>(rng.uniform_int(0, 7))
                           : static_cast<int>(rng.uniform_int(5, 7));
      h.arrive_at(t, h.make_frame(prio, rng.uniform_int(64, 1522)));
    }
    h.run_until(t + 10'000'000'000LL);
    CHECK(h.completed.size() == 400);
    CHECK(h.port->audit().work_conservation_violations == 0);
    CHECK(h.port->audit().idle_backlog_intervals == 0);
  }
}
