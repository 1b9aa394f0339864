#include <benchmark/benchmark.h>

#include "tsnsim/event_queue.hpp"
#include "tsnsim/rng.hpp"

using namespace tsnsim;

static void BM_ScheduleAndPop(benchmark::State& state) {
  const auto depth = static_cast<std::size_t>(state.range(0));
  RngStream rng(1, 0);
  for (auto _ : state) {
    EventQueue q;
    for (std::size_t i = 0; i < depth; ++i) {
      q.schedule(rng.uniform_int(0, 1'000'000'000), EventKind::FrameArrival, 0);
    }
    while (auto ev = q.pop_next()) benchmark::DoNotOptimize(ev->time);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(depth));
}
BENCHMARK(BM_ScheduleAndPop)->Arg(1024)->Arg(65536);

static void BM_SteadyStateChurn(benchmark::State& state) {
  // Steady event mix: one pop, one reschedule ahead, occasional cancel.
  EventQueue q;
  RngStream rng(2, 0);
  for (int i = 0; i < 256; ++i) {
    q.schedule(rng.uniform_int(0, 1000), EventKind::FrameArrival, 0);
  }
  for (auto _ : state) {
    auto ev = q.pop_next();
    const EventHandle h = q.schedule(ev->time + rng.uniform_int(1, 1000),
                                     EventKind::TransmissionComplete, 0);
    if ((ev->seq & 7u) == 0) {
      q.cancel(h);
      q.schedule(ev->time + rng.uniform_int(1, 1000), EventKind::GateChange, 0);
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_SteadyStateChurn);
