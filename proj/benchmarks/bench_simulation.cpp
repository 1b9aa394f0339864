#include <benchmark/benchmark.h>

#include "tsnsim/scenario.hpp"
#include "tsnsim/simulation.hpp"

using namespace tsnsim;

namespace {
const Scenario& fig6() {
  static const Scenario scenario =
      Scenario::load(std::string(TSNSIM_SCENARIO_DIR) + "/onehop_fig6.json");
  return scenario;
}
}  // namespace

// Whole-run throughput of the one-hop scenario, per mode. Items are
// delivered frames.
static void BM_OneHopRun(benchmark::State& state, const char* mode) {
  std::int64_t frames = 0;
  for (auto _ : state) {
    auto run = fig6().resolve(mode, 0.5, 1, SimTime{500'000'000});
    const auto series = run_simulation(std::move(run.sim));
    frames += static_cast<std::int64_t>(series.delivered);
  }
  state.SetItemsProcessed(frames);
}
BENCHMARK_CAPTURE(BM_OneHopRun, sp, "sp");
BENCHMARK_CAPTURE(BM_OneHopRun, cbs, "cbs");
BENCHMARK_CAPTURE(BM_OneHopRun, ats, "ats");
BENCHMARK_CAPTURE(BM_OneHopRun, drr, "drr");
BENCHMARK_CAPTURE(BM_OneHopRun, tas, "tas");
