#include <benchmark/benchmark.h>

#include "tsnsim/ats.hpp"
#include "tsnsim/cbs.hpp"
#include "tsnsim/rng.hpp"

using namespace tsnsim;

static void BM_CbsCreditAdvance(benchmark::State& state) {
  CbsCredit credit(50'000'000, 100'000'000);
  SimTime now = 0;
  int phase = 0;
  for (auto _ : state) {
    now += 80'000;
    credit.advance(now, phase == 0 ? CbsPhase::Blocked : CbsPhase::Transmitting);
    phase ^= 1;
    benchmark::DoNotOptimize(credit.credit());
  }
}
BENCHMARK(BM_CbsCreditAdvance);

static void BM_AtsEligibility(benchmark::State& state) {
  AtsTokenBucket bucket(50'000'000, 8000);
  RngStream rng(3, 0);
  SimTime arrival = 0;
  for (auto _ : state) {
    arrival += rng.uniform_int(0, 200'000);
    benchmark::DoNotOptimize(bucket.eligibility_for(rng.uniform_int(64, 8000), arrival));
  }
}
BENCHMARK(BM_AtsEligibility);
