#include <cmath>

#include "doctest.h"
#include "tsnsim/traffic.hpp"

using namespace tsnsim;

TEST_CASE("det burst: all frames of a burst share the arrival instant") {
  DetBurstSpec spec;
  spec.period = 1'000'000;  // 1 ms
  spec.burst_len = 20;
  spec.size = SizeDist::fixed_bytes(1000);
  RngStream rng(1, 0);

  const auto burst = det_next_burst(spec, 0, rng);
  REQUIRE(burst.size() == 20);
  for (const auto& a : burst) {
    CHECK(a.time == 0);
    CHECK(a.size_bytes == 1000);
  }
}

TEST_CASE("det burst: single frame per period and offset arithmetic") {
  DetBurstSpec spec;
  spec.period = 1'000'000;
  spec.offset = 100'000;  // 100 us
  spec.burst_len = 1;
  spec.size = SizeDist::fixed_bytes(64);
  RngStream rng(1, 0);

  CHECK(det_next_burst(spec, 0, rng).size() == 1);
  const auto burst3 = det_next_burst(spec, 3, rng);
  CHECK(burst3.front().time == 3'100'000);  // 3.1 ms
}

TEST_CASE("det burst: paced emission spaces frames inside the burst") {
  DetBurstSpec spec;
  spec.period = 1'000'000;
  spec.burst_len = 3;
  spec.size = SizeDist::fixed_bytes(1000);
  spec.spacing = 80'000;
  RngStream rng(1, 0);

  const auto burst = det_next_burst(spec, 2, rng);
  CHECK(burst[0].time == 2'000'000);
  CHECK(burst[1].time == 2'080'000);
  CHECK(burst[2].time == 2'160'000);
}

TEST_CASE("det burst emits burst_len * floor((T-offset)/period + 1) frames") {
  DetBurstSpec spec;
  spec.period = 700'000;
  spec.offset = 50'000;
  spec.burst_len = 5;
  spec.size = SizeDist::fixed_bytes(100);
  RngStream rng(1, 0);

  const SimTime horizon = 10'000'000;
  std::int64_t emitted = 0;
  for (std::int64_t n = 0;; ++n) {
    const auto burst = det_next_burst(spec, n, rng);
    if (burst.front().time > horizon) break;
    emitted += static_cast<std::int64_t>(burst.size());
  }
  const std::int64_t periods = (horizon - spec.offset) / spec.period + 1;
  CHECK(emitted == spec.burst_len * periods);
}

TEST_CASE("sample_size bounds and mean") {
  RngStream rng(7, 2);
  const SizeDist uni = SizeDist::uniform_bytes(200, 1400);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto v = uni.sample(rng);
    CHECK(v >= 200);
    CHECK(v <= 1400);
    sum += static_cast<double>(v);
  }
  CHECK(std::abs(sum / n - 800.0) < 5.0);

  const SizeDist fixed = SizeDist::fixed_bytes(1542);
  CHECK(fixed.sample(rng) == 1542);
  const SizeDist degenerate = SizeDist::uniform_bytes(333, 333);
  CHECK(degenerate.sample(rng) == 333);
}

TEST_CASE("mmpp stationary distribution and mean rate") {
  MmppSpec spec;
  spec.to_fast_per_s = 10;
  spec.to_slow_per_s = 40;
  spec.rate_fast_per_s = 3750;
  spec.rate_slow_per_s = 2690;
  spec.size = SizeDist::fixed_bytes(800);

  // Balance equations of the two-state chain: pi_fast * to_slow =
  // pi_slow * to_fast, so pi_fast = 10 / (10 + 40).
  CHECK(spec.stationary_fast() == doctest::Approx(0.2));
  CHECK(spec.mean_rate_per_s() == doctest::Approx(0.2 * 3750 + 0.8 * 2690));
  CHECK(spec.mean_rate_per_s() == doctest::Approx(2902.0));

  // Long-run frame rate converges to the analytic value within 2%.
  RngStream rng(123, 9);
  MmppState state;
  const int frames = 1'000'000;
  SimTime clock = 0;
  for (int i = 0; i < frames; ++i) {
    clock += mmpp_step(state, spec, rng).time;
  }
  const double rate = frames / (static_cast<double>(clock) / 1e9);
  CHECK(std::abs(rate - 2902.0) / 2902.0 < 0.02);
}

TEST_CASE("mmpp with equal phases reduces to a poisson process") {
  MmppSpec spec;
  spec.to_fast_per_s = 5;
  spec.to_slow_per_s = 5;
  spec.rate_fast_per_s = 1000;
  spec.rate_slow_per_s = 1000;
  spec.size = SizeDist::fixed_bytes(100);

  RngStream rng(55, 1);
  MmppState state;
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double dt = static_cast<double>(mmpp_step(state, spec, rng).time) / 1e9;
    sum += dt;
    sum_sq += dt * dt;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean - 1e-3) < 2e-5);
  // Exponential inter-arrivals: coefficient of variation 1.
  CHECK(std::abs(std::sqrt(var) / mean - 1.0) < 0.02);
}

TEST_CASE("implied flow rates") {
  FlowSpec det_flow;
  DetBurstSpec det;
  det.period = 6'400'000;
  det.burst_len = 20;
  det.size = SizeDist::fixed_bytes(1000);
  det_flow.source = det;
  CHECK(det_flow.implied_rate_bps() == doctest::Approx(25e6));

  FlowSpec mmpp_flow;
  MmppSpec mmpp;
  mmpp.to_fast_per_s = 10;
  mmpp.to_slow_per_s = 40;
  mmpp.rate_fast_per_s = 3750;
  mmpp.rate_slow_per_s = 2690;
  mmpp.size = SizeDist::uniform_bytes(200, 1400);
  mmpp_flow.source = mmpp;
  CHECK(mmpp_flow.implied_rate_bps() == doctest::Approx(2902.0 * 800 * 8));
}
