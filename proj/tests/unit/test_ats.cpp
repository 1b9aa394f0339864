#include "doctest.h"
#include "oracles.hpp"
#include "tsnsim/ats.hpp"
#include "tsnsim/rng.hpp"

using namespace tsnsim;

TEST_CASE("full bucket: frame eligible at arrival, tokens emptied") {
  AtsTokenBucket bucket(50'000'000, 8000);
  CHECK(bucket.eligibility_for(8000, 1000) == 1000);
  CHECK(bucket.tokens_at(1000) == 0);
}

TEST_CASE("back-to-back max frames are spaced by cbs/cir") {
  AtsTokenBucket bucket(50'000'000, 8000);
  const SimTime first = bucket.eligibility_for(8000, 0);
  const SimTime second = bucket.eligibility_for(8000, 0);
  CHECK(first == 0);
  CHECK(second == 160'000);  // 8000 bits / 50 Mbit/s
  // Per-flow eligibility times never decrease.
  const SimTime third = bucket.eligibility_for(8000, 0);
  CHECK(third == 320'000);
}

TEST_CASE("two flows with full buckets are both eligible immediately") {
  AtsTokenBucket flow_a(50'000'000, 8000);
  AtsTokenBucket flow_b(50'000'000, 8000);
  CHECK(flow_a.eligibility_for(8000, 500) == 500);
  CHECK(flow_b.eligibility_for(8000, 500) == 500);
}

TEST_CASE("tokens refill linearly and cap at cbs") {
  AtsTokenBucket bucket(10'000'000, 4000);
  (void)bucket.eligibility_for(4000, 0);  // drain
  CHECK(bucket.tokens_at(0) == 0);
  CHECK(bucket.tokens_at(100'000) == 1000LL * kScaledPerBit);
  CHECK(bucket.tokens_at(400'000) == 4000LL * kScaledPerBit);
  CHECK(bucket.tokens_at(4'000'000) == 4000LL * kScaledPerBit);  // capped
}

TEST_CASE("frames above the committed burst size are rejected") {
  AtsTokenBucket bucket(10'000'000, 4000);
  CHECK_THROWS_AS(bucket.eligibility_for(4001, 0), std::logic_error);
}

TEST_CASE("eligibility matches the token bucket oracle on random traces") {
  RngStream rng(77, 0);
  for (int round = 0; round < 500; ++round) {
    const std::int64_t cir = rng.uniform_int(1, 1000) * 100'000;
    const std::int64_t cbs = rng.uniform_int(1000, 20000);
    AtsTokenBucket bucket(cir, cbs);
    oracle::TokenBucketRef ref(cir, cbs);
    SimTime arrival = 0;
    for (int i = 0; i < 40; ++i) {
      arrival += rng.uniform_int(0, 500'000);
      const std::int64_t bits = rng.uniform_int(1, cbs);
      const SimTime got = bucket.eligibility_for(bits, arrival);
      const SimTime want = ref.eligibility(bits, arrival);
      REQUIRE(got == want);
      CHECK(got >= arrival);
      // Tokens never exceed the committed burst size.
      CHECK(bucket.tokens_at(got) <= cbs * kScaledPerBit);
    }
  }
}

TEST_CASE("per-flow spacing invariant for max-size frames") {
  RngStream rng(78, 0);
  for (int round = 0; round < 50; ++round) {
    const std::int64_t cir = rng.uniform_int(1, 100) * 1'000'000;
    const std::int64_t cbs = rng.uniform_int(2000, 16000);
    AtsTokenBucket bucket(cir, cbs);
    SimTime prev = -1;
    for (int i = 0; i < 10; ++i) {
      const SimTime e = bucket.eligibility_for(cbs, 0);
      if (prev >= 0) {
        CHECK(e - prev >= cbs * kScaledPerBit / cir);
      }
      prev = e;
    }
  }
}
