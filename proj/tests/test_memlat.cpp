#include <doctest.h>

#include <array>
#include <sstream>

#include "potra/memlat.hpp"
#include "potra/xoshiro.hpp"

using namespace potra;

// Captured from the public reference implementations.
TEST_CASE("xoshiro256** reference vector") {
  Xoshiro256StarStar rng(Xoshiro256StarStar::State{1, 2, 3, 4});
  const std::array<std::uint64_t, 10> expected = {
      11520ULL,
      0ULL,
      1509978240ULL,
      1215971899390074240ULL,
      1216172134540287360ULL,
      607988272756665600ULL,
      16172922978634559625ULL,
      8476171486693032832ULL,
      10595114339597558777ULL,
      2904607092377533576ULL};
  for (std::uint64_t e : expected) CHECK(rng() == e);
}

TEST_CASE("splitmix64 reference vector") {
  SplitMix64 sm(1477776061723855037ULL);
  const std::array<std::uint64_t, 5> expected = {1985237415132408290ULL, 2979275885539914483ULL,
                                                 13511426838097143398ULL, 8488337342461049707ULL,
                                                 15141737807933549159ULL};
  for (std::uint64_t e : expected) CHECK(sm.next() == e);
}

TEST_CASE("xoshiro determinism") {
  Xoshiro256StarStar a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 4; ++i) {
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    differs |= x != z;
  }
  CHECK(differs);

  Xoshiro256StarStar zero(Xoshiro256StarStar::State{0, 0, 0, 0});
  CHECK(zero() != zero());

  Xoshiro256StarStar j(5), k(5);
  j.jump();
  CHECK(j.state() != k.state());
  CHECK(stream_seed(5, 0) != stream_seed(5, 1));

  Xoshiro256StarStar r(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.next_below(7) < 7);
    const double d = r.next_double();
    CHECK((d >= 0.0 && d < 1.0));
  }
}

TEST_CASE("normalized rates") {
  MemoryTimings t{2, 1, 3, 4, 5, 6};
  const auto rows = report_rates(t);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].kind == AccessKind::kRead);
  CHECK(rows[0].regime == Regime::kHit);
  CHECK(rows[0].normalized_rate == 1.0);
  CHECK(rows[1].normalized_rate == 2.0);  // write takes half the read time
  MemoryTimings half{2, 4, 2, 2, 2, 2};
  CHECK(report_rates(half)[1].normalized_rate == 0.5);
  MemoryTimings same{3, 3, 3, 3, 3, 3};
  for (const auto& r : report_rates(same)) CHECK(r.normalized_rate == 1.0);
}

TEST_CASE("rates CSV round trip") {
  MemoryTimings t{1.25, 0.5, 0.75, 80, 40, 45};
  std::stringstream ss;
  write_rates_csv(ss, t);
  CHECK(ss.str().rfind("kind,regime,ns_per_access,normalized_rate\n", 0) == 0);
  const MemoryTimings back = read_rates_csv(ss);
  CHECK(back.t_r_h == t.t_r_h);
  CHECK(back.t_w_h == t.t_w_h);
  CHECK(back.t_aw_h == t.t_aw_h);
  CHECK(back.t_r_m == t.t_r_m);
  CHECK(back.t_w_m == t.t_w_m);
  CHECK(back.t_aw_m == t.t_aw_m);

  std::stringstream partial("kind,regime,ns_per_access,normalized_rate\nread,hit,1,1\n");
  CHECK_THROWS_AS(read_rates_csv(partial), std::invalid_argument);
}

TEST_CASE("timings validation") {
  CHECK_THROWS_AS(validate(MemoryTimings{0, 1, 1, 1, 1, 1}), std::invalid_argument);
  CHECK_NOTHROW(validate(MemoryTimings{1, 1, 1, 1, 1, 1}));
  CHECK(miss_not_faster(MemoryTimings{1, 1, 1, 0.95, 1, 1}));
  CHECK_FALSE(miss_not_faster(MemoryTimings{1, 1, 1, 0.5, 1, 1}));
}

TEST_CASE("measurement") {
  CHECK_THROWS_WITH(measure_cell(AccessKind::kRead, 1 << 16, 1, 0, 1), "empty measurement");
  MeasureOptions o;
  o.iterations = 0;
  o.total_l3_bytes = 1 << 20;
  CHECK_THROWS_WITH(measure_timings(o), "empty measurement");

  const auto r = measure_cell(AccessKind::kRead, 1 << 16, 2, 1 << 14, 1);
  CHECK(r.ns_per_access > 0);
  // The array holds 0..n-1, so reads sum to a nonzero value.
  CHECK(r.checksum != 0);

  // Initial contents sum to n(n-1)/2; every write kind moves that.
  const std::uint64_t n = (1 << 16) / 8;
  const std::uint64_t initial = n * (n - 1) / 2;
  CHECK(measure_cell(AccessKind::kWrite, 1 << 16, 2, 1 << 14, 1).checksum != initial);
  const auto aw = measure_cell(AccessKind::kAtomicWrite, 1 << 16, 2, 1 << 14, 1);
  // Every increment lands: warm-up plus timed accesses from both threads.
  CHECK(aw.checksum == initial + 2 * ((1 << 14) + (1 << 14) / 8));
}

TEST_CASE("miss array respects the configured cap") {
  MeasureOptions o;
  o.threads = 1;
  o.total_l3_bytes = 1 << 16;
  o.iterations = 1 << 12;
  o.max_miss_bytes = 1 << 22;
  const MemoryTimings t = measure_timings(o);
  CHECK(t.hit_array_bytes == 1 << 16);
  CHECK(t.miss_array_bytes == 1 << 22);
  CHECK_NOTHROW(validate(t));
}

TEST_CASE("cache detection is positive when present") {
  if (auto l3 = detect_l3_bytes()) CHECK(*l3 > 0);
  if (auto both = detect_l2_l3_bytes()) {
    CHECK(*both > 0);
    if (auto l3 = detect_l3_bytes()) CHECK(*both >= *l3);
  }
}
