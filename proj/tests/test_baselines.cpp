#include <doctest.h>

#include <numeric>

#include "potra/transpose.hpp"
#include "potra/xoshiro.hpp"
#include "test_util.hpp"

using namespace potra;

namespace {

std::vector<std::uint64_t> serial_scan(const std::vector<std::uint64_t>& counts) {
  std::vector<std::uint64_t> out(counts.size() + 1, 0);
  for (std::size_t i = 0; i < counts.size(); ++i) out[i + 1] = out[i] + counts[i];
  return out;
}

}  // namespace

TEST_CASE("prefix sum") {
  const std::vector<std::uint64_t> small = {2, 0, 3};
  CHECK(prefix_sum_parallel(small, 2) == std::vector<std::uint64_t>{0, 2, 2, 5});
  const std::vector<std::uint64_t> zeros(100, 0);
  for (auto v : prefix_sum_parallel(zeros, 4)) CHECK(v == 0);
  CHECK(prefix_sum_parallel({}, 3) == std::vector<std::uint64_t>{0});

  Xoshiro256StarStar rng(17);
  for (std::size_t n : {1, 2, 5, 63, 64, 65, 1000}) {
    std::vector<std::uint64_t> counts(n);
    for (auto& c : counts) c = rng.next_below(1000);
    const auto expected = serial_scan(counts);
    for (int t : {1, 2, 3, 7, 64}) CHECK(prefix_sum_parallel(counts, t) == expected);
  }
}

TEST_CASE("atomic on the sample graph") {
  const CsrGraph g = test::fig1_graph();
  const TransposeOutput out = transpose_atomic(g, 2);
  CHECK(out.graph.offsets()[0] == 0);
  CHECK(out.graph.offsets()[1] == 1);
  CHECK(out.graph.edges()[0] == 3);
  CHECK_FALSE(out.sorted);
  CHECK(sort_neighbor_lists(out.graph, 1) == transpose_oracle(g));
  CHECK(sort_neighbor_lists(out, 2).graph == transpose_oracle(g));
  CHECK(transpose_atomic(g, 1).graph.orientation() == Orientation::kCsc);
}

TEST_CASE("atomic matches the oracle across thread counts") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CsrGraph g = test::random_graph(seed, 500, 5000, test::shape_for(seed));
    const CsrGraph oracle = transpose_oracle(g);
    for (int t : {1, 2, 8}) {
      const TransposeOutput out = transpose_atomic(g, t, AtomicOptions{64});
      CHECK(std::ranges::equal(out.graph.offsets(), oracle.offsets()));
      CHECK(sort_neighbor_lists(out.graph, t) == oracle);
      CHECK(edge_multiset(out.graph) == swapped(edge_multiset(g)));
    }
  }
}

TEST_CASE("atomic footprint is independent of threads") {
  const CsrGraph g = test::random_graph(3, 1000, 10000);
  const auto a = transpose_atomic(g, 1).aux_footprint_bytes;
  CHECK(a == transpose_atomic(g, 8).aux_footprint_bytes);
  CHECK(a <= g.num_vertices() * 12 + 16);
}

TEST_CASE("scantrans") {
  const CsrGraph f = test::fig1_graph();
  CHECK(transpose_scantrans(f, 2).graph == transpose_oracle(f));

  const CsrGraph g = test::random_graph(4, 1000, 10000);
  const TransposeOutput one = transpose_scantrans(g, 1);
  CHECK(one.aux_footprint_bytes == g.num_vertices() * 4);
  CHECK(one.sorted);
  CHECK(lists_sorted(one.graph));
  CHECK(one.graph == transpose_oracle(g));

  for (int t : {2, 3, 8}) {
    const TransposeOutput out = transpose_scantrans(g, t);
    CHECK(out.graph == transpose_oracle(g));
    CHECK(out.aux_footprint_bytes == scantrans_footprint(g.num_vertices(), t));
  }
  CHECK(transpose_scantrans(g, 4).aux_footprint_bytes >= 1.8 * transpose_scantrans(g, 2).aux_footprint_bytes);

  CHECK_THROWS_AS(transpose_scantrans(g, 4, scantrans_footprint(g.num_vertices(), 4) - 1), FootprintExceeded);
  CHECK_NOTHROW(transpose_scantrans(g, 4, scantrans_footprint(g.num_vertices(), 4)));
}

TEST_CASE("mergetrans") {
  const CsrGraph f = test::fig1_graph();
  CHECK(transpose_mergetrans(f, 2, 2).graph == transpose_oracle(f));
  CHECK(transpose_mergetrans(f, 1, 100).graph == transpose_oracle(f));

  const CsrGraph g = test::random_graph(9, 2000, 10000, test::Shape::kSkewed);
  const CsrGraph oracle = transpose_oracle(g);
  for (std::uint64_t sub : {1, 17, 4096}) {
    for (int t : {1, 3}) {
      const TransposeOutput out = transpose_mergetrans(g, t, sub);
      CHECK(out.sorted);
      CHECK(lists_sorted(out.graph));
      CHECK(out.graph == oracle);
    }
  }
  CHECK(default_subgraph_edges(1 << 20) == (1 << 20) / 8);
}

TEST_CASE("sorting") {
  const CsrGraph g = test::random_graph(12, 300, 3000);
  const CsrGraph sorted = sort_lists(g);
  CHECK(sort_neighbor_lists(sorted, 3) == sorted);
  CHECK(lists_sorted(sorted));
  CHECK(sort_neighbor_lists(g, 3) == sorted);
  const CsrGraph singles({0, 1, 2, 3}, {2, 0, 1});
  CHECK(sort_neighbor_lists(singles, 2) == singles);
}

TEST_CASE("empty and edgeless graphs") {
  const CsrGraph empty;
  const CsrGraph edgeless({0, 0, 0, 0}, {});
  for (const CsrGraph* g : {&empty, &edgeless}) {
    CHECK(transpose_atomic(*g, 2).graph == transpose_oracle(*g));
    CHECK(transpose_scantrans(*g, 2).graph == transpose_oracle(*g));
    CHECK(transpose_mergetrans(*g, 2, 4).graph == transpose_oracle(*g));
  }
}

TEST_CASE("algorithm names") {
  for (Algorithm a : {Algorithm::kAtomic, Algorithm::kScanTrans, Algorithm::kMergeTrans, Algorithm::kPotra}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK_THROWS_AS(parse_algorithm("bogus"), std::invalid_argument);
}
