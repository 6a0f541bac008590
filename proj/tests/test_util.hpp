#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "potra/graph.hpp"
#include "potra/xoshiro.hpp"

namespace potra::test {

// 0->1, 0->2, 1->2, 2->3, 3->0: vertex 0 lists {1,2} and has one in-edge from 3.
inline CsrGraph fig1_graph() {
  return CsrGraph({0, 2, 3, 4, 5}, {1, 2, 2, 3, 0}, Orientation::kCsr);
}

enum class Shape { kUniform, kSkewed, kStar, kSelfLoops, kSparse };

// Random multigraph with self-loops, parallel edges and isolated vertices.
inline CsrGraph random_graph(std::uint64_t seed, std::uint64_t max_vertices = 1000,
                             std::uint64_t max_edges = 10000, Shape shape = Shape::kUniform) {
  Xoshiro256StarStar rng(seed);
  const std::uint64_t n = 1 + rng.next_below(max_vertices);
  const std::uint64_t m = rng.next_below(max_edges + 1);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  pairs.reserve(m);
  const auto target = static_cast<VertexId>(rng.next_below(n));
  // Leaves the upper tenth of IDs isolated when |V| allows it.
  const std::uint64_t used = std::max<std::uint64_t>(1, n - n / 10);
  for (std::uint64_t i = 0; i < m; ++i) {
    auto src = static_cast<VertexId>(rng.next_below(used));
    VertexId dst = 0;
    switch (shape) {
      case Shape::kUniform: dst = static_cast<VertexId>(rng.next_below(used)); break;
      case Shape::kSkewed: {
        const double u = rng.next_double();
        dst = static_cast<VertexId>(static_cast<std::uint64_t>(u * u * u * static_cast<double>(used)));
        break;
      }
      case Shape::kStar: dst = target; break;
      case Shape::kSelfLoops: dst = rng.next_below(4) == 0 ? src : static_cast<VertexId>(rng.next_below(used)); break;
      case Shape::kSparse: dst = static_cast<VertexId>(rng.next_below(std::min<std::uint64_t>(used, 3))); break;
    }
    pairs.emplace_back(src, dst);
    if (rng.next_below(8) == 0) pairs.emplace_back(src, dst);  // parallel edge
  }
  if (pairs.size() > max_edges) pairs.resize(max_edges);
  // Shuffle so lists are not sorted on input.
  CsrGraph sorted = from_pairs(n, std::move(pairs));
  std::vector<EdgeIndex> offsets(sorted.offsets().begin(), sorted.offsets().end());
  std::vector<VertexId> edges(sorted.edges().begin(), sorted.edges().end());
  for (std::uint64_t v = 0; v < n; ++v) {
    for (std::uint64_t i = offsets[v + 1]; i > offsets[v] + 1; --i) {
      std::swap(edges[i - 1], edges[offsets[v] + rng.next_below(i - offsets[v])]);
    }
  }
  return CsrGraph(std::move(offsets), std::move(edges), Orientation::kCsr);
}

inline Shape shape_for(std::uint64_t i) { return static_cast<Shape>(i % 5); }

}  // namespace potra::test
