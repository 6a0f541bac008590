#include "potra/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "potra/xoshiro.hpp"

namespace potra {

const char* to_string(Orientation o) { return o == Orientation::kCsr ? "CSR" : "CSC"; }

Orientation flipped(Orientation o) {
  return o == Orientation::kCsr ? Orientation::kCsc : Orientation::kCsr;
}

GraphError::GraphError(const std::string& what, std::int64_t byte_offset)
    : std::runtime_error(byte_offset >= 0 ? what + " at byte " + std::to_string(byte_offset) : what),
      byte_offset_(byte_offset) {}

void validate(std::span<const EdgeIndex> offsets, std::span<const VertexId> edges) {
  if (offsets.empty()) throw GraphError("offsets array is empty");
  if (offsets.front() != 0) throw GraphError("offsets[0] is not 0");
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (offsets[i] < offsets[i - 1]) {
      throw GraphError("non-monotone offsets (index " + std::to_string(i) + ")");
    }
  }
  if (offsets.back() != edges.size()) throw GraphError("offsets[|V|] differs from |E|");
  const std::uint64_t n = offsets.size() - 1;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] >= n) {
      throw GraphError("edge ID " + std::to_string(edges[i]) + " >= |V| (index " +
                       std::to_string(i) + ")");
    }
  }
}

CsrGraph::CsrGraph(std::vector<EdgeIndex> offsets, std::vector<VertexId> edges, Orientation orientation)
    : offsets_(std::move(offsets)), edges_(std::move(edges)), orientation_(orientation) {
  validate(offsets_, edges_);
}

CsrGraph CsrGraph::adopt(std::vector<EdgeIndex> offsets, std::vector<VertexId> edges,
                         Orientation orientation) {
  CsrGraph g;
  g.offsets_ = std::move(offsets);
  g.edges_ = std::move(edges);
  g.orientation_ = orientation;
  return g;
}

std::uint64_t CsrGraph::size_bytes() const {
  return offsets_.size() * sizeof(EdgeIndex) + edges_.size() * sizeof(VertexId);
}

CsrGraph::Arrays CsrGraph::release() && {
  Arrays a{std::move(offsets_), std::move(edges_), orientation_};
  offsets_ = {0};
  edges_.clear();
  return a;
}

EdgeMultiset edge_multiset(const CsrGraph& g) {
  EdgeMultiset m;
  m.pairs.reserve(g.num_edges());
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v) {
    for (VertexId u : g.neighbors(v)) m.pairs.emplace_back(static_cast<VertexId>(v), u);
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

EdgeMultiset swapped(EdgeMultiset m) {
  for (auto& [a, b] : m.pairs) std::swap(a, b);
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

CsrGraph from_pairs(std::uint64_t num_vertices, std::vector<std::pair<VertexId, VertexId>> pairs,
                    Orientation orientation) {
  std::sort(pairs.begin(), pairs.end());
  std::vector<EdgeIndex> offsets(num_vertices + 1, 0);
  std::vector<VertexId> edges;
  edges.reserve(pairs.size());
  for (const auto& [src, dst] : pairs) {
    if (src >= num_vertices || dst >= num_vertices) {
      throw GraphError("vertex ID " + std::to_string(std::max(src, dst)) + " >= |V|");
    }
    ++offsets[src + 1];
    edges.push_back(dst);
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return CsrGraph::adopt(std::move(offsets), std::move(edges), orientation);
}

CsrGraph transpose_oracle(const CsrGraph& g) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  pairs.reserve(g.num_edges());
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v) {
    for (VertexId u : g.neighbors(v)) pairs.emplace_back(u, static_cast<VertexId>(v));
  }
  return from_pairs(g.num_vertices(), std::move(pairs), flipped(g.orientation()));
}

CsrGraph sort_lists(const CsrGraph& g) {
  std::vector<EdgeIndex> offsets(g.offsets().begin(), g.offsets().end());
  std::vector<VertexId> edges(g.edges().begin(), g.edges().end());
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v) {
    std::sort(edges.begin() + offsets[v], edges.begin() + offsets[v + 1]);
  }
  return CsrGraph::adopt(std::move(offsets), std::move(edges), g.orientation());
}

CsrGraph relabel(const CsrGraph& g, std::span<const VertexId> mapping) {
  const std::uint64_t n = g.num_vertices();
  if (mapping.size() != n) throw GraphError("mapping size differs from |V|");
  const auto inverse = inverse_permutation(mapping);

  std::vector<EdgeIndex> offsets(n + 1, 0);
  for (std::uint64_t v = 0; v < n; ++v) offsets[mapping[v] + 1] = g.degree(v);
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());

  std::vector<VertexId> edges(g.num_edges());
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::uint64_t nv = 0; nv < n; ++nv) {
    auto out = edges.begin() + offsets[nv];
    for (VertexId u : g.neighbors(inverse[nv])) *out++ = mapping[u];
  }
  return CsrGraph::adopt(std::move(offsets), std::move(edges), g.orientation());
}

std::vector<VertexId> inverse_permutation(std::span<const VertexId> mapping) {
  std::vector<VertexId> inverse(mapping.size());
  std::vector<bool> seen(mapping.size(), false);
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    if (mapping[i] >= mapping.size() || seen[mapping[i]]) throw GraphError("mapping is not a permutation");
    seen[mapping[i]] = true;
    inverse[mapping[i]] = static_cast<VertexId>(i);
  }
  return inverse;
}

RelabeledGraph relabel_random(const CsrGraph& g, std::uint64_t seed) {
  std::vector<VertexId> mapping(g.num_vertices());
  std::iota(mapping.begin(), mapping.end(), VertexId{0});
  Xoshiro256StarStar rng(seed);
  for (std::uint64_t i = mapping.size(); i > 1; --i) {
    std::swap(mapping[i - 1], mapping[rng.next_below(i)]);
  }
  CsrGraph out = relabel(g, mapping);
  return {std::move(out), std::move(mapping)};
}

double locality_metric(const CsrGraph& g) {
  double total = 0;
  std::uint64_t pairs = 0;
#pragma omp parallel for schedule(dynamic, 4096) reduction(+ : total, pairs)
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v) {
    const auto list = g.neighbors(v);
    for (std::size_t i = 1; i < list.size(); ++i) {
      total += static_cast<double>(list[i] > list[i - 1] ? list[i] - list[i - 1] : list[i - 1] - list[i]);
    }
    if (list.size() > 1) pairs += list.size() - 1;
  }
  return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

std::vector<std::uint64_t> degrees(const CsrGraph& g, DegreeDirection direction) {
  std::vector<std::uint64_t> deg(g.num_vertices(), 0);
  if (direction == DegreeDirection::kOutOfOffsets) {
    for (std::uint64_t v = 0; v < g.num_vertices(); ++v) deg[v] = g.degree(v);
  } else {
    for (VertexId u : g.edges()) ++deg[u];
  }
  return deg;
}

DegreeStats degree_stats(const CsrGraph& g, DegreeDirection direction,
                         std::span<const std::uint64_t> thresholds) {
  DegreeStats s;
  for (std::uint64_t d : degrees(g, direction)) {
    ++s.histogram[d];
    s.max_degree = std::max(s.max_degree, d);
  }
  const double n = static_cast<double>(g.num_vertices());
  for (std::uint64_t t : thresholds) {
    std::uint64_t below = 0;
    for (auto it = s.histogram.begin(); it != s.histogram.end() && it->first < t; ++it) below += it->second;
    s.fraction_below[t] = n == 0 ? 0.0 : static_cast<double>(below) / n;
  }
  return s;
}

}  // namespace potra
