#include <algorithm>
#include <stdexcept>

#include "detail.hpp"
#include "potra/transpose.hpp"

namespace potra {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAtomic: return "atomic";
    case Algorithm::kScanTrans: return "scantrans";
    case Algorithm::kMergeTrans: return "mergetrans";
    case Algorithm::kPotra: return "potra";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kAtomic, Algorithm::kScanTrans, Algorithm::kMergeTrans, Algorithm::kPotra}) {
    if (name == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm: " + name);
}

FootprintExceeded::FootprintExceeded(std::uint64_t required, std::uint64_t limit)
    : std::runtime_error("footprint exceeds limit: " + std::to_string(required) + " bytes required, limit " +
                         std::to_string(limit)),
      required_(required),
      limit_(limit) {}

namespace {

void sort_lists_inplace(std::span<const EdgeIndex> offsets, std::vector<VertexId>& edges, int threads) {
  const auto n = static_cast<std::int64_t>(offsets.size()) - 1;
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
  for (std::int64_t v = 0; v < n; ++v) {
    std::sort(edges.begin() + offsets[v], edges.begin() + offsets[v + 1]);
  }
}

}  // namespace

TransposeOutput sort_neighbor_lists(TransposeOutput t, int threads) {
  detail::Stopwatch clock;
  if (!t.sorted) {
    auto arrays = std::move(t.graph).release();
    sort_lists_inplace(arrays.offsets, arrays.edges, std::max(1, threads));
    t.graph = CsrGraph::adopt(std::move(arrays.offsets), std::move(arrays.edges), arrays.orientation);
    t.sorted = true;
  }
  t.phase_times.sort += clock.seconds();
  return t;
}

CsrGraph sort_neighbor_lists(const CsrGraph& g, int threads) {
  std::vector<EdgeIndex> offsets(g.offsets().begin(), g.offsets().end());
  std::vector<VertexId> edges(g.edges().begin(), g.edges().end());
  sort_lists_inplace(offsets, edges, std::max(1, threads));
  return CsrGraph::adopt(std::move(offsets), std::move(edges), g.orientation());
}

bool lists_sorted(const CsrGraph& g) {
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v) {
    const auto list = g.neighbors(v);
    if (!std::is_sorted(list.begin(), list.end())) return false;
  }
  return true;
}

}  // namespace potra
