#include "detail.hpp"
#include "potra/transpose.hpp"

namespace potra {

namespace {

// A transposed edge, ordered by (endpoint, owner).
inline std::uint64_t pack(VertexId endpoint, VertexId owner) {
  return (std::uint64_t{endpoint} << 32) | owner;
}
inline VertexId endpoint_of(std::uint64_t key) { return static_cast<VertexId>(key >> 32); }
inline VertexId owner_of_key(std::uint64_t key) { return static_cast<VertexId>(key); }

}  // namespace

std::uint64_t default_subgraph_edges(std::uint64_t cache_bytes) {
  return std::max<std::uint64_t>(1, cache_bytes / (2 * sizeof(VertexId)));
}

TransposeOutput transpose_mergetrans(const CsrGraph& g, int threads, std::uint64_t subgraph_edges) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (subgraph_edges < 1) throw std::invalid_argument("subgraph_edges must be >= 1");
  const std::uint64_t n = g.num_vertices();
  const std::uint64_t m = g.num_edges();
  const auto offsets = g.offsets();
  const auto edges = g.edges();
  TransposeOutput out;
  out.method = to_string(Algorithm::kMergeTrans);
  detail::FootprintTracker footprint;
  detail::Stopwatch clock;

  // Step 1: every run of `subgraph_edges` consecutive edges is transposed
  // serially by one thread into (endpoint, owner) order.
  std::vector<std::uint64_t> runs(m), scratch(m);
  footprint.add(runs);
  footprint.add(scratch);
  const std::uint64_t num_subgraphs = (m + subgraph_edges - 1) / subgraph_edges;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::uint64_t s = 0; s < num_subgraphs; ++s) {
    const std::uint64_t lo = s * subgraph_edges;
    const std::uint64_t hi = std::min(m, lo + subgraph_edges);
    std::uint64_t owner = detail::owner_of(offsets, lo);
    for (std::uint64_t i = lo; i < hi; ++i) {
      while (offsets[owner + 1] <= i) ++owner;
      runs[i] = pack(edges[i], static_cast<VertexId>(owner));
    }
    std::sort(runs.begin() + lo, runs.begin() + hi);
  }
  out.phase_times.count = clock.lap();

  // Step 2: pairwise merge rounds. Owners in a left run never exceed those
  // in the right run, so each merge is a per-endpoint list concatenation
  // in subgraph order.
  for (std::uint64_t width = subgraph_edges; width < m; width *= 2) {
    const std::uint64_t pairs = (m + 2 * width - 1) / (2 * width);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::uint64_t p = 0; p < pairs; ++p) {
      const std::uint64_t lo = p * 2 * width;
      const std::uint64_t mid = std::min(m, lo + width);
      const std::uint64_t hi = std::min(m, lo + 2 * width);
      std::merge(runs.begin() + lo, runs.begin() + mid, runs.begin() + mid, runs.begin() + hi,
                 scratch.begin() + lo);
    }
    runs.swap(scratch);
  }
  footprint.remove(scratch);
  scratch = {};

  // Offsets from the endpoint boundaries of the merged run.
  std::vector<std::uint64_t> t_offsets(n + 1);
  std::vector<VertexId> t_edges(m);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::uint64_t i = 0; i < m; ++i) {
    const std::uint64_t v = endpoint_of(runs[i]);
    const std::uint64_t first = i == 0 ? 0 : std::uint64_t{endpoint_of(runs[i - 1])} + 1;
    for (std::uint64_t w = first; w <= v; ++w) t_offsets[w] = i;
    t_edges[i] = owner_of_key(runs[i]);
  }
  const std::uint64_t tail = m == 0 ? 0 : std::uint64_t{endpoint_of(runs[m - 1])} + 1;
  for (std::uint64_t w = tail; w <= n; ++w) t_offsets[w] = m;
  out.phase_times.aggregate = clock.lap();

  out.aux_footprint_bytes = footprint.peak();
  out.graph = CsrGraph::adopt(std::move(t_offsets), std::move(t_edges), flipped(g.orientation()));
  out.sorted = true;
  return out;
}

}  // namespace potra
