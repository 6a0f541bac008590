#include "detail.hpp"
#include "potra/transpose.hpp"

namespace potra {

namespace {

template <bool checked>
bool count_endpoints(std::span<const VertexId> edges, std::vector<std::uint32_t>& counters, int threads) {
  bool ok = true;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(&& : ok)
  for (std::uint64_t i = 0; i < edges.size(); ++i) ok = detail::bump<checked>(counters[edges[i]]) && ok;
  return ok;
}

}  // namespace

TransposeOutput transpose_atomic(const CsrGraph& g, int threads, const AtomicOptions& options) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  const std::uint64_t n = g.num_vertices();
  TransposeOutput out;
  out.method = to_string(Algorithm::kAtomic);
  detail::FootprintTracker footprint;
  detail::Stopwatch clock;

  // Step 1: transposed degrees via shared atomic counters.
  std::vector<std::uint32_t> counters(n, 0);
  footprint.add(counters);
  const bool ok = detail::counters_may_wrap(g.num_edges()) ? count_endpoints<true>(g.edges(), counters, threads)
                                                           : count_endpoints<false>(g.edges(), counters, threads);
  if (!ok) throw CounterOverflow("transposed degree reaches 2^32 in a 32-bit counter");
  out.phase_times.count = clock.lap();

  // Step 2: offsets and insertion points.
  auto t_offsets = detail::offsets_from_degrees(n, threads, [&](std::uint64_t v) { return counters[v]; });
  footprint.remove(counters);
  counters = {};
  std::vector<std::uint64_t> insertion(n);
  footprint.add(insertion);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::uint64_t v = 0; v < n; ++v) insertion[v] = t_offsets[v];
  out.phase_times.aggregate = clock.lap();

  // Step 3: each edge reserves its slot with fetch-and-add.
  std::vector<VertexId> t_edges(g.num_edges());
  const auto parts = detail::vertex_partitions(g, options.partition_edges);
  const auto num_parts = static_cast<std::int64_t>(parts.size() - 1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t p = 0; p < num_parts; ++p) {
    for (std::uint64_t v = parts[p]; v < parts[p + 1]; ++v) {
      for (VertexId u : g.neighbors(v)) t_edges[detail::fetch_inc(insertion[u])] = static_cast<VertexId>(v);
    }
  }
  out.phase_times.write = clock.lap();

  out.aux_footprint_bytes = footprint.peak();
  out.graph = CsrGraph::adopt(std::move(t_offsets), std::move(t_edges), flipped(g.orientation()));
  out.sorted = false;
  return out;
}

}  // namespace potra
