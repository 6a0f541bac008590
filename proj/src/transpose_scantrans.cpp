#include "detail.hpp"
#include "potra/transpose.hpp"

namespace potra {

std::uint64_t scantrans_footprint(std::uint64_t num_vertices, int threads) {
  return static_cast<std::uint64_t>(threads) * num_vertices * sizeof(std::uint32_t);
}

TransposeOutput transpose_scantrans(const CsrGraph& g, int threads, std::uint64_t footprint_limit) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  const std::uint64_t required = scantrans_footprint(g.num_vertices(), threads);
  if (required > footprint_limit) throw FootprintExceeded(required, footprint_limit);

  const std::uint64_t n = g.num_vertices();
  const auto offsets = g.offsets();
  const auto edges = g.edges();
  TransposeOutput out;
  out.method = to_string(Algorithm::kScanTrans);
  detail::require_team(threads);
  detail::Stopwatch clock;

  // One contiguous vertex range per thread; the same thread handles the
  // same range in steps 1 and 3.
  const auto ranges = detail::vertex_ranges(g, static_cast<std::uint64_t>(threads));
  std::vector<std::vector<std::uint32_t>> local(threads);
  const bool may_wrap = detail::counters_may_wrap(g.num_edges());
  bool wrapped = false;

  // Step 1: private counters, no atomics.
#pragma omp parallel num_threads(threads) reduction(|| : wrapped)
  {
    const int tid = omp_get_thread_num();
    auto& counters = local[tid];
    counters.assign(n, 0);
    for (std::uint64_t i = offsets[ranges[tid]]; i < offsets[ranges[tid + 1]]; ++i) {
      if (++counters[edges[i]] == 0 && may_wrap) wrapped = true;
    }
  }
  if (wrapped) throw CounterOverflow("per-thread counter wrapped");
  out.phase_times.count = clock.lap();

  // Step 2: each thread's counter becomes its offset inside the vertex's
  // slot, ordered by thread rank.
  std::vector<std::uint64_t> t_offsets(n + 1);
  t_offsets[0] = 0;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(|| : wrapped)
  for (std::uint64_t v = 0; v < n; ++v) {
    std::uint64_t running = 0;
    for (auto& counters : local) {
      const std::uint32_t c = counters[v];
      counters[v] = static_cast<std::uint32_t>(running);
      running += c;
    }
    if (may_wrap && running > std::numeric_limits<std::uint32_t>::max()) wrapped = true;
    t_offsets[v + 1] = running;
  }
  if (wrapped) throw CounterOverflow("transposed degree reaches 2^32");
  inclusive_scan_inplace(std::span(t_offsets).subspan(1), threads);
  out.phase_times.aggregate = clock.lap();

  // Step 3
  std::vector<VertexId> t_edges(g.num_edges());
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    auto& cursor = local[tid];
    for (std::uint64_t v = ranges[tid]; v < ranges[tid + 1]; ++v) {
      for (VertexId u : g.neighbors(v)) t_edges[t_offsets[u] + cursor[u]++] = static_cast<VertexId>(v);
    }
  }
  out.phase_times.write = clock.lap();

  std::uint64_t aux = 0;
  for (const auto& counters : local) aux += counters.capacity() * sizeof(std::uint32_t);
  out.aux_footprint_bytes = aux;
  out.graph = CsrGraph::adopt(std::move(t_offsets), std::move(t_edges), flipped(g.orientation()));
  out.sorted = true;
  return out;
}

}  // namespace potra
