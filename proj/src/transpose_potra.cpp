#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"
#include "potra/potra.hpp"
#include "potra/xoshiro.hpp"

namespace potra {

namespace {

#ifdef NDEBUG
constexpr bool kDebugChecks = false;
#else
constexpr bool kDebugChecks = true;
#endif

// Step-1 kernel of HLH over edges [lo, hi).
template <bool checked>
bool count_range_hlh(std::span<const VertexId> edges, std::uint64_t lo, std::uint64_t hi, const HdvTable& table,
                     std::vector<std::uint32_t>& ldv, std::uint8_t* low, std::uint32_t* high) {
  bool ok = true;
  for (std::uint64_t i = lo; i < hi; ++i) {
    const VertexId v = edges[i];
    const std::uint32_t idx = table.find(v);
    if (idx == HdvTable::kNotFound) {
      ok = detail::bump<checked>(ldv[v]) && ok;
    } else if (++low[idx] == 0) {
      ++high[idx];
    }
  }
  return ok;
}

struct Footprint {
  detail::FootprintTracker total, shared, hdv;
  void add_shared(std::uint64_t b) { shared.add(b), total.add(b); }
  void remove_shared(std::uint64_t b) { shared.remove(b), total.remove(b); }
  void add_hdv(std::uint64_t b) { hdv.add(b), total.add(b); }
  void remove_hdv(std::uint64_t b) { hdv.remove(b), total.remove(b); }
};

}  // namespace

ProbeDecision probe_methods(const CsrGraph& g, const HdvPlan& plan, std::uint64_t probe_edges, int threads,
                            std::uint64_t seed) {
  threads = std::max(1, threads);
  ProbeDecision d;
  const std::uint64_t m = g.num_edges();
  probe_edges = std::min(probe_edges, m);
  if (probe_edges == 0) {
    d.method = Method::kAtomic;
    d.warning = "no edges to probe; defaulting to atomic";
    return d;
  }
  d.probe_edges = probe_edges;
  const auto edges = g.edges();
  Xoshiro256StarStar rng(stream_seed(seed, 0x9b0be));
  const std::uint64_t lo = rng.next_below(m - probe_edges + 1);
  const std::uint64_t hi = lo + probe_edges;

  std::vector<std::uint32_t> scratch(g.num_vertices(), 0);
  std::vector<std::vector<std::uint8_t>> low(threads);
  std::vector<std::vector<std::uint32_t>> high(threads);

  auto run_atomic = [&] {
    detail::Stopwatch clock;
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::uint64_t i = lo; i < hi; ++i) detail::bump<false>(scratch[edges[i]]);
    return clock.seconds();
  };
  auto run_hlh = [&] {
    detail::Stopwatch clock;
#pragma omp parallel num_threads(threads)
    {
      const int tid = omp_get_thread_num();
      if (low[tid].size() != plan.k) {
        low[tid].assign(plan.k, 0);
        high[tid].assign(plan.k, 0);
      }
      const std::uint64_t n_threads = static_cast<std::uint64_t>(omp_get_num_threads());
      const std::uint64_t a = lo + probe_edges * static_cast<std::uint64_t>(tid) / n_threads;
      const std::uint64_t b = lo + probe_edges * static_cast<std::uint64_t>(tid + 1) / n_threads;
      count_range_hlh<false>(edges, a, b, plan.table, scratch, low[tid].data(), high[tid].data());
    }
    return clock.seconds();
  };

  // Alternate the two and keep the best time of each.
  double atomic_s = std::numeric_limits<double>::max(), hlh_s = atomic_s;
  for (int rep = 0; rep < 2; ++rep) {
    atomic_s = std::min(atomic_s, run_atomic());
    hlh_s = std::min(hlh_s, run_hlh());
  }
  d.atomic_ns_per_edge = atomic_s * 1e9 / static_cast<double>(probe_edges);
  d.hlh_ns_per_edge = hlh_s * 1e9 / static_cast<double>(probe_edges);
  d.method = d.hlh_ns_per_edge < d.atomic_ns_per_edge ? Method::kHlh : Method::kAtomic;
  return d;
}

HlhCounters count_degrees_hlh(const CsrGraph& g, const HdvPlan& plan, int threads,
                              std::uint64_t partition_edges) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (partition_edges < 1) throw std::invalid_argument("partition_edges must be >= 1");
  detail::require_team(threads);
  const std::uint64_t m = g.num_edges();
  const auto edges = g.edges();
  const std::uint64_t parts = (m + partition_edges - 1) / partition_edges;

  HlhCounters c;
  c.partition_edges = partition_edges;
  c.ldv_counters.assign(g.num_vertices(), 0);
  c.hdv_low.resize(threads);
  c.hdv_high.resize(threads);
  c.part2tid.assign(parts, 0);
  const bool may_wrap = detail::counters_may_wrap(m);
  std::atomic<std::uint64_t> next{0};
  bool ok = true;

#pragma omp parallel num_threads(threads) reduction(&& : ok)
  {
    const int tid = omp_get_thread_num();
    auto& low = c.hdv_low[tid];
    auto& high = c.hdv_high[tid];
    low.assign(plan.k, 0);
    high.assign(plan.k, 0);
    for (;;) {
      const std::uint64_t p = next.fetch_add(1, std::memory_order_relaxed);
      if (p >= parts) break;
      c.part2tid[p] = static_cast<std::uint32_t>(tid);
      const std::uint64_t lo = p * partition_edges, hi = std::min(m, lo + partition_edges);
      ok = (may_wrap ? count_range_hlh<true>(edges, lo, hi, plan.table, c.ldv_counters, low.data(), high.data())
                     : count_range_hlh<false>(edges, lo, hi, plan.table, c.ldv_counters, low.data(), high.data())) &&
           ok;
    }
  }
  if (!ok) throw CounterOverflow("LDV transposed degree reaches 2^32 in a 32-bit counter");
  return c;
}

namespace {

inline std::uint64_t hdv_count_of(const HlhCounters& c, std::size_t tid, std::uint64_t j) {
  return std::uint64_t{c.hdv_high[tid][j]} * 256 + c.hdv_low[tid][j];
}

}  // namespace

std::vector<std::uint64_t> assemble_degrees(const HlhCounters& c, const HdvPlan& plan) {
  std::vector<std::uint64_t> deg(c.ldv_counters.begin(), c.ldv_counters.end());
  for (std::uint64_t j = 0; j < plan.k; ++j) {
    std::uint64_t d = 0;
    for (std::size_t t = 0; t < c.hdv_low.size(); ++t) d += hdv_count_of(c, t, j);
    deg[plan.hdv_ids[j]] += d;
  }
  return deg;
}

TransposeOutput transpose_potra(const CsrGraph& g, int threads, const PotraOptions& options) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  const std::uint64_t n = g.num_vertices();
  const std::uint64_t m = g.num_edges();
  const auto offsets = g.offsets();
  const auto edges = g.edges();
  const bool check = options.check_writes || kDebugChecks;

  PotraRunInfo info;
  Footprint fp;
  detail::Stopwatch clock;

  auto delegate_to_atomic = [&](double preprocess_s) {
    TransposeOutput out = transpose_atomic(g, threads);
    out.method = to_string(Algorithm::kPotra);
    out.phase_times.preprocess = preprocess_s;
    info.method_chosen = to_string(Method::kAtomic);
    info.shared_footprint_bytes = std::max(fp.shared.peak(), out.aux_footprint_bytes);
    info.hdv_footprint_bytes = fp.hdv.peak();
    out.aux_footprint_bytes = std::max(fp.total.peak(), out.aux_footprint_bytes);
    out.potra = info;
    return out;
  };

  if (options.force_method == Method::kAtomic) {
    info.forced = true;
    return delegate_to_atomic(0.0);
  }

  // Step 0: budget, sampling, probing.
  HdvBudget budget = options.budget;
  budget.threads = threads;
  if (budget.cache_bytes == 0) budget.cache_bytes = default_cache_budget();
  info.k_budget = options.k_override ? *options.k_override : hdv_count(budget).k;

  HdvPlan plan;
  if (options.hdv_ids) {
    plan = make_plan(*options.hdv_ids, budget.load_factor);
  } else {
    // Frequency array plus the held-out half of the draws.
    const std::uint64_t sampling_bytes =
        n * sizeof(std::uint32_t) +
        static_cast<std::uint64_t>(std::ceil(options.sample_fraction * static_cast<double>(n))) / 2 *
            sizeof(VertexId);
    fp.add_shared(sampling_bytes);
    plan = sample_hdv(g, std::min(info.k_budget, n), options.sample_fraction, options.seed, threads,
                      budget.load_factor);
    fp.remove_shared(sampling_bytes);
  }
  fp.add_hdv(plan.table.size_bytes() + plan.hdv_ids.capacity() * sizeof(VertexId));
  info.k = plan.k;
  info.sample_size = plan.sample_size;
  info.coverage_estimate = plan.coverage_estimate;
  if (options.compute_coverage_exact) info.coverage_exact = coverage_exact(g, plan, threads);

  Method method = Method::kHlh;
  if (options.force_method) {
    info.forced = true;
  } else {
    const std::uint64_t probe = options.probe_edges.value_or(default_probe_edges(m));
    fp.add_shared(n * sizeof(std::uint32_t));
    fp.add_hdv(static_cast<std::uint64_t>(threads) * plan.k * 5);
    const ProbeDecision d = probe_methods(g, plan, probe, threads, options.seed);
    fp.remove_hdv(static_cast<std::uint64_t>(threads) * plan.k * 5);
    fp.remove_shared(n * sizeof(std::uint32_t));
    method = d.method;
    info.probe_edges = d.probe_edges;
    info.probe_atomic_ns_per_edge = d.atomic_ns_per_edge;
    info.probe_hlh_ns_per_edge = d.hlh_ns_per_edge;
    info.probe_warning = d.warning;
  }
  const double preprocess_s = clock.lap();
  if (method == Method::kAtomic) return delegate_to_atomic(preprocess_s);
  info.method_chosen = to_string(Method::kHlh);

  TransposeOutput out;
  out.method = to_string(Algorithm::kPotra);
  out.phase_times.preprocess = preprocess_s;
  clock.lap();

  // Step 1
  HlhCounters counters = count_degrees_hlh(g, plan, threads, options.partition_edges);
  const std::uint64_t parts = counters.part2tid.size();
  const std::uint64_t pe = counters.partition_edges;
  info.partitions = parts;
  fp.add_shared(counters.ldv_counters.capacity() * sizeof(std::uint32_t) +
                counters.part2tid.capacity() * sizeof(std::uint32_t));
  const std::uint64_t hdv_counter_bytes = static_cast<std::uint64_t>(threads) * plan.k * 5;
  fp.add_hdv(hdv_counter_bytes);
  out.phase_times.count = clock.lap();

  // Step 2: degrees, offsets, shared LDV insertion points and per-thread
  // HDV insertion points. Thread t owns the sub-range of HDV j that follows
  // the counts of threads 0..t-1.
  std::vector<std::uint64_t> t_offsets(n + 1);
  t_offsets[0] = 0;
#pragma omp parallel num_threads(threads)
  {
#pragma omp for schedule(static)
    for (std::uint64_t v = 0; v < n; ++v) t_offsets[v + 1] = counters.ldv_counters[v];
    // HDV never touch the shared counters, so their entries are still 0.
#pragma omp for schedule(static)
    for (std::uint64_t j = 0; j < plan.k; ++j) {
      std::uint64_t d = 0;
      for (int t = 0; t < threads; ++t) d += hdv_count_of(counters, t, j);
      t_offsets[plan.hdv_ids[j] + 1] = d;
    }
  }
  inclusive_scan_inplace(std::span(t_offsets).subspan(1), threads);
  fp.remove_shared(counters.ldv_counters.capacity() * sizeof(std::uint32_t));
  counters.ldv_counters = {};

  std::vector<std::uint64_t> insertion(n);
  fp.add_shared(insertion.capacity() * sizeof(std::uint64_t));
  std::vector<std::vector<std::uint64_t>> hdv_insertion(threads);
  for (auto& ip : hdv_insertion) ip.resize(plan.k);
  fp.add_hdv(static_cast<std::uint64_t>(threads) * plan.k * sizeof(std::uint64_t));
  std::vector<std::vector<std::uint64_t>> expected_end;
  if (check) expected_end.assign(threads, std::vector<std::uint64_t>(plan.k));
#pragma omp parallel num_threads(threads)
  {
#pragma omp for schedule(static)
    for (std::uint64_t v = 0; v < n; ++v) insertion[v] = t_offsets[v];
#pragma omp for schedule(static)
    for (std::uint64_t j = 0; j < plan.k; ++j) {
      std::uint64_t running = t_offsets[plan.hdv_ids[j]];
      for (int t = 0; t < threads; ++t) {
        hdv_insertion[t][j] = running;
        running += hdv_count_of(counters, t, j);
        if (check) expected_end[t][j] = running;
      }
    }
  }
  fp.remove_hdv(hdv_counter_bytes);
  counters.hdv_low = {};
  counters.hdv_high = {};
  out.phase_times.aggregate = clock.lap();

  // Step 3: every thread revisits exactly the partitions it counted.
  std::vector<VertexId> t_edges(m);
  std::vector<std::atomic<std::uint8_t>> written(check ? m : 0);
  std::vector<double> thread_seconds(threads, 0.0);
  bool disjoint = true;
#pragma omp parallel num_threads(threads) reduction(&& : disjoint)
  {
    detail::Stopwatch own;
    const int tid = omp_get_thread_num();
    auto& hdv_ip = hdv_insertion[tid];
    for (std::uint64_t p = 0; p < parts; ++p) {
      if (counters.part2tid[p] != static_cast<std::uint32_t>(tid)) continue;
      const std::uint64_t lo = p * pe, hi = std::min(m, lo + pe);
      std::uint64_t owner = detail::owner_of(offsets, lo);
      for (std::uint64_t i = lo; i < hi; ++i) {
        while (offsets[owner + 1] <= i) ++owner;
        const VertexId u = edges[i];
        const std::uint32_t idx = plan.lookup(u);
        const std::uint64_t slot = idx == HdvTable::kNotFound ? detail::fetch_inc(insertion[u]) : hdv_ip[idx]++;
        if (check) disjoint = written[slot].exchange(1, std::memory_order_relaxed) == 0 && disjoint;
        t_edges[slot] = static_cast<VertexId>(owner);
      }
    }
    thread_seconds[tid] = own.seconds();
  }
  out.phase_times.write = clock.lap();

  if (check) {
    if (!disjoint) throw std::logic_error("an output slot was written twice");
    for (std::uint64_t v = 0; v < n; ++v) {
      if (plan.lookup(static_cast<VertexId>(v)) == HdvTable::kNotFound && insertion[v] != t_offsets[v + 1]) {
        throw std::logic_error("LDV insertion point did not reach its end");
      }
    }
    for (int t = 0; t < threads; ++t) {
      if (hdv_insertion[t] != expected_end[t]) {
        throw std::logic_error("HDV insertion points misaligned between steps 1 and 3 (part2tid)");
      }
    }
  }

  const double mean = std::accumulate(thread_seconds.begin(), thread_seconds.end(), 0.0) / threads;
  const double worst = *std::max_element(thread_seconds.begin(), thread_seconds.end());
  info.write_imbalance = mean > 0 ? (worst - mean) / mean : 0.0;
  info.hdv_footprint_bytes = fp.hdv.peak();
  info.shared_footprint_bytes = fp.shared.peak();
  out.aux_footprint_bytes = fp.total.peak();
  out.graph = CsrGraph::adopt(std::move(t_offsets), std::move(t_edges), flipped(g.orientation()));
  out.sorted = false;
  out.potra = info;
  return out;
}

}  // namespace potra
