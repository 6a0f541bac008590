// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "potra/bench.hpp"
#include "potra/graph.hpp"
#include "potra/memlat.hpp"
#include "potra/model.hpp"
#include "potra/potra.hpp"
#include "potra/transpose.hpp"
#include "potra/xoshiro.hpp"
#include "test_util.hpp"

using namespace potra;

namespace {

// Tolerances.
constexpr double kModelRelTol = 1e-9;
constexpr double kCrossoverAbsTol = 1e-9;
constexpr double kMissSlack = 0.10;
constexpr double kCoverageTol = 0.05;
constexpr int kCoverageSeedsNeeded = 19;
constexpr double kFootprintLineTol = 0.10;
constexpr double kHdvBudgetFactor = 1.10;
constexpr double kRegretBound = 1.25;
constexpr double kOracleSeconds = 120;
constexpr double kSamplingSeconds = 300;

struct Result {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

CsrGraph corpus_graph(std::uint64_t i) {
  // Graph 0 sends every edge to one vertex.
  return test::random_graph(1000 + i, 1000, 10000, i == 0 ? test::Shape::kStar : test::shape_for(i));
}

std::uint64_t subgraph_size(std::uint64_t i) { return 1 + (i * 977) % 4096; }

PotraOptions small_potra(std::uint64_t seed) {
  PotraOptions o;
  o.budget.cache_bytes = 4096;
  o.partition_edges = 64;
  o.sample_fraction = 0.1;
  o.check_writes = true;
  o.seed = seed;
  return o;
}

struct Variant {
  const char* name;
  std::function<TransposeOutput(const CsrGraph&, int)> run;
};

std::vector<Variant> variants(std::uint64_t i) {
  return {
      {"atomic", [](const CsrGraph& g, int t) { return transpose_atomic(g, t, AtomicOptions{64}); }},
      {"scantrans", [](const CsrGraph& g, int t) { return transpose_scantrans(g, t); }},
      {"mergetrans", [i](const CsrGraph& g, int t) { return transpose_mergetrans(g, t, subgraph_size(i)); }},
      {"potra-hlh",
       [i](const CsrGraph& g, int t) {
         PotraOptions o = small_potra(i);
         o.force_method = Method::kHlh;
         return transpose_potra(g, t, o);
       }},
      {"potra-auto", [i](const CsrGraph& g, int t) { return transpose_potra(g, t, small_potra(i)); }},
  };
}

constexpr int kCorpusThreads[] = {1, 2, 3, 8};
constexpr std::uint64_t kCorpusSize = 200;

Result oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Result r;
  std::uint64_t runs = 0;
  for (std::uint64_t i = 0; i < kCorpusSize && r.pass; ++i) {
    const CsrGraph g = corpus_graph(i);
    const CsrGraph oracle = transpose_oracle(g);
    for (int t : kCorpusThreads) {
      for (const Variant& v : variants(i)) {
        ++runs;
        if (sort_neighbor_lists(v.run(g, t).graph, t) != oracle) {
          r.pass = false;
          r.detail = std::string(v.name) + " differs on graph " + std::to_string(i) + " at " + std::to_string(t) +
                     " threads";
          break;
        }
      }
      if (!r.pass) break;
    }
  }
  const double s = seconds_since(start);
  if (r.pass && s >= kOracleSeconds) {
    r.pass = false;
    r.detail = "took " + fmt("%.1f", s) + " s";
  }
  if (r.pass) r.detail = std::to_string(runs) + " runs bit-identical in " + fmt("%.1f", s) + " s";
  return r;
}

Result involution() {
  Result r;
  std::uint64_t runs = 0;
  for (std::uint64_t i = 0; i < kCorpusSize && r.pass; ++i) {
    const CsrGraph g = corpus_graph(i);
    const CsrGraph sorted = sort_lists(g);
    for (int t : kCorpusThreads) {
      for (const Variant& v : variants(i)) {
        ++runs;
        const CsrGraph once = v.run(g, t).graph;
        if (sort_neighbor_lists(v.run(once, t).graph, t) != sorted) {
          r.pass = false;
          r.detail = std::string(v.name) + " on graph " + std::to_string(i) + " at " + std::to_string(t) + " threads";
          break;
        }
      }
      if (!r.pass) break;
    }
  }
  if (r.pass) r.detail = std::to_string(runs) + " double transpositions equal the sorted input";
  return r;
}

Result counter_wrap() {
  const std::uint64_t n = 100000;
  const std::vector<VertexId> hdv = {11, 222, 3333, 44444, 99999};
  const std::vector<std::uint64_t> degree = {255, 256, 257, 300, 70000};
  Xoshiro256StarStar rng(77);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (std::size_t j = 0; j < hdv.size(); ++j) {
    for (std::uint64_t e = 0; e < degree[j]; ++e) pairs.emplace_back(static_cast<VertexId>(rng.next_below(n)), hdv[j]);
  }
  for (int e = 0; e < 200000; ++e) {
    auto v = static_cast<VertexId>(rng.next_below(n));
    if (std::find(hdv.begin(), hdv.end(), v) != hdv.end()) continue;
    pairs.emplace_back(static_cast<VertexId>(rng.next_below(n)), v);
  }
  const CsrGraph g = from_pairs(n, pairs);
  std::vector<std::uint64_t> expected(n, 0);
  for (VertexId v : g.edges()) ++expected[v];

  const HdvPlan plan = make_plan(hdv);
  Result r;
  for (int t : {1, 8}) {
    for (std::uint64_t pe : {std::uint64_t{64}, std::uint64_t{1} << 18}) {
      const HlhCounters c = count_degrees_hlh(g, plan, t, pe);
      if (assemble_degrees(c, plan) != expected) {
        r.pass = false;
        r.detail = "assembled degrees differ at " + std::to_string(t) + " threads";
        return r;
      }
      if (t == 1) {
        for (std::size_t j = 0; j < hdv.size(); ++j) {
          if (c.hdv_high[0][j] != degree[j] / 256 || c.hdv_low[0][j] != degree[j] % 256) {
            r.pass = false;
            r.detail = "split counter of degree " + std::to_string(degree[j]) + " is wrong";
            return r;
          }
        }
      }
      PotraOptions o;
      o.hdv_ids = hdv;
      o.force_method = Method::kHlh;
      o.partition_edges = pe;
      o.check_writes = true;
      o.budget.cache_bytes = 1 << 20;
      if (sort_neighbor_lists(transpose_potra(g, t, o).graph, t) != transpose_oracle(g)) {
        r.pass = false;
        r.detail = "transpose differs at " + std::to_string(t) + " threads";
        return r;
      }
    }
  }
  r.detail = "degrees {255,256,257,300,70000} exact at 1 and 8 threads";
  return r;
}

Result sampling_quality() {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t n = 1000000, m = 10000000;
  const double fraction = 10000.0 / static_cast<double>(n);
  // Two selection sizes: a small fixed k and the k implied by a 1 MiB budget at 8 threads.
  const std::uint64_t k_budget = hdv_count(HdvBudget{1 << 20, 12, 0.5, 13, 8}).k;
  const std::uint64_t ks[] = {256, k_budget};
  Result r;
  std::ostringstream detail;
  double worst = 0;
  for (std::uint64_t k : ks) {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CsrGraph g = generate_skewed(n, m, 1.2, seed, 1);
      const HdvPlan plan = sample_hdv(g, k, fraction, seed + 100);
      const double err = std::abs(plan.coverage_estimate - coverage_exact(g, plan));
      worst = std::max(worst, err);
      good += err <= kCoverageTol;
    }
    detail << "k=" << k << ": " << good << "/20 within " << kCoverageTol << "; ";
    if (good < kCoverageSeedsNeeded) r.pass = false;
  }

  // Exact top-k at full sampling.
  const CsrGraph g = generate_skewed(n, m, 1.2, 7, 1);
  std::vector<std::uint64_t> freq(n, 0);
  for (VertexId v : g.edges()) ++freq[v];
  std::vector<VertexId> order(n);
  for (VertexId v = 0; v < n; ++v) order[v] = v;
  const std::uint64_t k = 256;
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](VertexId a, VertexId b) { return freq[a] != freq[b] ? freq[a] > freq[b] : a < b; });
  order.resize(k);
  std::vector<VertexId> got = sample_hdv(g, k, 1.0, 1).hdv_ids;
  std::sort(order.begin(), order.end());
  std::sort(got.begin(), got.end());
  if (got != order) {
    r.pass = false;
    detail << "exact top-k set differs; ";
  } else {
    detail << "exact top-256 recovered; ";
  }
  const double s = seconds_since(start);
  if (s >= kSamplingSeconds) r.pass = false;
  detail << "worst error " << fmt("%.4f", worst) << ", " << fmt("%.1f", s) << " s";
  r.detail = detail.str();
  return r;
}

Result footprint_scaling() {
  Result r;
  std::ostringstream detail;
  const CsrGraph g = generate_skewed(1000000, 2000000, 1.0, 3, 1);
  const double n = static_cast<double>(g.num_vertices());
  // Least-squares line through the origin, plus each point.
  double sxy = 0, sxx = 0;
  for (int t : {4, 8, 16}) {
    const double measured = static_cast<double>(transpose_scantrans(g, t).aux_footprint_bytes);
    const double predicted = t * n * 4;
    if (std::abs(measured / predicted - 1) > kFootprintLineTol) r.pass = false;
    sxy += t * measured;
    sxx += static_cast<double>(t) * t;
  }
  const double slope = sxy / sxx;
  if (std::abs(slope / (n * 4) - 1) > kFootprintLineTol) r.pass = false;
  detail << "ScanTrans slope " << fmt("%.4f", slope / n) << " bytes per vertex-thread; ";

  const std::uint64_t budget = 256 << 10;
  double worst = 0;
  for (int t : {1, 4, 8, 16}) {
    for (bool forced : {true, false}) {
      PotraOptions o;
      o.budget.cache_bytes = budget;
      o.partition_edges = 1 << 14;
      if (forced) o.force_method = Method::kHlh;
      const TransposeOutput out = transpose_potra(g, t, o);
      const double ratio = static_cast<double>(out.potra->hdv_footprint_bytes) / static_cast<double>(budget);
      worst = std::max(worst, ratio);
      if (ratio > kHdvBudgetFactor) r.pass = false;
    }
  }
  detail << "PoTra HDV footprint at most " << fmt("%.3f", worst) << "x the cache budget";
  r.detail = detail.str();
  return r;
}

bool rel_close(double a, double b) {
  return std::abs(a - b) <= kModelRelTol * std::max({std::abs(a), std::abs(b), 1e-300});
}

Result model_arithmetic() {
  Result r;
  auto expect = [&](bool ok, const char* what) {
    if (!ok && r.pass) {
      r.pass = false;
      r.detail = what;
    }
  };
  expect(hdv_count(HdvBudget{1000, 8, 0.5, 1, 16}).k == 1000 / (16 + 16), "hdv_count small");
  expect(hdv_count(HdvBudget{1000, 1, 1.0, 1, 1}).k == 500, "hdv_count unit");
  expect(hdv_count(HdvBudget{134217728, 12, 0.5, 8, 128}).k == 128070, "hdv_count 128 MiB");

  MemoryTimings t;
  t.t_r_h = 0.7;
  t.t_w_h = 0.6;
  t.t_aw_h = 0.3;
  t.t_r_m = 9;
  t.t_w_m = 8;
  t.t_aw_m = 1.6;
  ModelInput m{t, 0.0, 0.5, 0};
  expect(rel_close(atomic_per_edge(m), 1.6), "atomic at h=0");
  m.hit_ratio = 1;
  expect(rel_close(atomic_per_edge(m), 0.3), "atomic at h=1");
  m.hit_ratio = 0.25;
  expect(rel_close(atomic_per_edge(m), 0.25 * 0.3 + 0.75 * 1.6), "atomic at h=0.25");
  expect(rel_close(hlh_per_edge(m), 0.5 * (0.6 - 1.6) + 1.6 + 0.7), "hlh at coverage 0.5");
  m.coverage = 0;
  expect(rel_close(hlh_per_edge(m), 1.6 + 0.7), "hlh at coverage 0");
  m.coverage = 1;
  expect(rel_close(hlh_per_edge(m), 0.6 + 0.7), "hlh at coverage 1");

  MemoryTimings s;
  s.t_aw_h = 1;
  s.t_aw_m = 5;
  s.t_w_h = 1;
  s.t_r_h = 1;
  ModelInput c{s, 0, 0.5, 0};
  const Crossover x = crossover(c);
  expect(x.kind == Crossover::Kind::kValue && rel_close(x.h, 0.25), "crossover 0.25");

  double worst = 0;
  for (double aw_m : {0.54, 1.6, 5.9, 20.0}) {
    for (double cov : {0.0, 0.2, 0.5, 0.9}) {
      MemoryTimings u;
      u.t_r_h = 0.1;
      u.t_w_h = 0.26;
      u.t_aw_h = 0.3;
      u.t_aw_m = aw_m;
      ModelInput in{u, 0, cov, 0};
      const Crossover k = crossover(in);
      if (k.kind != Crossover::Kind::kValue) continue;
      in.hit_ratio = k.h;
      worst = std::max(worst, std::abs(atomic_per_edge(in) - hlh_per_edge(in)));
    }
  }
  expect(worst < kCrossoverAbsTol, "crossover tie");
  if (r.pass) r.detail = "worst crossover gap " + fmt("%.2e", worst) + " ns";
  return r;
}

Result microbench_sanity() {
  Result r;
  Xoshiro256StarStar rng(Xoshiro256StarStar::State{1, 2, 3, 4});
  const std::uint64_t ref[] = {11520ULL,
                               0ULL,
                               1509978240ULL,
                               1215971899390074240ULL,
                               1216172134540287360ULL,
                               607988272756665600ULL,
                               16172922978634559625ULL,
                               8476171486693032832ULL,
                               10595114339597558777ULL,
                               2904607092377533576ULL};
  for (std::uint64_t v : ref) {
    if (rng() != v) {
      r.pass = false;
      r.detail = "xoshiro256** reference vector mismatch";
      return r;
    }
  }
  MeasureOptions o;
  o.threads = 1;
  o.total_l3_bytes = detect_l3_bytes().value_or(std::uint64_t{32} << 20);
  o.iterations = 1 << 22;
  o.seed = 1;
  o.max_miss_bytes = std::uint64_t{2} << 30;
  const MemoryTimings t = measure_timings(o);
  r.pass = miss_not_faster(t, kMissSlack);
  std::ostringstream d;
  d << "hit/miss ns: read " << fmt("%.2f", t.t_r_h) << "/" << fmt("%.2f", t.t_r_m) << ", write "
    << fmt("%.2f", t.t_w_h) << "/" << fmt("%.2f", t.t_w_m) << ", atomic " << fmt("%.2f", t.t_aw_h) << "/"
    << fmt("%.2f", t.t_aw_m) << " (L3 " << (o.total_l3_bytes >> 20) << " MiB, miss array "
    << (t.miss_array_bytes >> 20) << " MiB); reference vector matches";
  r.detail = d.str();
  return r;
}

Result probe_regret() {
  const int threads = 8;
  const unsigned hw = std::thread::hardware_concurrency();
  const CsrGraph g = relabel_random(generate_skewed(10000000, 100000000, 1.0, 11, threads), 12).graph;

  auto median_time = [&](std::optional<Method> force) {
    std::vector<double> times;
    for (int rep = 0; rep < 3; ++rep) {
      PotraOptions o;
      o.budget.cache_bytes = default_cache_budget();
      o.force_method = force;
      o.seed = static_cast<std::uint64_t>(rep);
      const auto start = std::chrono::steady_clock::now();
      const TransposeOutput out = transpose_potra(g, threads, o);
      times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());
    return times[1];
  };
  const double atomic = median_time(Method::kAtomic);
  const double hlh = median_time(Method::kHlh);
  const double automatic = median_time(std::nullopt);
  const double ratio = automatic / std::min(atomic, hlh);
  Result r;
  r.pass = ratio <= kRegretBound;
  std::ostringstream d;
  d << "auto " << fmt("%.2f", automatic) << " s, atomic " << fmt("%.2f", atomic) << " s, hlh " << fmt("%.2f", hlh)
    << " s, ratio " << fmt("%.3f", ratio) << " (bound " << kRegretBound << "); " << threads << " threads on " << hw
    << " hardware threads";
  if (hw < 8) d << ", below the 8 hardware threads the bound assumes";
  r.detail = d.str();
  return r;
}

Result sorted_by_construction() {
  Result r;
  std::uint64_t runs = 0;
  for (std::uint64_t i = 0; i < kCorpusSize && r.pass; ++i) {
    const CsrGraph g = corpus_graph(i);
    for (int t : kCorpusThreads) {
      const TransposeOutput scan = transpose_scantrans(g, t);
      const TransposeOutput merge = transpose_mergetrans(g, t, subgraph_size(i));
      runs += 2;
      if (!lists_sorted(scan.graph) || !lists_sorted(merge.graph) || scan.phase_times.sort != 0 ||
          merge.phase_times.sort != 0) {
        r.pass = false;
        r.detail = "unsorted output on graph " + std::to_string(i);
        break;
      }
    }
  }
  if (r.pass) r.detail = std::to_string(runs) + " outputs sorted without a sort pass";
  return r;
}

Result prefix_sum_oracle() {
  Result r;
  Xoshiro256StarStar rng(2024);
  std::vector<std::uint64_t> counts(1000000);
  for (auto& c : counts) c = rng.next_below(1 << 20);
  std::vector<std::uint64_t> serial(counts.size() + 1, 0);
  for (std::size_t i = 0; i < counts.size(); ++i) serial[i + 1] = serial[i] + counts[i];
  for (int t : {1, 7, 64}) {
    if (prefix_sum_parallel(counts, t) != serial) {
      r.pass = false;
      r.detail = "differs at " + std::to_string(t) + " threads";
      return r;
    }
  }
  r.detail = "10^6 counts identical at 1, 7 and 64 threads";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    Result (*run)();
  };
  const Criterion criteria[] = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "involution", involution},
      {3, "counter wrap", counter_wrap},
      {4, "sampling quality", sampling_quality},
      {5, "footprint scaling", footprint_scaling},
      {6, "model arithmetic", model_arithmetic},
      {7, "microbenchmark sanity", microbench_sanity},
      {8, "probe regret", probe_regret},
      {9, "sorted by construction", sorted_by_construction},
      {10, "prefix-sum oracle", prefix_sum_oracle},
  };
  // Optional arguments select criteria by number.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    failed += !r.pass;
    std::printf("criterion %2d %-24s %s  %s\n", c.id, c.name, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
