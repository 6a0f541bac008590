#include "potra/bench.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "detail.hpp"
#include "potra/xoshiro.hpp"

namespace potra {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

constexpr Representation kAllRepresentations[] = {Representation::kCsr, Representation::kCsrRnd,
                                                  Representation::kCsc, Representation::kCscRnd};

}  // namespace

const char* to_string(Representation r) {
  switch (r) {
    case Representation::kCsr: return "CSR";
    case Representation::kCsrRnd: return "CSR-Rnd";
    case Representation::kCsc: return "CSC";
    case Representation::kCscRnd: return "CSC-Rnd";
  }
  return "?";
}

Representation parse_representation(const std::string& name) {
  for (Representation r : kAllRepresentations) {
    if (lower(name) == lower(to_string(r))) return r;
  }
  throw std::invalid_argument("unknown representation: " + name);
}

std::string file_suffix(Representation r) { return "." + lower(to_string(r)) + ".potg"; }

Representation guess_representation(const std::filesystem::path& path, Orientation stored) {
  const std::string name = lower(path.filename().string());
  // Longest suffixes first: ".csr-rnd.potg" also ends like nothing shorter.
  for (Representation r : {Representation::kCsrRnd, Representation::kCscRnd, Representation::kCsr,
                           Representation::kCsc}) {
    if (ends_with(name, file_suffix(r))) return r;
  }
  return stored == Orientation::kCsr ? Representation::kCsr : Representation::kCsc;
}

Representations make_representations(const CsrGraph& g, std::uint64_t seed) {
  Representations out;
  out.csr = g;
  auto rnd = relabel_random(g, seed);
  out.csr_rnd = std::move(rnd.graph);
  out.csc = transpose_oracle(g);
  out.csc_rnd = relabel(out.csc, rnd.mapping);
  return out;
}

std::vector<std::filesystem::path> prepare_representations(const CsrGraph& g, const std::string& prefix,
                                                           std::uint64_t seed) {
  const Representations reps = make_representations(g, seed);
  const std::pair<Representation, const CsrGraph*> items[] = {{Representation::kCsr, &reps.csr},
                                                              {Representation::kCsrRnd, &reps.csr_rnd},
                                                              {Representation::kCsc, &reps.csc},
                                                              {Representation::kCscRnd, &reps.csc_rnd}};
  std::vector<std::filesystem::path> paths;
  for (const auto& [r, graph] : items) {
    paths.emplace_back(prefix + file_suffix(r));
    store_graph(*graph, paths.back());
  }
  return paths;
}

TransposeOutput run_algorithm(const CsrGraph& g, Algorithm algo, int threads, const AlgoOptions& options) {
  switch (algo) {
    case Algorithm::kAtomic: return transpose_atomic(g, threads, options.atomic);
    case Algorithm::kScanTrans: return transpose_scantrans(g, threads, options.footprint_limit);
    case Algorithm::kMergeTrans: {
      const std::uint64_t sub = options.subgraph_edges != 0
                                    ? options.subgraph_edges
                                    : default_subgraph_edges(options.potra.budget.cache_bytes);
      return transpose_mergetrans(g, threads, sub);
    }
    case Algorithm::kPotra: return transpose_potra(g, threads, options.potra);
  }
  throw std::invalid_argument("unknown algorithm");
}

const char* to_string(VerifyMode m) {
  switch (m) {
    case VerifyMode::kAuto: return "auto";
    case VerifyMode::kFull: return "full";
    case VerifyMode::kSample: return "sample";
  }
  return "?";
}

VerifyMode parse_verify_mode(const std::string& name) {
  if (name == "auto") return VerifyMode::kAuto;
  if (name == "full") return VerifyMode::kFull;
  if (name == "sample") return VerifyMode::kSample;
  throw std::invalid_argument("unknown verify mode: " + name);
}

VerifyMode resolve_verify_mode(VerifyMode m, std::uint64_t num_edges) {
  if (m != VerifyMode::kAuto) return m;
  return num_edges <= 100'000'000 ? VerifyMode::kFull : VerifyMode::kSample;
}

namespace {

VerifyReport fail(VerifyReport r, std::string message, std::optional<std::uint64_t> vertex = std::nullopt) {
  r.pass = false;
  r.first_bad_vertex = vertex;
  r.message = std::move(message);
  if (vertex) r.message += " at vertex " + std::to_string(*vertex);
  return r;
}

VerifyReport check_shape(const CsrGraph& input, const CsrGraph& output, VerifyReport r) {
  if (output.orientation() != flipped(input.orientation())) return fail(r, "orientation not flipped");
  if (output.num_vertices() != input.num_vertices()) return fail(r, "vertex count differs");
  if (output.num_edges() != input.num_edges()) return fail(r, "edge count differs");
  r.pass = true;
  return r;
}

std::optional<std::uint64_t> first_offset_mismatch(std::span<const EdgeIndex> a, std::span<const EdgeIndex> b) {
  auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
  if (ia == a.end()) return std::nullopt;
  // offsets[v+1] holds the end of v's list.
  const auto i = static_cast<std::uint64_t>(ia - a.begin());
  return i == 0 ? 0 : i - 1;
}

VerifyReport verify_full(const CsrGraph& input, const CsrGraph& output, VerifyReport r, int threads) {
  const CsrGraph expected = transpose_oracle(input);
  const CsrGraph got = sort_neighbor_lists(output, threads);
  if (auto v = first_offset_mismatch(expected.offsets(), got.offsets())) return fail(r, "degree differs", v);
  for (std::uint64_t v = 0; v < expected.num_vertices(); ++v) {
    const auto a = expected.neighbors(v);
    const auto b = got.neighbors(v);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) return fail(r, "neighbor list differs", v);
  }
  r.pass = true;
  return r;
}

VerifyReport verify_sample(const CsrGraph& input, const CsrGraph& output, VerifyReport r, std::uint64_t seed,
                           int threads, std::uint64_t sample_vertices) {
  const std::uint64_t n = input.num_vertices();
  const auto offsets = input.offsets();
  const auto edges = input.edges();

  std::vector<std::uint64_t> expected(n + 1, 0);
  {
    std::vector<std::uint32_t> counts(n, 0);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::uint64_t i = 0; i < edges.size(); ++i) detail::bump<false>(counts[edges[i]]);
    for (std::uint64_t v = 0; v < n; ++v) expected[v + 1] = expected[v] + counts[v];
  }
  if (auto v = first_offset_mismatch(expected, output.offsets())) return fail(r, "degree differs", v);

  // Seeded vertex sample; the expected list of each sampled vertex is
  // gathered by one pass over the input.
  std::vector<std::int64_t> slot(n, -1);
  std::vector<std::uint64_t> sample;
  Xoshiro256StarStar rng(seed);
  if (sample_vertices >= n) {
    for (std::uint64_t v = 0; v < n; ++v) sample.push_back(v);
  } else {
    while (sample.size() < sample_vertices) {
      const std::uint64_t v = rng.next_below(n);
      if (slot[v] < 0) {
        slot[v] = 0;
        sample.push_back(v);
      }
    }
  }
  std::sort(sample.begin(), sample.end());
  for (std::uint64_t i = 0; i < sample.size(); ++i) slot[sample[i]] = static_cast<std::int64_t>(i);

  std::vector<std::vector<VertexId>> lists(sample.size());
  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      if (slot[edges[i]] >= 0) lists[static_cast<std::uint64_t>(slot[edges[i]])].push_back(static_cast<VertexId>(u));
    }
  }
  for (std::uint64_t i = 0; i < sample.size(); ++i) {
    const auto got_span = output.neighbors(sample[i]);
    std::vector<VertexId> got(got_span.begin(), got_span.end());
    std::sort(got.begin(), got.end());
    if (got != lists[i]) return fail(r, "neighbor multiset differs", sample[i]);
  }
  r.pass = true;
  return r;
}

}  // namespace

VerifyReport verify_output(const CsrGraph& input, const CsrGraph& output, VerifyMode mode, std::uint64_t seed,
                           int threads, std::uint64_t sample_vertices) {
  VerifyReport r;
  r.mode = resolve_verify_mode(mode, input.num_edges());
  threads = std::max(1, threads);
  r = check_shape(input, output, r);
  if (!r.pass) return r;
  return r.mode == VerifyMode::kFull ? verify_full(input, output, r, threads)
                                     : verify_sample(input, output, r, seed, threads, sample_vertices);
}

namespace {

RunReport run_cell(const BenchDataset& d, Algorithm algo, int threads, const BenchConfig& config) {
  RunReport report;
  report.dataset = d.name;
  report.representation = d.representation;
  report.algo = algo;
  report.threads = threads;
  report.graph_bytes = d.graph.size_bytes();

  AlgoOptions options = config.options;
  options.potra.seed = config.seed;

  struct Rep {
    double total;
    PhaseTimes phases;
  };
  std::vector<Rep> reps;
  try {
    for (int i = 0; i < std::max(1, config.repetitions); ++i) {
      detail::Stopwatch watch;
      TransposeOutput out = run_algorithm(d.graph, algo, threads, options);
      if (config.sort && !out.sorted) out = sort_neighbor_lists(std::move(out), threads);
      reps.push_back({watch.seconds(), out.phase_times});
      if (i == 0) {
        report.aux_footprint_bytes = out.aux_footprint_bytes;
        if (out.potra) {
          report.method_chosen = out.potra->method_chosen;
          report.coverage = out.potra->coverage_exact ? *out.potra->coverage_exact : out.potra->coverage_estimate;
          report.k = out.potra->k;
        }
        if (config.verify) {
          const VerifyReport v = verify_output(d.graph, out.graph, config.verify_mode, config.seed, threads);
          report.verify_mode = to_string(v.mode);
          report.verified = v.pass;
          if (!v.pass) {
            report.status = "verify-fail";
            report.message = v.message;
            return report;
          }
        }
      }
    }
  } catch (const FootprintExceeded& e) {
    report.status = "OOM-precheck";
    report.message = e.what();
    return report;
  } catch (const std::exception& e) {
    report.status = "error";
    report.message = e.what();
    return report;
  }

  std::sort(reps.begin(), reps.end(), [](const Rep& a, const Rep& b) { return a.total < b.total; });
  const Rep& median = reps[(reps.size() - 1) / 2];
  report.repetitions = static_cast<int>(reps.size());
  report.total_time = median.total;
  report.phase_times = median.phases;
  report.sort_time = median.phases.sort;
  report.status = "ok";
  return report;
}

}  // namespace

std::vector<RunReport> run_benchmark(const std::vector<BenchDataset>& datasets, const BenchConfig& config) {
  std::vector<RunReport> runs;
  for (const BenchDataset& d : datasets) {
    for (int threads : config.threads) {
      const std::size_t first = runs.size();
      for (Algorithm algo : config.algorithms) runs.push_back(run_cell(d, algo, threads, config));
      const RunReport* base = nullptr;
      for (std::size_t i = first; i < runs.size(); ++i) {
        if (runs[i].algo == Algorithm::kAtomic && runs[i].status == "ok") base = &runs[i];
      }
      if (!base || base->total_time <= 0) continue;
      for (std::size_t i = first; i < runs.size(); ++i) {
        if (runs[i].status == "ok" && runs[i].total_time > 0) {
          runs[i].speedup_vs_baseline = base->total_time / runs[i].total_time;
        }
      }
    }
  }
  return runs;
}

namespace {

template <class T>
void put_optional(std::ostream& out, const std::optional<T>& v) {
  if (v) out << *v;
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "dataset,representation,algo,threads,repetitions,status,preprocess_s,count_s,aggregate_s,write_s,sort_s,"
         "total_s,aux_footprint_bytes,graph_bytes,verify_mode,verified,method_chosen,coverage,k,speedup\n";
  out << std::setprecision(9);
  for (const RunReport& r : runs) {
    const PhaseTimes& p = r.phase_times;
    out << r.dataset << ',' << to_string(r.representation) << ',' << to_string(r.algo) << ',' << r.threads << ','
        << r.repetitions << ',' << r.status << ',' << p.preprocess << ',' << p.count << ',' << p.aggregate << ','
        << p.write << ',' << r.sort_time << ',' << r.total_time << ',' << r.aux_footprint_bytes << ','
        << r.graph_bytes << ',' << r.verify_mode << ',' << (r.verified ? 1 : 0) << ',' << r.method_chosen << ',';
    put_optional(out, r.coverage);
    out << ',';
    put_optional(out, r.k);
    out << ',';
    put_optional(out, r.speedup_vs_baseline);
    out << '\n';
  }
}

void footprint_report(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "dataset,representation,algo,threads,aux_footprint_bytes,graph_bytes,footprint_multiple\n";
  out << std::setprecision(9);
  for (const RunReport& r : runs) {
    if (r.status != "ok") continue;
    const double multiple = r.graph_bytes == 0 ? 0.0
                                               : static_cast<double>(r.aux_footprint_bytes) /
                                                     static_cast<double>(r.graph_bytes);
    out << r.dataset << ',' << to_string(r.representation) << ',' << to_string(r.algo) << ',' << r.threads << ','
        << r.aux_footprint_bytes << ',' << r.graph_bytes << ',' << multiple << '\n';
  }
}

nlohmann::json to_json(const PhaseTimes& t) {
  return {{"preprocess", t.preprocess}, {"count", t.count}, {"aggregate", t.aggregate},
          {"write", t.write},           {"sort", t.sort},   {"sum", t.sum()}};
}

nlohmann::json to_json(const TransposeOutput& t) {
  nlohmann::json j = {{"schema_version", kReportSchemaVersion},
                      {"method", t.method},
                      {"vertices", t.graph.num_vertices()},
                      {"edges", t.graph.num_edges()},
                      {"orientation", to_string(t.graph.orientation())},
                      {"sorted", t.sorted},
                      {"phase_times", to_json(t.phase_times)},
                      {"aux_footprint_bytes", t.aux_footprint_bytes}};
  if (t.potra) {
    const PotraRunInfo& p = *t.potra;
    j["potra"] = {{"method_chosen", p.method_chosen},
                  {"forced", p.forced},
                  {"k_budget", p.k_budget},
                  {"k", p.k},
                  {"sample_size", p.sample_size},
                  {"coverage_estimate", p.coverage_estimate},
                  {"coverage_exact", p.coverage_exact ? nlohmann::json(*p.coverage_exact) : nlohmann::json()},
                  {"probe_edges", p.probe_edges},
                  {"probe_atomic_ns_per_edge", p.probe_atomic_ns_per_edge},
                  {"probe_hlh_ns_per_edge", p.probe_hlh_ns_per_edge},
                  {"probe_warning", p.probe_warning},
                  {"partitions", p.partitions},
                  {"hdv_footprint_bytes", p.hdv_footprint_bytes},
                  {"shared_footprint_bytes", p.shared_footprint_bytes},
                  {"write_imbalance", p.write_imbalance}};
  }
  return j;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j = {{"dataset", r.dataset},
                      {"representation", to_string(r.representation)},
                      {"algo", to_string(r.algo)},
                      {"threads", r.threads},
                      {"repetitions", r.repetitions},
                      {"status", r.status},
                      {"message", r.message},
                      {"phase_times", to_json(r.phase_times)},
                      {"total_time", r.total_time},
                      {"sort_time", r.sort_time},
                      {"aux_footprint_bytes", r.aux_footprint_bytes},
                      {"graph_bytes", r.graph_bytes},
                      {"verify_mode", r.verify_mode},
                      {"verified", r.verified},
                      {"method_chosen", r.method_chosen}};
  j["coverage"] = r.coverage ? nlohmann::json(*r.coverage) : nlohmann::json();
  j["k"] = r.k ? nlohmann::json(*r.k) : nlohmann::json();
  j["speedup_vs_baseline"] = r.speedup_vs_baseline ? nlohmann::json(*r.speedup_vs_baseline) : nlohmann::json();
  return j;
}

nlohmann::json bench_json(const BenchConfig& config, const std::vector<RunReport>& runs) {
  nlohmann::json algos = nlohmann::json::array();
  for (Algorithm a : config.algorithms) algos.push_back(to_string(a));
  nlohmann::json j = {{"schema_version", kReportSchemaVersion},
                      {"config",
                       {{"algorithms", algos},
                        {"threads", config.threads},
                        {"repetitions", config.repetitions},
                        {"verify", config.verify},
                        {"verify_mode", to_string(config.verify_mode)},
                        {"sort", config.sort},
                        {"seed", config.seed},
                        {"cache_bytes", config.options.potra.budget.cache_bytes}}},
                      {"runs", nlohmann::json::array()}};
  for (const RunReport& r : runs) j["runs"].push_back(to_json(r));
  return j;
}

}  // namespace potra
