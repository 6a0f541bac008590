// potra: graph transposition toolkit.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "potra/bench.hpp"
#include "potra/graph.hpp"
#include "potra/memlat.hpp"
#include "potra/model.hpp"
#include "potra/potra.hpp"
#include "potra/transpose.hpp"

using namespace potra;

namespace {

constexpr int kExitError = 1;
constexpr int kExitVerify = 2;
constexpr int kExitResource = 3;

struct Globals {
  std::vector<int> threads{1};
  std::uint64_t seed = 0;
  std::string out;
};

struct PotraFlags {
  std::uint64_t cache_bytes = 0;
  double alpha = 0.5;
  double record_bytes = 12;
  double per_hdv_bytes = 13;
  double sample_frac = 0.01;
  std::uint64_t probe_edges = 0;
  bool probe_set = false;
  std::string force_method;
  std::uint64_t k = 0;
  bool coverage_exact = false;
  bool check = false;
  std::uint64_t footprint_limit = 0;
  std::uint64_t subgraph_edges = 0;
};

void add_potra_flags(CLI::App* cmd, PotraFlags& f) {
  cmd->add_option("--cache-bytes", f.cache_bytes, "HDV cache budget (default: L2+L3)");
  cmd->add_option("--alpha", f.alpha, "hash table load factor")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--record-bytes", f.record_bytes, "bytes per hash record");
  cmd->add_option("--per-hdv-bytes", f.per_hdv_bytes, "per-thread bytes per HDV");
  cmd->add_option("--sample-frac", f.sample_frac, "sampled fraction of |V|");
  cmd->add_option("--probe-edges", f.probe_edges, "edges timed by the probe")->each([&](const std::string&) {
    f.probe_set = true;
  });
  cmd->add_option("--force-method", f.force_method, "skip the probe")->check(CLI::IsMember({"atomic", "hlh"}));
  cmd->add_option("--k", f.k, "number of HDV, overriding the budget formula");
  cmd->add_flag("--coverage-exact", f.coverage_exact, "also compute the exact coverage");
  cmd->add_flag("--check", f.check, "verify every output slot is written once");
  cmd->add_option("--footprint-limit", f.footprint_limit, "ScanTrans footprint limit in bytes");
  cmd->add_option("--subgraph-edges", f.subgraph_edges, "MergeTrans subgraph size");
}

AlgoOptions algo_options(const PotraFlags& f, std::uint64_t seed) {
  AlgoOptions o;
  PotraOptions& p = o.potra;
  p.budget.cache_bytes = f.cache_bytes != 0 ? f.cache_bytes : default_cache_budget();
  p.budget.load_factor = f.alpha;
  p.budget.record_bytes = f.record_bytes;
  p.budget.per_hdv_bytes = f.per_hdv_bytes;
  p.sample_fraction = f.sample_frac;
  if (f.probe_set) p.probe_edges = f.probe_edges;
  if (!f.force_method.empty()) p.force_method = parse_method(f.force_method);
  if (f.k != 0) p.k_override = f.k;
  p.seed = seed;
  p.compute_coverage_exact = f.coverage_exact;
  p.check_writes = f.check;
  if (f.footprint_limit != 0) o.footprint_limit = f.footprint_limit;
  o.subgraph_edges = f.subgraph_edges;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string require_out(const Globals& g) {
  if (g.out.empty()) throw std::invalid_argument("--out is required");
  return g.out;
}

nlohmann::json stats_json(const DegreeStats& s) {
  nlohmann::json below = nlohmann::json::object();
  for (auto [t, f] : s.fraction_below) below[std::to_string(t)] = f;
  return {{"max_degree", s.max_degree}, {"fraction_below", below}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-memory graph transposition toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--threads", g.threads, "thread count(s), comma separated for bench")->delimiter(',');
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output path");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a skewed random graph");
  std::uint64_t gen_v = 1000, gen_e = 10000;
  double gen_exp = 1.0;
  bool gen_text = false;
  gen->add_option("--vertices", gen_v)->required();
  gen->add_option("--edges", gen_e)->required();
  gen->add_option("--exponent", gen_exp, "Zipf exponent of destinations");
  gen->add_flag("--text", gen_text, "write an edge list instead of the binary format");

  // relabel
  auto* rel = app.add_subcommand("relabel", "apply a seeded random permutation");
  std::string rel_in, rel_mapping;
  rel->add_option("--in", rel_in)->required();
  rel->add_option("--mapping", rel_mapping, "also write old->new IDs, one per line");

  // prep4
  auto* prep = app.add_subcommand("prep4", "write the CSR, CSR-Rnd, CSC and CSC-Rnd representations");
  std::string prep_in;
  prep->add_option("--in", prep_in)->required();

  // transpose
  auto* tr = app.add_subcommand("transpose", "transpose a graph");
  std::string tr_in, tr_algo = "potra", tr_report;
  bool tr_sort = false;
  PotraFlags tr_flags;
  tr->add_option("--in", tr_in)->required();
  tr->add_option("--algo", tr_algo)->check(CLI::IsMember({"atomic", "scantrans", "mergetrans", "potra"}));
  tr->add_flag("--sort", tr_sort, "sort neighbor lists afterwards");
  tr->add_option("--report", tr_report, "JSON run report");
  add_potra_flags(tr, tr_flags);

  // sort
  auto* srt = app.add_subcommand("sort", "sort every neighbor list");
  std::string srt_in;
  srt->add_option("--in", srt_in)->required();

  // verify
  auto* ver = app.add_subcommand("verify", "check that a graph is the transpose of another");
  std::string ver_in, ver_t, ver_mode = "auto";
  ver->add_option("--in", ver_in, "original graph")->required();
  ver->add_option("--transposed", ver_t, "candidate transpose")->required();
  ver->add_option("--mode", ver_mode)->check(CLI::IsMember({"auto", "full", "sample"}));

  // bench
  auto* bench = app.add_subcommand("bench", "run algorithms over datasets");
  std::vector<std::string> bench_in;
  std::vector<std::string> bench_algos{"atomic", "scantrans", "mergetrans", "potra"};
  int bench_reps = 3;
  std::string bench_verify = "auto", bench_json_path, bench_fp;
  bool bench_sort = false;
  PotraFlags bench_flags;
  bench->add_option("--in", bench_in, "graph files")->required();
  bench->add_option("--algo", bench_algos)
      ->delimiter(',')
      ->check(CLI::IsMember({"atomic", "scantrans", "mergetrans", "potra"}));
  bench->add_option("--reps", bench_reps)->check(CLI::PositiveNumber);
  bench->add_option("--verify", bench_verify)->check(CLI::IsMember({"auto", "full", "sample", "none"}));
  bench->add_flag("--sort", bench_sort, "sort outputs that are not sorted by construction");
  bench->add_option("--json", bench_json_path, "JSON report");
  bench->add_option("--footprint", bench_fp, "footprint CSV");
  add_potra_flags(bench, bench_flags);

  // microbench
  auto* mb = app.add_subcommand("microbench", "measure random-access times for hit and miss regimes");
  MeasureOptions mb_opts;
  mb->add_option("--l3-bytes", mb_opts.total_l3_bytes, "total L3 size (default: detected)");
  mb->add_option("--iters", mb_opts.iterations, "accesses per thread");
  mb->add_option("--max-miss-bytes", mb_opts.max_miss_bytes);

  // model
  auto* mdl = app.add_subcommand("model", "evaluate the per-edge cost model");
  std::string mdl_timings;
  std::vector<double> mdl_cov{0.2, 0.5};
  mdl->add_option("--timings", mdl_timings, "rates CSV written by microbench")->required();
  mdl->add_option("--coverage", mdl_cov)->delimiter(',');
  auto* cross = mdl->add_subcommand("crossover", "hit ratio at which both models tie");
  double cross_cov = 0.2;
  cross->add_option("--coverage", cross_cov)->required();

  auto* hdvk = app.add_subcommand("hdv-count", "number of HDV that fit a cache budget");
  HdvBudget budget;
  hdvk->add_option("--cache-bytes", budget.cache_bytes)->required();
  hdvk->add_option("--alpha", budget.load_factor);
  hdvk->add_option("--record-bytes", budget.record_bytes);
  hdvk->add_option("--per-hdv-bytes", budget.per_hdv_bytes);

  // stats
  auto* st = app.add_subcommand("stats", "degree and locality statistics");
  std::string st_in;
  std::vector<std::uint64_t> st_thresholds{256};
  bool st_hist = false;
  st->add_option("--in", st_in)->required();
  st->add_option("--thresholds", st_thresholds)->delimiter(',');
  st->add_flag("--histogram", st_hist, "include the exact degree histograms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  const int threads = g.threads.empty() ? 1 : g.threads.front();
  try {
    if (*gen) {
      CsrGraph graph = generate_skewed(gen_v, gen_e, gen_exp, g.seed, threads);
      const std::string out = require_out(g);
      if (gen_text) {
        std::ostringstream text;
        for (std::uint64_t v = 0; v < graph.num_vertices(); ++v) {
          for (VertexId u : graph.neighbors(v)) text << v << ' ' << u << '\n';
        }
        write_text(out, text.str());
      } else {
        store_graph(graph, out);
      }
    } else if (*rel) {
      RelabeledGraph r = relabel_random(load_graph_auto(rel_in), g.seed);
      store_graph(r.graph, require_out(g));
      if (!rel_mapping.empty()) {
        std::ostringstream text;
        for (VertexId v : r.mapping) text << v << '\n';
        write_text(rel_mapping, text.str());
      }
    } else if (*prep) {
      for (const auto& p : prepare_representations(load_graph_auto(prep_in), require_out(g), g.seed)) {
        std::cout << p.string() << '\n';
      }
    } else if (*tr) {
      const CsrGraph input = load_graph_auto(tr_in);
      TransposeOutput out = run_algorithm(input, parse_algorithm(tr_algo), threads, algo_options(tr_flags, g.seed));
      if (tr_sort && !out.sorted) out = sort_neighbor_lists(std::move(out), threads);
      if (!g.out.empty()) store_graph(out.graph, g.out);
      if (!tr_report.empty()) write_text(tr_report, to_json(out).dump(2) + "\n");
    } else if (*srt) {
      store_graph(sort_neighbor_lists(load_graph_auto(srt_in), threads), require_out(g));
    } else if (*ver) {
      const VerifyReport r = verify_output(load_graph_auto(ver_in), load_graph_auto(ver_t),
                                           parse_verify_mode(ver_mode), g.seed, threads);
      std::cout << (r.pass ? "pass" : "FAIL") << " (" << to_string(r.mode) << ")";
      if (!r.pass) std::cout << ": " << r.message;
      std::cout << '\n';
      if (!r.pass) return kExitVerify;
    } else if (*bench) {
      BenchConfig config;
      for (const auto& a : bench_algos) config.algorithms.push_back(parse_algorithm(a));
      config.threads = g.threads;
      config.repetitions = bench_reps;
      config.verify = bench_verify != "none";
      if (config.verify) config.verify_mode = parse_verify_mode(bench_verify);
      config.sort = bench_sort;
      config.seed = g.seed;
      config.options = algo_options(bench_flags, g.seed);
      std::vector<BenchDataset> datasets;
      for (const auto& path : bench_in) {
        BenchDataset d;
        d.graph = load_graph_auto(path);
        d.representation = guess_representation(path, d.graph.orientation());
        d.name = std::filesystem::path(path).filename().string();
        const std::string suffix = file_suffix(d.representation);
        if (d.name.size() > suffix.size() && d.name.ends_with(suffix)) d.name.resize(d.name.size() - suffix.size());
        datasets.push_back(std::move(d));
      }
      const auto runs = run_benchmark(datasets, config);
      std::ostringstream csv;
      write_runs_csv(csv, runs);
      write_text(g.out, csv.str());
      if (!bench_json_path.empty()) write_text(bench_json_path, bench_json(config, runs).dump(2) + "\n");
      if (!bench_fp.empty()) {
        std::ostringstream fp;
        footprint_report(fp, runs);
        write_text(bench_fp, fp.str());
      }
      for (const auto& r : runs) {
        if (r.status == "verify-fail") return kExitVerify;
      }
    } else if (*mb) {
      mb_opts.threads = threads;
      mb_opts.seed = g.seed;
      if (mb_opts.total_l3_bytes == 0) {
        const auto l3 = detect_l3_bytes();
        if (!l3) throw std::invalid_argument("cannot detect the L3 size; pass --l3-bytes");
        mb_opts.total_l3_bytes = *l3;
      }
      const MemoryTimings t = measure_timings(mb_opts);
      std::ostringstream csv;
      write_rates_csv(csv, t);
      write_text(g.out, csv.str());
      const nlohmann::json meta = {{"threads", t.threads},
                                   {"hit_array_bytes", t.hit_array_bytes},
                                   {"miss_array_bytes", t.miss_array_bytes},
                                   {"iterations", t.iterations},
                                   {"warmup_iterations", t.warmup_iterations},
                                   {"seed", mb_opts.seed}};
      if (!g.out.empty() && g.out != "-") write_text(g.out + ".json", meta.dump(2) + "\n");
      if (!miss_not_faster(t)) std::cerr << "warning: a miss-regime time is below its hit-regime time\n";
    } else if (*mdl) {
      std::ifstream in(mdl_timings);
      if (!in) throw IoError("cannot read " + mdl_timings);
      const MemoryTimings t = read_rates_csv(in);
      validate(t);
      if (*cross) {
        ModelInput m;
        m.timings = t;
        m.coverage = cross_cov;
        const Crossover c = crossover(m);
        std::cout << to_string(c.kind);
        if (c.kind == Crossover::Kind::kValue) std::cout << " h=" << c.h;
        std::cout << '\n';
      } else {
        std::ostringstream csv;
        plot_model(csv, t, mdl_cov);
        write_text(g.out, csv.str());
      }
    } else if (*hdvk) {
      budget.threads = threads;
      const HdvCount c = hdv_count(budget);
      std::cout << c.k << '\n';
    } else if (*st) {
      const CsrGraph graph = load_graph_auto(st_in);
      const DegreeStats out_deg = degree_stats(graph, DegreeDirection::kOutOfOffsets, st_thresholds);
      const DegreeStats in_deg = degree_stats(graph, DegreeDirection::kOfEndpoints, st_thresholds);
      nlohmann::json j = {{"vertices", graph.num_vertices()},
                          {"edges", graph.num_edges()},
                          {"orientation", to_string(graph.orientation())},
                          {"locality", locality_metric(graph)},
                          {"owner_degrees", stats_json(out_deg)},
                          {"endpoint_degrees", stats_json(in_deg)}};
      if (st_hist) {
        j["owner_degrees"]["histogram"] = out_deg.histogram;
        j["endpoint_degrees"]["histogram"] = in_deg.histogram;
      }
      write_text(g.out, j.dump(2) + "\n");
    }
  } catch (const FootprintExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
