#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "potra/graph.hpp"
#include "potra/potra.hpp"
#include "potra/transpose.hpp"

namespace potra {

enum class Representation { kCsr, kCsrRnd, kCsc, kCscRnd };

const char* to_string(Representation r);
/// Accepts "CSR", "CSR-Rnd", "CSC", "CSC-Rnd" (case-insensitive).
Representation parse_representation(const std::string& name);
/// File suffix used by prepare_representations, e.g. ".csr-rnd.potg".
std::string file_suffix(Representation r);
/// Representation implied by a file name produced by prepare_representations;
/// falls back to the stored orientation otherwise.
Representation guess_representation(const std::filesystem::path& path, Orientation stored);

struct Representations {
  CsrGraph csr, csr_rnd, csc, csc_rnd;
};

/// CSR as given, CSR with randomized labels, its CSC, and the CSC with the
/// same randomized labels.
Representations make_representations(const CsrGraph& g, std::uint64_t seed);

/// Writes `<prefix>.csr.potg`, `.csr-rnd.potg`, `.csc.potg`, `.csc-rnd.potg`.
std::vector<std::filesystem::path> prepare_representations(const CsrGraph& g, const std::string& prefix,
                                                           std::uint64_t seed);

/// Per-algorithm knobs shared by the CLI and the benchmark driver.
struct AlgoOptions {
  AtomicOptions atomic;
  PotraOptions potra;
  std::uint64_t footprint_limit = std::numeric_limits<std::uint64_t>::max();
  /// 0 selects default_subgraph_edges(potra.budget.cache_bytes).
  std::uint64_t subgraph_edges = 0;
};

TransposeOutput run_algorithm(const CsrGraph& g, Algorithm algo, int threads, const AlgoOptions& options);

enum class VerifyMode { kAuto, kFull, kSample };

const char* to_string(VerifyMode m);
VerifyMode parse_verify_mode(const std::string& name);
/// Full-oracle up to 10^8 edges, sampled above.
VerifyMode resolve_verify_mode(VerifyMode m, std::uint64_t num_edges);

struct VerifyReport {
  bool pass = false;
  VerifyMode mode = VerifyMode::kFull;
  std::optional<std::uint64_t> first_bad_vertex;
  std::string message;
};

/// Checks that `output` is the transpose of `input` up to list order.
VerifyReport verify_output(const CsrGraph& input, const CsrGraph& output, VerifyMode mode, std::uint64_t seed = 0,
                           int threads = 1, std::uint64_t sample_vertices = 100000);

struct BenchDataset {
  std::string name;
  Representation representation = Representation::kCsr;
  CsrGraph graph;
};

struct BenchConfig {
  std::vector<Algorithm> algorithms;
  std::vector<int> threads;
  int repetitions = 3;
  bool verify = true;
  VerifyMode verify_mode = VerifyMode::kAuto;
  bool sort = false;
  std::uint64_t seed = 0;
  AlgoOptions options;
};

struct RunReport {
  std::string dataset;
  Representation representation = Representation::kCsr;
  Algorithm algo = Algorithm::kAtomic;
  int threads = 1;
  int repetitions = 0;
  /// "ok", "OOM-precheck", "verify-fail" or "error".
  std::string status;
  std::string message;
  PhaseTimes phase_times;  // of the median repetition
  double total_time = 0;   // median over repetitions, sort included
  double sort_time = 0;
  std::uint64_t aux_footprint_bytes = 0;
  std::uint64_t graph_bytes = 0;
  std::string verify_mode;  // empty when not verified
  bool verified = false;
  std::string method_chosen;
  std::optional<double> coverage;
  std::optional<std::uint64_t> k;
  std::optional<double> speedup_vs_baseline;
};

/// Runs every dataset x algorithm x thread count cell serially. A failing
/// cell is recorded and the run continues.
std::vector<RunReport> run_benchmark(const std::vector<BenchDataset>& datasets, const BenchConfig& config);

void write_runs_csv(std::ostream& out, const std::vector<RunReport>& runs);
/// Aux footprint of each run as a multiple of the input graph bytes.
void footprint_report(std::ostream& out, const std::vector<RunReport>& runs);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const PhaseTimes& t);
nlohmann::json to_json(const TransposeOutput& t);
nlohmann::json to_json(const RunReport& r);
nlohmann::json bench_json(const BenchConfig& config, const std::vector<RunReport>& runs);

}  // namespace potra
