#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "potra/graph.hpp"

namespace potra {

enum class Algorithm { kAtomic, kScanTrans, kMergeTrans, kPotra };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

/// Wall-clock seconds per step. Step 0 is only used by PoTra.
struct PhaseTimes {
  double preprocess = 0;  // step 0
  double count = 0;       // step 1
  double aggregate = 0;   // step 2
  double write = 0;       // step 3
  double sort = 0;
  double sum() const { return preprocess + count + aggregate + write + sort; }
};

/// Extra details of a PoTra run.
struct PotraRunInfo {
  std::string method_chosen;  // "atomic" or "hlh"
  bool forced = false;
  std::uint64_t k_budget = 0;  // from the budget formula, before clamping
  std::uint64_t k = 0;         // HDV actually selected
  std::uint64_t sample_size = 0;
  double coverage_estimate = 0;
  std::optional<double> coverage_exact;
  std::uint64_t probe_edges = 0;
  double probe_atomic_ns_per_edge = 0;
  double probe_hlh_ns_per_edge = 0;
  std::string probe_warning;
  std::uint64_t partitions = 0;
  std::uint64_t hdv_footprint_bytes = 0;     // hash table + per-thread HDV arrays
  std::uint64_t shared_footprint_bytes = 0;  // |V|-sized arrays
  /// (max - mean) / mean of per-thread step-3 times.
  double write_imbalance = 0;
};

struct TransposeOutput {
  CsrGraph graph;
  PhaseTimes phase_times;
  /// Peak bytes allocated beyond the input and output arrays.
  std::uint64_t aux_footprint_bytes = 0;
  std::string method;
  bool sorted = false;
  std::optional<PotraRunInfo> potra;
};

/// The precheck of an algorithm's auxiliary memory failed.
class FootprintExceeded : public std::runtime_error {
 public:
  FootprintExceeded(std::uint64_t required, std::uint64_t limit);
  std::uint64_t required() const { return required_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t required_, limit_;
};

/// A 32-bit counter would wrap: some transposed degree reaches 2^32.
class CounterOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exclusive prefix sum with |counts|+1 entries; the last is the total.
/// Block-parallel: per-block sums, a serial scan of the block totals,
/// then per-block scans.
std::vector<std::uint64_t> prefix_sum_parallel(std::span<const std::uint64_t> counts, int threads);

/// In-place inclusive scan with the same decomposition.
void inclusive_scan_inplace(std::span<std::uint64_t> values, int threads);

struct AtomicOptions {
  /// Vertex-aligned partitions of about this many edges are scheduled
  /// dynamically in step 3.
  std::uint64_t partition_edges = std::uint64_t{1} << 16;
};

/// Shared atomic counters and insertion points. Output lists are unsorted.
TransposeOutput transpose_atomic(const CsrGraph& g, int threads, const AtomicOptions& options = {});

/// Bytes of per-thread counters ScanTrans would allocate.
std::uint64_t scantrans_footprint(std::uint64_t num_vertices, int threads);

/// Per-thread private counters over one contiguous vertex range per
/// thread. Output lists are sorted. Throws FootprintExceeded before
/// allocating when the per-thread arrays would exceed `footprint_limit`.
TransposeOutput transpose_scantrans(const CsrGraph& g, int threads,
                                    std::uint64_t footprint_limit = std::numeric_limits<std::uint64_t>::max());

/// Subgraph edge count sized to half of `cache_bytes` at 4 bytes per edge.
std::uint64_t default_subgraph_edges(std::uint64_t cache_bytes);

/// Serial transposition of consecutive edge ranges followed by pairwise
/// merge rounds. Output lists are sorted.
TransposeOutput transpose_mergetrans(const CsrGraph& g, int threads, std::uint64_t subgraph_edges);

/// Sorts every neighbor list (one serial sort per list, parallel over
/// vertices) and records the time as the sort phase.
TransposeOutput sort_neighbor_lists(TransposeOutput t, int threads);

/// Sorted copy of a graph, parallel over vertices.
CsrGraph sort_neighbor_lists(const CsrGraph& g, int threads);

bool lists_sorted(const CsrGraph& g);

}  // namespace potra
