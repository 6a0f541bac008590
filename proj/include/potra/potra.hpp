#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potra/graph.hpp"
#include "potra/model.hpp"
#include "potra/transpose.hpp"

namespace potra {

/// Open-addressing hash table with linear probing from vertex ID to a
/// dense index in [0, k). Read-only after construction.
///
/// Capacity is ceil(k / load_factor) slots of 8 bytes; the home slot is
/// chosen by multiply-shift reduction so capacity need not be a power of
/// two.
class HdvTable {
 public:
  static constexpr std::uint32_t kNotFound = std::numeric_limits<std::uint32_t>::max();

  HdvTable() = default;
  HdvTable(std::span<const VertexId> ids, double load_factor);

  std::uint32_t find(VertexId v) const {
    if (size_ == 0) return kNotFound;
    std::uint64_t slot = home(v);
    for (;;) {
      const Slot& s = slots_[slot];
      if (s.index == kNotFound) return kNotFound;
      if (s.key == v) return s.index;
      if (++slot == slots_.size()) slot = 0;
    }
  }

  std::uint64_t size() const { return size_; }
  std::uint64_t capacity() const { return slots_.size(); }
  std::uint64_t size_bytes() const { return slots_.size() * sizeof(Slot); }

 private:
  struct Slot {
    VertexId key;
    std::uint32_t index;  // kNotFound marks an empty slot
  };

  std::uint64_t home(VertexId v) const {
    const std::uint64_t h = (std::uint64_t{v} * 0x9e3779b97f4a7c15ULL) >> 32;
    return (h * slots_.size()) >> 32;
  }

  std::vector<Slot> slots_;
  std::uint64_t size_ = 0;
};

/// The selected high-degree endpoints and their lookup table.
struct HdvPlan {
  std::uint64_t k = 0;
  std::vector<VertexId> hdv_ids;  // hdv_ids[i] has hdv_index i
  HdvTable table;
  double coverage_estimate = 0;
  std::uint64_t sample_size = 0;

  std::uint32_t lookup(VertexId v) const { return table.find(v); }
};

/// Builds a plan from an explicit ID list (no sampling).
HdvPlan make_plan(std::vector<VertexId> hdv_ids, double load_factor = 0.5);

/// Draws ceil(sample_fraction * |V|) endpoints from `edges` at seeded
/// random positions. Half of the draws rank vertices and the (at most) k
/// most frequent are selected, ties broken by lower ID; the other half
/// estimates the coverage of that selection. Vertices never drawn are not
/// selected. When the sample count reaches |E|, or sample_fraction is 1,
/// every edge is counted instead and the estimate is exact. k above |V| is
/// clamped.
HdvPlan sample_hdv(const CsrGraph& g, std::uint64_t k, double sample_fraction, std::uint64_t seed,
                   int threads = 1, double load_factor = 0.5);

/// Fraction of all edges whose endpoint is an HDV of the plan.
double coverage_exact(const CsrGraph& g, const HdvPlan& plan, int threads = 1);

enum class Method { kAtomic, kHlh };
const char* to_string(Method m);
Method parse_method(const std::string& name);

struct ProbeDecision {
  Method method = Method::kAtomic;
  std::uint64_t probe_edges = 0;
  double atomic_ns_per_edge = 0;
  double hlh_ns_per_edge = 0;
  bool skipped = false;
  std::string warning;
};

/// Times degree counting over a window of `probe_edges` edges with both
/// methods (scratch counters, discarded) and picks the faster.
ProbeDecision probe_methods(const CsrGraph& g, const HdvPlan& plan, std::uint64_t probe_edges,
                            int threads, std::uint64_t seed = 0);

/// Degree counters after step 1 of the HLH method.
struct HlhCounters {
  std::vector<std::uint32_t> ldv_counters;            // |V|, shared
  std::vector<std::vector<std::uint8_t>> hdv_low;     // [thread][k]
  std::vector<std::vector<std::uint32_t>> hdv_high;   // [thread][k]
  std::vector<std::uint32_t> part2tid;                // partition -> thread
  std::uint64_t partition_edges = 0;
};

/// Step 1 of HLH: equal-edge partitions claimed dynamically; LDV endpoints
/// counted atomically in shared counters, HDV endpoints in thread-private
/// 8-bit counters that carry into 32-bit counters on wrap.
HlhCounters count_degrees_hlh(const CsrGraph& g, const HdvPlan& plan, int threads,
                              std::uint64_t partition_edges);

/// Transposed degree of every vertex from step-1 counters.
std::vector<std::uint64_t> assemble_degrees(const HlhCounters& c, const HdvPlan& plan);

struct PotraOptions {
  /// threads is overwritten by the thread count of the call.
  HdvBudget budget;
  double sample_fraction = 0.01;
  /// Default: min(1% of |E|, 2^24).
  std::optional<std::uint64_t> probe_edges;
  std::optional<Method> force_method;
  /// Bypasses the budget formula (and sampling when hdv_ids is set).
  std::optional<std::uint64_t> k_override;
  std::optional<std::vector<VertexId>> hdv_ids;
  std::uint64_t partition_edges = std::uint64_t{1} << 18;
  std::uint64_t seed = 0;
  bool compute_coverage_exact = false;
  /// Verifies part2tid consistency and that every output slot is written
  /// exactly once. Always on in debug builds.
  bool check_writes = false;
};

/// Default cache budget: detected L2+L3 total, or 32 MiB if unknown.
std::uint64_t default_cache_budget();
std::uint64_t default_probe_edges(std::uint64_t num_edges);

TransposeOutput transpose_potra(const CsrGraph& g, int threads, const PotraOptions& options);

}  // namespace potra
