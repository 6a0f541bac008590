#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace potra {

using VertexId = std::uint32_t;
using EdgeIndex = std::uint64_t;

enum class Orientation : std::uint8_t { kCsr = 0, kCsc = 1 };

const char* to_string(Orientation o);
Orientation flipped(Orientation o);

/// Raised when a graph violates the CSR invariants or a file is malformed.
/// `byte_offset` locates the problem inside the input file, or is -1 for
/// in-memory arrays.
class GraphError : public std::runtime_error {
 public:
  GraphError(const std::string& what, std::int64_t byte_offset = -1);
  std::int64_t byte_offset() const { return byte_offset_; }

 private:
  std::int64_t byte_offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directed graph in compressed form. The same layout holds an out-edge
/// (CSR) or in-edge (CSC) view; `orientation` is only a label.
///
/// Immutable once built. `offsets` has |V|+1 entries starting at 0 and
/// ending at |E|; every entry of `edges` is a vertex ID below |V|.
class CsrGraph {
 public:
  CsrGraph() : offsets_{0} {}

  /// Validates the arrays and throws GraphError on any invariant violation.
  CsrGraph(std::vector<EdgeIndex> offsets, std::vector<VertexId> edges,
           Orientation orientation = Orientation::kCsr);

  /// Takes ownership without validation. For producers that construct the
  /// arrays themselves (the transposition routines).
  static CsrGraph adopt(std::vector<EdgeIndex> offsets, std::vector<VertexId> edges,
                        Orientation orientation);

  std::uint64_t num_vertices() const { return offsets_.size() - 1; }
  std::uint64_t num_edges() const { return edges_.size(); }
  Orientation orientation() const { return orientation_; }

  std::span<const EdgeIndex> offsets() const { return offsets_; }
  std::span<const VertexId> edges() const { return edges_; }

  std::uint64_t degree(std::uint64_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const VertexId> neighbors(std::uint64_t v) const {
    return std::span<const VertexId>(edges_).subspan(offsets_[v], degree(v));
  }

  /// Bytes held by the offsets and edges arrays.
  std::uint64_t size_bytes() const;

  struct Arrays {
    std::vector<EdgeIndex> offsets;
    std::vector<VertexId> edges;
    Orientation orientation;
  };
  Arrays release() &&;

  friend bool operator==(const CsrGraph&, const CsrGraph&) = default;

 private:
  std::vector<EdgeIndex> offsets_;
  std::vector<VertexId> edges_;
  Orientation orientation_ = Orientation::kCsr;
};

/// Throws GraphError describing the first invariant violation, if any.
void validate(std::span<const EdgeIndex> offsets, std::span<const VertexId> edges);

/// (owner, endpoint) pairs in lexicographic order; multiplicity is kept.
struct EdgeMultiset {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  friend bool operator==(const EdgeMultiset&, const EdgeMultiset&) = default;
};

EdgeMultiset edge_multiset(const CsrGraph& g);
/// Swaps both members of every pair and re-sorts.
EdgeMultiset swapped(EdgeMultiset m);

/// Serial reference transposition: expand to (endpoint, owner) pairs, sort
/// lexicographically, recompress. Output lists are ascending.
CsrGraph transpose_oracle(const CsrGraph& g);

/// Copy of `g` with every neighbor list sorted ascending.
CsrGraph sort_lists(const CsrGraph& g);

/// Builds a graph from (source, destination) pairs by sorting them
/// lexicographically. Duplicates are kept.
CsrGraph from_pairs(std::uint64_t num_vertices, std::vector<std::pair<VertexId, VertexId>> pairs,
                    Orientation orientation = Orientation::kCsr);

// ---------------------------------------------------------------------------
// Files

enum class GraphFormat { kBinary, kEdgeListText };

/// Width in bytes of stored edge IDs for a graph with `num_vertices`.
int edge_id_width(std::uint64_t num_vertices);

struct StoreOptions {
  /// 0 selects the width from the vertex count.
  int id_width = 0;
};

CsrGraph load_graph(const std::filesystem::path& path, GraphFormat format = GraphFormat::kBinary);
/// Detects the binary format by its magic bytes, else parses text.
CsrGraph load_graph_auto(const std::filesystem::path& path);
void store_graph(const CsrGraph& g, const std::filesystem::path& path, StoreOptions options = {});

/// Parses "src dst" lines. Blank lines and lines starting with '#' are
/// skipped. |V| is one past the largest ID seen unless given.
CsrGraph parse_edge_list(std::string_view text, std::uint64_t num_vertices = 0);

// ---------------------------------------------------------------------------
// Generation and relabeling

/// Sources uniform over [0,|V|), destinations Zipf-distributed with the
/// given exponent (rank r maps to vertex r-1). Output lists are sorted.
/// Byte-identical output for a fixed seed regardless of thread count.
CsrGraph generate_skewed(std::uint64_t num_vertices, std::uint64_t num_edges, double zipf_exponent,
                         std::uint64_t seed, int threads = 0);

struct RelabeledGraph {
  CsrGraph graph;
  std::vector<VertexId> mapping;  // old ID -> new ID
};

/// Applies `mapping` (old -> new, a permutation) to owners and endpoints.
/// The relative order inside each neighbor list is kept.
CsrGraph relabel(const CsrGraph& g, std::span<const VertexId> mapping);
RelabeledGraph relabel_random(const CsrGraph& g, std::uint64_t seed);
std::vector<VertexId> inverse_permutation(std::span<const VertexId> mapping);

// ---------------------------------------------------------------------------
// Statistics

/// Mean |edges[i] - edges[i-1]| over consecutive entries of the same
/// neighbor list. 0 when no list has two entries.
double locality_metric(const CsrGraph& g);

enum class DegreeDirection { kOutOfOffsets, kOfEndpoints };

struct DegreeStats {
  std::map<std::uint64_t, std::uint64_t> histogram;  // degree -> vertex count
  std::map<std::uint64_t, double> fraction_below;    // threshold -> fraction of |V|
  std::uint64_t max_degree = 0;
};

std::vector<std::uint64_t> degrees(const CsrGraph& g, DegreeDirection direction);

inline constexpr std::uint64_t kDefaultThresholdValues[] = {256};
inline constexpr std::span<const std::uint64_t> kDefaultThresholds{kDefaultThresholdValues};
DegreeStats degree_stats(const CsrGraph& g, DegreeDirection direction,
                         std::span<const std::uint64_t> thresholds = kDefaultThresholds);

}  // namespace potra
