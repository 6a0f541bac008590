#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <omp.h>

#include "potra/graph.hpp"
#include "potra/transpose.hpp"

namespace potra::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Running and peak byte count of auxiliary allocations.
class FootprintTracker {
 public:
  void add(std::uint64_t bytes) {
    current_ += bytes;
    peak_ = std::max(peak_, current_);
  }
  void remove(std::uint64_t bytes) { current_ -= std::min(current_, bytes); }
  template <class T>
  void add(const std::vector<T>& v) { add(v.capacity() * sizeof(T)); }
  template <class T>
  void remove(const std::vector<T>& v) { remove(v.capacity() * sizeof(T)); }
  std::uint64_t peak() const { return peak_; }
  std::uint64_t current() const { return current_; }

 private:
  std::uint64_t current_ = 0, peak_ = 0;
};

/// Throws unless a parallel region asking for `expected` threads gets
/// exactly that many. Algorithms that pin work to thread IDs call this
/// before their first region.
inline void require_team(int expected) {
  int got = 0;
#pragma omp parallel num_threads(expected)
  {
#pragma omp single
    got = omp_get_num_threads();
  }
  if (got != expected) {
    throw std::runtime_error("OpenMP team has " + std::to_string(got) + " threads, expected " +
                             std::to_string(expected));
  }
}

/// Atomic increment of a shared 32-bit counter. `checked` makes a wrap to
/// zero observable; it is only needed when |E| >= 2^32.
template <bool checked>
inline bool bump(std::uint32_t& counter) {
  std::atomic_ref<std::uint32_t> ref(counter);
  if constexpr (checked) {
    return ref.fetch_add(1, std::memory_order_relaxed) != std::numeric_limits<std::uint32_t>::max();
  } else {
    ref.fetch_add(1, std::memory_order_relaxed);
    return true;
  }
}

inline bool counters_may_wrap(std::uint64_t num_edges) {
  return num_edges > std::numeric_limits<std::uint32_t>::max();
}

inline std::uint64_t fetch_inc(std::uint64_t& cursor) {
  return std::atomic_ref<std::uint64_t>(cursor).fetch_add(1, std::memory_order_relaxed);
}

/// First vertex of each of `parts` vertex-aligned ranges that split the
/// edges about evenly. Returns parts+1 boundaries.
inline std::vector<std::uint64_t> vertex_ranges(const CsrGraph& g, std::uint64_t parts) {
  std::vector<std::uint64_t> bounds(parts + 1);
  const auto offsets = g.offsets();
  for (std::uint64_t p = 0; p <= parts; ++p) {
    const std::uint64_t target = p * g.num_edges() / parts;
    bounds[p] = static_cast<std::uint64_t>(std::lower_bound(offsets.begin(), offsets.end() - 1, target) -
                                           offsets.begin());
  }
  bounds[0] = 0;
  bounds[parts] = g.num_vertices();
  return bounds;
}

/// Vertex-aligned partitions of roughly `edges_per_part` edges each.
inline std::vector<std::uint64_t> vertex_partitions(const CsrGraph& g, std::uint64_t edges_per_part) {
  edges_per_part = std::max<std::uint64_t>(1, edges_per_part);
  const std::uint64_t parts =
      std::max<std::uint64_t>(1, (g.num_edges() + edges_per_part - 1) / edges_per_part);
  auto bounds = vertex_ranges(g, parts);
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  if (bounds.size() == 1) bounds.push_back(bounds.front());
  return bounds;
}

/// Vertex owning edge slot `i` (the v with offsets[v] <= i < offsets[v+1]).
inline std::uint64_t owner_of(std::span<const EdgeIndex> offsets, std::uint64_t i) {
  return static_cast<std::uint64_t>(std::upper_bound(offsets.begin(), offsets.end(), i) - offsets.begin()) - 1;
}

/// Fills offsets[1..|V|] with the transposed degrees (as produced by
/// `degree_of`) and scans them in place.
template <class DegreeOf>
std::vector<std::uint64_t> offsets_from_degrees(std::uint64_t num_vertices, int threads, DegreeOf degree_of) {
  std::vector<std::uint64_t> offsets(num_vertices + 1);
  offsets[0] = 0;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::uint64_t v = 0; v < num_vertices; ++v) offsets[v + 1] = degree_of(v);
  inclusive_scan_inplace(std::span(offsets).subspan(1), threads);
  return offsets;
}

}  // namespace potra::detail
