#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>

#include "potra/memlat.hpp"

namespace potra {

/// Inputs to the HDV count: cache budget, hash record size, hash load
/// factor, per-thread bytes per HDV, and thread count.
struct HdvBudget {
  std::uint64_t cache_bytes = 0;
  double record_bytes = 12;
  double load_factor = 0.5;
  double per_hdv_bytes = 13;
  int threads = 1;
};

void validate(const HdvBudget& b);

struct HdvCount {
  std::uint64_t k = 0;
  /// k * (record_bytes / load_factor + per_hdv_bytes * threads).
  double implied_bytes = 0;
};

/// k = floor(|cache| / (|r|/alpha + d*t)).
HdvCount hdv_count(const HdvBudget& b);

struct ModelInput {
  MemoryTimings timings;
  double hit_ratio = 0;
  double coverage = 0;
  std::uint64_t num_edges = 0;
};

/// Random-access time per edge of the atomic method:
/// h*t_aw_h + (1-h)*t_aw_m.
double atomic_per_edge(const ModelInput& m);

/// Random-access time per edge of the hash-based LDV/HDV method:
/// coverage*(t_w_h - t_aw_m) + t_aw_m + t_r_h.
double hlh_per_edge(const ModelInput& m);

struct Crossover {
  enum class Kind {
    kValue,           // methods tie at `h` inside [0,1]
    kHlhNeverWins,    // atomic is at least as fast for every h in [0,1]
    kHlhAlwaysWins,   // hashing is faster for every h in [0,1]
    kDegenerate,      // t_aw_h == t_aw_m; the atomic line is flat
  };
  Kind kind = Kind::kDegenerate;
  /// Unclamped solution; meaningful unless kind is kDegenerate.
  double h = 0;
};

const char* to_string(Crossover::Kind k);

/// Hit ratio where the two per-edge estimates are equal for m.coverage.
Crossover crossover(const ModelInput& m);

struct ModelEstimate {
  double atomic_ns_per_edge = 0;
  double hlh_ns_per_edge = 0;
  Crossover crossover;
};

ModelEstimate estimate(const ModelInput& m);

/// Long-format CSV `h,model,coverage,ns_per_edge` with h sampled at
/// 0, 0.01, ..., 1: one atomic row per sample plus one row per coverage.
void plot_model(std::ostream& out, const MemoryTimings& t, std::span<const double> coverages);

}  // namespace potra
