#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace potra {

/// Aggregate time per random access (wall time / total accesses of all
/// threads), in nanoseconds, for each access kind in the cache-hit and
/// cache-miss regimes.
struct MemoryTimings {
  double t_r_h = 0, t_w_h = 0, t_aw_h = 0;
  double t_r_m = 0, t_w_m = 0, t_aw_m = 0;
  int threads = 1;
  std::uint64_t hit_array_bytes = 0;
  std::uint64_t miss_array_bytes = 0;
  std::uint64_t iterations = 0;
  std::uint64_t warmup_iterations = 0;
};

/// Throws std::invalid_argument when a time is not positive.
void validate(const MemoryTimings& t);

/// True when every miss-regime time is at least (1 - slack) times its
/// hit-regime counterpart.
bool miss_not_faster(const MemoryTimings& t, double slack = 0.1);

enum class AccessKind { kRead, kWrite, kAtomicWrite };
enum class Regime { kHit, kMiss };

const char* to_string(AccessKind k);
const char* to_string(Regime r);

struct MeasureOptions {
  int threads = 1;
  std::uint64_t total_l3_bytes = 0;
  std::uint64_t iterations = 1 << 22;  // per thread
  std::uint64_t seed = 1;
  std::uint64_t max_miss_bytes = std::uint64_t{64} << 30;
  std::uint64_t miss_factor = 1000;
  /// Fallback floor, as a multiple of the L3 size, when the miss-regime
  /// allocation fails.
  std::uint64_t min_miss_factor = 100;
};

/// Result of timing one (kind, regime) cell. `checksum` is the XOR/sum of
/// the array contents after the run, or of the values read.
struct CellResult {
  double ns_per_access = 0;
  std::uint64_t checksum = 0;
};

/// Times `iterations` random accesses per thread into a shared array of
/// `array_bytes` bytes. A warm-up pass of one eighth the length runs
/// first and is discarded.
CellResult measure_cell(AccessKind kind, std::uint64_t array_bytes, int threads,
                        std::uint64_t iterations, std::uint64_t seed);

MemoryTimings measure_timings(const MeasureOptions& options);

/// Total L3 bytes across all distinct cache instances, from sysfs.
std::optional<std::uint64_t> detect_l3_bytes();
/// Total L2 + L3 bytes across distinct instances, from sysfs.
std::optional<std::uint64_t> detect_l2_l3_bytes();

struct RateRow {
  AccessKind kind;
  Regime regime;
  double ns_per_access;
  double normalized_rate;  // rate relative to the hit-regime read rate
};

std::vector<RateRow> report_rates(const MemoryTimings& t);

/// CSV with header `kind,regime,ns_per_access,normalized_rate`.
void write_rates_csv(std::ostream& out, const MemoryTimings& t);
/// Parses the CSV written by write_rates_csv back into timings.
MemoryTimings read_rates_csv(std::istream& in);

}  // namespace potra
