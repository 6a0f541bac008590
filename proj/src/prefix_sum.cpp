#include <algorithm>
#include <numeric>

#include <omp.h>

#include "potra/transpose.hpp"

namespace potra {

void inclusive_scan_inplace(std::span<std::uint64_t> values, int threads) {
  const std::uint64_t n = values.size();
  if (n == 0) return;
  threads = std::max(1, threads);
  const auto blocks = static_cast<std::uint64_t>(std::min<std::uint64_t>(threads, n));
  if (blocks == 1) {
    std::partial_sum(values.begin(), values.end(), values.begin());
    return;
  }
  std::vector<std::uint64_t> block_sums(blocks + 1, 0);
  auto block_begin = [&](std::uint64_t b) { return b * n / blocks; };

#pragma omp parallel num_threads(static_cast<int>(blocks))
  {
    const auto tid = static_cast<std::uint64_t>(omp_get_thread_num());
    const auto team = static_cast<std::uint64_t>(omp_get_num_threads());
    for (std::uint64_t b = tid; b < blocks; b += team) {
      std::uint64_t sum = 0;
      for (std::uint64_t i = block_begin(b); i < block_begin(b + 1); ++i) sum += values[i];
      block_sums[b + 1] = sum;
    }
#pragma omp barrier
#pragma omp single
    std::partial_sum(block_sums.begin(), block_sums.end(), block_sums.begin());
    for (std::uint64_t b = tid; b < blocks; b += team) {
      std::uint64_t running = block_sums[b];
      for (std::uint64_t i = block_begin(b); i < block_begin(b + 1); ++i) {
        running += values[i];
        values[i] = running;
      }
    }
  }
}

std::vector<std::uint64_t> prefix_sum_parallel(std::span<const std::uint64_t> counts, int threads) {
  std::vector<std::uint64_t> out(counts.size() + 1);
  out[0] = 0;
  std::copy(counts.begin(), counts.end(), out.begin() + 1);
  inclusive_scan_inplace(std::span(out).subspan(1), threads);
  return out;
}

}  // namespace potra
