#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "potra/graph.hpp"
#include "potra/transpose.hpp"
#include "potra/xoshiro.hpp"

namespace potra {

namespace {

// Rejection-inversion sampling of a Zipf distribution over ranks 1..n
// (Hormann & Derflinger). Constant expected time, no tables.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double exponent) : n_(static_cast<double>(n)), s_(exponent) {
    h_integral_x1_ = h_integral(1.5) - 1.0;
    h_integral_n_ = h_integral(n_ + 0.5);
    shortcut_ = 2.0 - h_integral_inverse(h_integral(2.5) - h(2.0));
  }

  std::uint64_t operator()(Xoshiro256StarStar& rng) const {
    for (;;) {
      const double u = h_integral_n_ + rng.next_double() * (h_integral_x1_ - h_integral_n_);
      const double x = h_integral_inverse(u);
      double k = std::floor(x + 0.5);
      k = std::clamp(k, 1.0, n_);
      if (k - x <= shortcut_ || u >= h_integral(k + 0.5) - h(k)) return static_cast<std::uint64_t>(k);
    }
  }

 private:
  double h(double x) const { return std::exp(-s_ * std::log(x)); }

  double h_integral(double x) const {
    const double log_x = std::log(x);
    return helper2((1.0 - s_) * log_x) * log_x;
  }

  double h_integral_inverse(double x) const {
    double t = x * (1.0 - s_);
    if (t < -1.0) t = -1.0;
    return std::exp(helper1(t) * x);
  }

  // log1p(x)/x, stable near 0.
  static double helper1(double x) {
    if (std::abs(x) > 1e-8) return std::log1p(x) / x;
    return 1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
  }

  // expm1(x)/x, stable near 0.
  static double helper2(double x) {
    if (std::abs(x) > 1e-8) return std::expm1(x) / x;
    return 1.0 + x * 0.5 * (1.0 + x * (1.0 / 3.0) * (1.0 + 0.25 * x));
  }

  double n_, s_;
  double h_integral_x1_, h_integral_n_, shortcut_;
};

constexpr std::uint64_t kBlockEdges = std::uint64_t{1} << 16;

}  // namespace

CsrGraph generate_skewed(std::uint64_t num_vertices, std::uint64_t num_edges, double zipf_exponent,
                         std::uint64_t seed, int threads) {
  if (!(zipf_exponent > 0)) throw std::invalid_argument("zipf exponent must be > 0");
  if (num_vertices > (std::uint64_t{1} << 32)) throw std::invalid_argument("|V| must be <= 2^32");
  if (num_vertices == 0 && num_edges > 0) throw std::invalid_argument("edges need at least one vertex");
  if (threads <= 0) threads = omp_get_max_threads();

  std::vector<VertexId> src(num_edges), dst(num_edges);
  if (num_edges > 0) {
    const ZipfSampler zipf(num_vertices, zipf_exponent);
    const std::uint64_t blocks = (num_edges + kBlockEdges - 1) / kBlockEdges;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::uint64_t b = 0; b < blocks; ++b) {
      Xoshiro256StarStar rng(stream_seed(seed, b));
      const std::uint64_t end = std::min(num_edges, (b + 1) * kBlockEdges);
      for (std::uint64_t i = b * kBlockEdges; i < end; ++i) {
        src[i] = static_cast<VertexId>(rng.next_below(num_vertices));
        dst[i] = static_cast<VertexId>(zipf(rng) - 1);
      }
    }
  }

  // Counting sort by source, then sort each list for a canonical result.
  std::vector<std::uint64_t> offsets(num_vertices + 1, 0);
  for (VertexId s : src) ++offsets[s + 1];
  inclusive_scan_inplace(std::span(offsets).subspan(1), threads);
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<VertexId> edges(num_edges);
  for (std::uint64_t i = 0; i < num_edges; ++i) edges[cursor[src[i]]++] = dst[i];
  src = {};
  dst = {};
  cursor = {};
#pragma omp parallel for schedule(dynamic, 1024) num_threads(threads)
  for (std::uint64_t v = 0; v < num_vertices; ++v) {
    std::sort(edges.begin() + offsets[v], edges.begin() + offsets[v + 1]);
  }
  return CsrGraph::adopt(std::move(offsets), std::move(edges), Orientation::kCsr);
}

}  // namespace potra
