#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detail.hpp"
#include "potra/memlat.hpp"
#include "potra/potra.hpp"
#include "potra/xoshiro.hpp"

namespace potra {

HdvTable::HdvTable(std::span<const VertexId> ids, double load_factor) {
  if (!(load_factor > 0 && load_factor <= 1)) throw std::invalid_argument("load factor must be in (0, 1]");
  if (ids.size() >= kNotFound) throw std::invalid_argument("too many HDV for 32-bit indices");
  size_ = ids.size();
  if (size_ == 0) return;
  // At least one empty slot keeps unsuccessful probes finite.
  const auto wanted = static_cast<std::uint64_t>(std::ceil(static_cast<double>(size_) / load_factor));
  slots_.assign(std::max(wanted, size_ + 1), Slot{0, kNotFound});
  for (std::uint64_t i = 0; i < size_; ++i) {
    std::uint64_t slot = home(ids[i]);
    while (slots_[slot].index != kNotFound) {
      if (slots_[slot].key == ids[i]) throw std::invalid_argument("duplicate HDV id");
      if (++slot == slots_.size()) slot = 0;
    }
    slots_[slot] = Slot{ids[i], static_cast<std::uint32_t>(i)};
  }
}

HdvPlan make_plan(std::vector<VertexId> hdv_ids, double load_factor) {
  HdvPlan plan;
  plan.table = HdvTable(hdv_ids, load_factor);
  plan.k = hdv_ids.size();
  plan.hdv_ids = std::move(hdv_ids);
  return plan;
}

namespace {

constexpr std::uint64_t kMaxStrata = 256;

}  // namespace

HdvPlan sample_hdv(const CsrGraph& g, std::uint64_t k, double sample_fraction, std::uint64_t seed,
                   int threads, double load_factor) {
  if (!(sample_fraction > 0 && sample_fraction <= 1)) {
    throw std::invalid_argument("sample fraction must be in (0, 1]");
  }
  threads = std::max(1, threads);
  const std::uint64_t n = g.num_vertices();
  const std::uint64_t m = g.num_edges();
  const auto edges = g.edges();
  k = std::min(k, n);

  const auto wanted = static_cast<std::uint64_t>(std::ceil(sample_fraction * static_cast<double>(n)));
  const bool exhaustive = sample_fraction == 1.0 || wanted >= m;

  std::vector<std::uint32_t> frequency(n, 0);
  std::vector<std::vector<VertexId>> holdout;
  std::uint64_t sample_size = 0;
  if (exhaustive) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::uint64_t i = 0; i < m; ++i) detail::bump<false>(frequency[edges[i]]);
    sample_size = m;
  } else {
    // The edge range and the sample budget are split into strata; each
    // stratum has its own stream so the result is independent of the
    // thread count. Even draws rank the candidates, odd draws are held out
    // to estimate the coverage of the selection without selection bias.
    const std::uint64_t strata = std::min(wanted, kMaxStrata);
    holdout.resize(strata);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::uint64_t s = 0; s < strata; ++s) {
      const std::uint64_t lo = s * m / strata, hi = (s + 1) * m / strata;
      const std::uint64_t count = (s + 1) * wanted / strata - s * wanted / strata;
      Xoshiro256StarStar rng(stream_seed(seed, s));
      for (std::uint64_t j = 0; j < count; ++j) {
        const VertexId v = edges[lo + rng.next_below(hi - lo)];
        if (j % 2 == 0) {
          detail::bump<false>(frequency[v]);
        } else {
          holdout[s].push_back(v);
        }
      }
    }
    sample_size = wanted;
  }

  std::vector<VertexId> candidates;
  for (std::uint64_t v = 0; v < n; ++v) {
    if (frequency[v] > 0) candidates.push_back(static_cast<VertexId>(v));
  }
  auto more_frequent = [&](VertexId a, VertexId b) {
    return frequency[a] != frequency[b] ? frequency[a] > frequency[b] : a < b;
  };
  if (candidates.size() > k) {
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                     more_frequent);
    candidates.resize(k);
  }
  candidates.shrink_to_fit();
  std::sort(candidates.begin(), candidates.end(), more_frequent);

  std::uint64_t ranked_hits = 0;
  for (VertexId v : candidates) ranked_hits += frequency[v];
  std::uint64_t ranked = 0;
  for (std::uint64_t v = 0; v < n && !exhaustive; ++v) ranked += frequency[v];

  HdvPlan plan = make_plan(std::move(candidates), load_factor);
  plan.sample_size = sample_size;
  std::uint64_t held = 0, held_hits = 0;
  for (const auto& part : holdout) {
    held += part.size();
    for (VertexId v : part) held_hits += plan.lookup(v) != HdvTable::kNotFound;
  }
  if (held > 0) {
    plan.coverage_estimate = static_cast<double>(held_hits) / static_cast<double>(held);
  } else {
    const std::uint64_t total = exhaustive ? m : ranked;
    plan.coverage_estimate = total == 0 ? 0.0 : static_cast<double>(ranked_hits) / static_cast<double>(total);
  }
  return plan;
}

double coverage_exact(const CsrGraph& g, const HdvPlan& plan, int threads) {
  const auto edges = g.edges();
  if (edges.empty()) return 0.0;
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) reduction(+ : hits)
  for (std::uint64_t i = 0; i < edges.size(); ++i) hits += plan.lookup(edges[i]) != HdvTable::kNotFound;
  return static_cast<double>(hits) / static_cast<double>(edges.size());
}

const char* to_string(Method m) { return m == Method::kAtomic ? "atomic" : "hlh"; }

Method parse_method(const std::string& name) {
  if (name == "atomic") return Method::kAtomic;
  if (name == "hlh") return Method::kHlh;
  throw std::invalid_argument("unknown method: " + name);
}

std::uint64_t default_cache_budget() {
  return detect_l2_l3_bytes().value_or(std::uint64_t{32} << 20);
}

std::uint64_t default_probe_edges(std::uint64_t num_edges) {
  return std::min((num_edges + 99) / 100, std::uint64_t{1} << 24);
}

}  // namespace potra
