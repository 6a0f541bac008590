#include "potra/model.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace potra {

void validate(const HdvBudget& b) {
  if (b.cache_bytes == 0 || !(b.record_bytes > 0) || !(b.per_hdv_bytes > 0) || b.threads < 1) {
    throw std::invalid_argument("HDV budget parameters must be positive");
  }
  if (!(b.load_factor > 0 && b.load_factor <= 1)) throw std::invalid_argument("load factor must be in (0, 1]");
}

HdvCount hdv_count(const HdvBudget& b) {
  validate(b);
  const double per_hdv = b.record_bytes / b.load_factor + b.per_hdv_bytes * b.threads;
  HdvCount c;
  c.k = static_cast<std::uint64_t>(std::floor(static_cast<double>(b.cache_bytes) / per_hdv));
  c.implied_bytes = static_cast<double>(c.k) * per_hdv;
  return c;
}

double atomic_per_edge(const ModelInput& m) {
  const auto& t = m.timings;
  return m.hit_ratio * t.t_aw_h + (1.0 - m.hit_ratio) * t.t_aw_m;
}

double hlh_per_edge(const ModelInput& m) {
  const auto& t = m.timings;
  return m.coverage * (t.t_w_h - t.t_aw_m) + t.t_aw_m + t.t_r_h;
}

const char* to_string(Crossover::Kind k) {
  switch (k) {
    case Crossover::Kind::kValue: return "value";
    case Crossover::Kind::kHlhNeverWins: return "HLH never wins";
    case Crossover::Kind::kHlhAlwaysWins: return "HLH always wins";
    case Crossover::Kind::kDegenerate: return "degenerate";
  }
  return "?";
}

Crossover crossover(const ModelInput& m) {
  const auto& t = m.timings;
  Crossover c;
  const double slope = t.t_aw_h - t.t_aw_m;
  if (slope == 0) {
    c.kind = Crossover::Kind::kDegenerate;
    return c;
  }
  c.h = (m.coverage * (t.t_w_h - t.t_aw_m) + t.t_r_h) / slope;
  if (c.h >= 0 && c.h <= 1) {
    c.kind = Crossover::Kind::kValue;
  } else {
    // No tie inside [0,1]: the sign at h = 0 holds over the whole range.
    ModelInput at0 = m;
    at0.hit_ratio = 0;
    c.kind = atomic_per_edge(at0) > hlh_per_edge(at0) ? Crossover::Kind::kHlhAlwaysWins
                                                      : Crossover::Kind::kHlhNeverWins;
  }
  return c;
}

ModelEstimate estimate(const ModelInput& m) {
  return {atomic_per_edge(m), hlh_per_edge(m), crossover(m)};
}

void plot_model(std::ostream& out, const MemoryTimings& t, std::span<const double> coverages) {
  out << "h,model,coverage,ns_per_edge\n" << std::setprecision(10);
  for (int i = 0; i <= 100; ++i) {
    ModelInput m;
    m.timings = t;
    m.hit_ratio = i / 100.0;
    out << m.hit_ratio << ",atomic,," << atomic_per_edge(m) << '\n';
    for (double c : coverages) {
      m.coverage = c;
      out << m.hit_ratio << ",hlh," << c << ',' << hlh_per_edge(m) << '\n';
    }
  }
}

}  // namespace potra
