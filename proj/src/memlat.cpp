#include "potra/memlat.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <iomanip>
#include <map>
#include <new>
#include <ostream>
#include <set>
#include <sstream>

#include <omp.h>

#include "detail.hpp"
#include "potra/xoshiro.hpp"

namespace potra {

void validate(const MemoryTimings& t) {
  for (double v : {t.t_r_h, t.t_w_h, t.t_aw_h, t.t_r_m, t.t_w_m, t.t_aw_m}) {
    if (!(v > 0)) throw std::invalid_argument("memory timings must be positive");
  }
}

bool miss_not_faster(const MemoryTimings& t, double slack) {
  const double f = 1.0 - slack;
  return t.t_r_m >= f * t.t_r_h && t.t_w_m >= f * t.t_w_h && t.t_aw_m >= f * t.t_aw_h;
}

const char* to_string(AccessKind k) {
  switch (k) {
    case AccessKind::kRead: return "read";
    case AccessKind::kWrite: return "write";
    case AccessKind::kAtomicWrite: return "atomic_write";
  }
  return "?";
}

const char* to_string(Regime r) { return r == Regime::kHit ? "hit" : "miss"; }

namespace {

template <AccessKind kind>
std::uint64_t access_loop(std::span<std::uint64_t> array, Xoshiro256StarStar& rng, std::uint64_t count) {
  std::uint64_t sum = 0;
  const std::uint64_t n = array.size();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::atomic_ref<std::uint64_t> word(array[rng.next_below(n)]);
    if constexpr (kind == AccessKind::kRead) {
      // Folding every loaded value into the result keeps the loads alive.
      sum += word.load(std::memory_order_relaxed);
    } else if constexpr (kind == AccessKind::kWrite) {
      word.store(i, std::memory_order_relaxed);
    } else {
      word.fetch_add(1, std::memory_order_relaxed);
    }
  }
  return sum;
}

std::uint64_t run_loop(AccessKind kind, std::span<std::uint64_t> array, Xoshiro256StarStar& rng,
                       std::uint64_t count) {
  switch (kind) {
    case AccessKind::kRead: return access_loop<AccessKind::kRead>(array, rng, count);
    case AccessKind::kWrite: return access_loop<AccessKind::kWrite>(array, rng, count);
    case AccessKind::kAtomicWrite: return access_loop<AccessKind::kAtomicWrite>(array, rng, count);
  }
  return 0;
}

CellResult measure_on(AccessKind kind, std::span<std::uint64_t> array, int threads, std::uint64_t iterations,
                      std::uint64_t seed) {
  const std::uint64_t warmup = iterations / 8;
  std::uint64_t sink = 0;
  double start = 0, stop = 0;
#pragma omp parallel num_threads(threads) reduction(+ : sink)
  {
    Xoshiro256StarStar rng(stream_seed(seed, static_cast<std::uint64_t>(omp_get_thread_num())));
    sink += run_loop(kind, array, rng, warmup);
#pragma omp barrier
#pragma omp single
    start = omp_get_wtime();
    sink += run_loop(kind, array, rng, iterations);
#pragma omp barrier
#pragma omp single
    stop = omp_get_wtime();
  }
  CellResult r;
  r.ns_per_access = (stop - start) * 1e9 / (static_cast<double>(iterations) * threads);
  if (kind == AccessKind::kRead) {
    r.checksum = sink;
  } else {
    std::uint64_t sum = 0;
#pragma omp parallel for reduction(+ : sum) num_threads(threads)
    for (std::uint64_t i = 0; i < array.size(); ++i) sum += array[i];
    r.checksum = sum;
  }
  return r;
}

std::vector<std::uint64_t> make_array(std::uint64_t bytes, int threads) {
  std::vector<std::uint64_t> a(std::max<std::uint64_t>(1, bytes / sizeof(std::uint64_t)));
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::uint64_t i = 0; i < a.size(); ++i) a[i] = i;
  return a;
}

std::uint64_t available_memory() {
  const long pages = sysconf(_SC_AVPHYS_PAGES);
  const long page = sysconf(_SC_PAGESIZE);
  if (pages <= 0 || page <= 0) return ~std::uint64_t{0};
  return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
}

std::uint64_t parse_size(const std::string& s) {
  std::uint64_t v = 0;
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = v * 10 + (s[i++] - '0');
  if (i < s.size()) {
    switch (s[i]) {
      case 'K': v <<= 10; break;
      case 'M': v <<= 20; break;
      case 'G': v <<= 30; break;
      default: break;
    }
  }
  return v;
}

// Sum of cache sizes at the given levels over distinct instances.
std::optional<std::uint64_t> cache_bytes(std::set<int> levels) {
  namespace fs = std::filesystem;
  const fs::path root("/sys/devices/system/cpu");
  std::error_code ec;
  if (!fs::exists(root, ec)) return std::nullopt;
  std::set<std::pair<int, std::string>> seen;
  std::uint64_t total = 0;
  for (const auto& cpu : fs::directory_iterator(root, ec)) {
    const std::string name = cpu.path().filename().string();
    if (name.rfind("cpu", 0) != 0 || name.size() == 3 || !std::isdigit(static_cast<unsigned char>(name[3]))) continue;
    const fs::path cache = cpu.path() / "cache";
    if (!fs::exists(cache, ec)) continue;
    for (const auto& index : fs::directory_iterator(cache, ec)) {
      if (index.path().filename().string().rfind("index", 0) != 0) continue;
      auto read = [&](const char* file) {
        std::ifstream in(index.path() / file);
        std::string s;
        std::getline(in, s);
        return s;
      };
      int level = 0;
      try {
        level = std::stoi(read("level"));
      } catch (const std::exception&) {
        continue;
      }
      if (!levels.count(level) || read("type") == "Instruction") continue;
      if (seen.emplace(level, read("shared_cpu_list")).second) total += parse_size(read("size"));
    }
  }
  if (total == 0) return std::nullopt;
  return total;
}

}  // namespace

CellResult measure_cell(AccessKind kind, std::uint64_t array_bytes, int threads, std::uint64_t iterations,
                        std::uint64_t seed) {
  if (iterations == 0) throw std::invalid_argument("empty measurement");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  auto array = make_array(array_bytes, threads);
  return measure_on(kind, array, threads, iterations, seed);
}

MemoryTimings measure_timings(const MeasureOptions& o) {
  if (o.iterations == 0) throw std::invalid_argument("empty measurement");
  if (o.threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (o.total_l3_bytes == 0) throw std::invalid_argument("L3 size must be > 0");

  MemoryTimings t;
  t.threads = o.threads;
  t.iterations = o.iterations;
  t.warmup_iterations = o.iterations / 8;
  t.hit_array_bytes = o.total_l3_bytes;
  {
    auto hit = make_array(o.total_l3_bytes, o.threads);
    t.t_r_h = measure_on(AccessKind::kRead, hit, o.threads, o.iterations, o.seed).ns_per_access;
    t.t_w_h = measure_on(AccessKind::kWrite, hit, o.threads, o.iterations, o.seed).ns_per_access;
    t.t_aw_h = measure_on(AccessKind::kAtomicWrite, hit, o.threads, o.iterations, o.seed).ns_per_access;
  }

  // Miss regime: 1000x L3 capped by the configured maximum. When that does
  // not fit, halve down to the fallback floor.
  const std::uint64_t floor = std::min(o.min_miss_factor * o.total_l3_bytes, o.max_miss_bytes);
  std::uint64_t bytes = std::min(o.miss_factor * o.total_l3_bytes, o.max_miss_bytes);
  const std::uint64_t avail = available_memory();
  std::vector<std::uint64_t> miss;
  for (;;) {
    if (bytes < floor) throw std::runtime_error("cannot allocate the miss-regime array");
    if (bytes <= avail / 10 * 8) {
      try {
        miss = make_array(bytes, o.threads);
        break;
      } catch (const std::bad_alloc&) {
      }
    }
    bytes /= 2;
  }
  t.miss_array_bytes = miss.size() * sizeof(std::uint64_t);
  t.t_r_m = measure_on(AccessKind::kRead, miss, o.threads, o.iterations, o.seed).ns_per_access;
  t.t_w_m = measure_on(AccessKind::kWrite, miss, o.threads, o.iterations, o.seed).ns_per_access;
  t.t_aw_m = measure_on(AccessKind::kAtomicWrite, miss, o.threads, o.iterations, o.seed).ns_per_access;
  return t;
}

std::optional<std::uint64_t> detect_l3_bytes() { return cache_bytes({3}); }
std::optional<std::uint64_t> detect_l2_l3_bytes() { return cache_bytes({2, 3}); }

std::vector<RateRow> report_rates(const MemoryTimings& t) {
  const std::pair<AccessKind, double> hit[] = {
      {AccessKind::kRead, t.t_r_h}, {AccessKind::kWrite, t.t_w_h}, {AccessKind::kAtomicWrite, t.t_aw_h}};
  const std::pair<AccessKind, double> miss[] = {
      {AccessKind::kRead, t.t_r_m}, {AccessKind::kWrite, t.t_w_m}, {AccessKind::kAtomicWrite, t.t_aw_m}};
  std::vector<RateRow> rows;
  for (auto [kind, ns] : hit) rows.push_back({kind, Regime::kHit, ns, t.t_r_h / ns});
  for (auto [kind, ns] : miss) rows.push_back({kind, Regime::kMiss, ns, t.t_r_h / ns});
  return rows;
}

void write_rates_csv(std::ostream& out, const MemoryTimings& t) {
  out << "kind,regime,ns_per_access,normalized_rate\n";
  out << std::setprecision(17);
  for (const RateRow& r : report_rates(t)) {
    out << to_string(r.kind) << ',' << to_string(r.regime) << ',' << r.ns_per_access << ',' << r.normalized_rate
        << '\n';
  }
}

MemoryTimings read_rates_csv(std::istream& in) {
  std::map<std::string, double> cells;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("kind,", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string kind, regime, ns;
    std::getline(ss, kind, ',');
    std::getline(ss, regime, ',');
    std::getline(ss, ns, ',');
    try {
      cells[kind + "/" + regime] = std::stod(ns);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rates line: " + line);
    }
  }
  auto get = [&](const char* key) {
    auto it = cells.find(key);
    if (it == cells.end()) throw std::invalid_argument(std::string("rates CSV lacks ") + key);
    return it->second;
  };
  MemoryTimings t;
  t.t_r_h = get("read/hit");
  t.t_w_h = get("write/hit");
  t.t_aw_h = get("atomic_write/hit");
  t.t_r_m = get("read/miss");
  t.t_w_m = get("write/miss");
  t.t_aw_m = get("atomic_write/miss");
  return t;
}

}  // namespace potra
