#include "treeknap/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "treeknap/error.hpp"

namespace treeknap {
namespace {

struct Point {
  Algorithm algo;
  std::size_t n;
  Weight capacity;
};

std::vector<Point> sweep(const BenchConfig& config) {
  std::vector<Point> points;
  for (Algorithm algo : config.algos) {
    if (algo == Algorithm::kOracle) {
      throw Error(ErrorCode::kUnsupported, "the oracle is not benchmarked");
    }
    if (config.suite == Suite::kScalingC) {
      std::vector<Weight> caps = config.capacities;
      if (caps.empty()) {
        for (int e = 7; e <= 13; ++e) {
          if (algo != Algorithm::kBaseline || e <= 10) caps.push_back(Weight{1} << e);
        }
      }
      const std::size_t n = config.sizes.empty() ? 511 : config.sizes.front();
      for (Weight c : caps) points.push_back({algo, n, c});
    } else {
      std::vector<std::size_t> sizes = config.sizes;
      if (sizes.empty()) {
        for (int e = 7; e <= 13; ++e) sizes.push_back((std::size_t{1} << e) - 1);
      }
      const Weight c = config.capacities.empty() ? 256 : config.capacities.front();
      for (std::size_t n : sizes) points.push_back({algo, n, c});
    }
  }
  return points;
}

BenchRecord measure(const BenchConfig& config, const Automaton& aut, const Point& point,
                    int rep) {
  const Instance instance =
      generate_instance(config.shape, point.n, std::max<Weight>(1, point.capacity / 16), 1000,
                        point.capacity, config.seed);
  const auto start = std::chrono::steady_clock::now();
  const SolveResult result = solve(instance, aut, point.algo);
  const auto stop = std::chrono::steady_clock::now();
  return BenchRecord{point.algo,
                     config.constraint,
                     config.shape,
                     point.n,
                     point.capacity,
                     config.seed,
                     rep,
                     result.stats.total_invocations(),
                     result.stats.convolutions,
                     result.stats.shift_adds,
                     std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()};
}

// glibc hands freed heap tops back to the OS and large blocks go through
// mmap, so solves that churn C-sized arrays pay page faults on a share of
// allocations that grows with C. That bends the fitted slopes, so timing runs
// keep freed memory in the process.
void pin_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

}  // namespace

const char* to_string(Suite suite) {
  return suite == Suite::kScalingN ? "scaling-n" : "scaling-c";
}

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "scaling-n") return Suite::kScalingN;
  if (name == "scaling-c") return Suite::kScalingC;
  return std::nullopt;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  if (config.reps < 1) throw Error(ErrorCode::kUnsupported, "reps must be at least 1");
  const Automaton aut = builtin(config.constraint);
  const auto points = sweep(config);
  const std::size_t total = points.size() * static_cast<std::size_t>(config.reps);
  std::vector<std::optional<BenchRecord>> slots(total);
  // Repetitions are the outer loop so that a burst of machine noise hits one
  // repetition of many points rather than every repetition of one point.
  auto task = [&](std::size_t i) {
    const std::size_t point = i % points.size();
    const std::size_t rep = i / points.size();
    slots[point * static_cast<std::size_t>(config.reps) + rep] =
        measure(config, aut, points[point], static_cast<int>(rep));
  };
  pin_allocator();
  // One untimed pass first: the earliest solves in a process run measurably
  // slower (allocator growth, clock ramp-up) and would bend the small points.
  for (const auto& p : points) measure(config, aut, p, -1);
  const unsigned workers = std::max(1u, config.threads);
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < total;) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard<std::mutex> hold(error_lock);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  std::vector<BenchRecord> out;
  out.reserve(total);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::string bench_csv_header() {
  return "algo,constraint,shape,n,C,seed,rep,invocations,convolutions,shift_adds,ns";
}

std::string to_csv_row(const BenchRecord& r) {
  std::ostringstream os;
  os << to_string(r.algo) << ',' << r.constraint << ',' << to_string(r.shape) << ',' << r.n
     << ',' << r.capacity << ',' << r.seed << ',' << r.rep << ',' << r.invocations << ','
     << r.convolutions << ',' << r.shift_adds << ',' << r.ns;
  return os.str();
}

double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::kLengthMismatch, "slope fitting needs at least two points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto k = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::vector<SlopeFit> fit_slopes(std::span<const BenchRecord> records, Suite suite) {
  std::vector<Algorithm> order;
  std::map<Algorithm, std::map<double, double>> fastest;
  for (const auto& r : records) {
    if (!fastest.count(r.algo)) order.push_back(r.algo);
    const double x = suite == Suite::kScalingN ? static_cast<double>(r.n)
                                               : static_cast<double>(r.capacity);
    auto& slot = fastest[r.algo][x];
    const auto ns = static_cast<double>(std::max<std::int64_t>(r.ns, 1));
    slot = slot == 0 ? ns : std::min(slot, ns);
  }
  std::vector<SlopeFit> fits;
  for (Algorithm algo : order) {
    const auto& pts = fastest[algo];
    if (pts.size() < 2) continue;
    const std::size_t keep = std::max<std::size_t>(2, (pts.size() + 1) / 2);
    std::vector<double> xs, ys;
    std::size_t skip = pts.size() - keep;
    for (auto [x, y] : pts) {
      if (skip > 0) {
        --skip;
        continue;
      }
      xs.push_back(x);
      ys.push_back(y);
    }
    fits.push_back({algo, fit_loglog_slope(xs, ys), xs.size()});
  }
  return fits;
}

}  // namespace treeknap
