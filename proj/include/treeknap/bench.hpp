#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeknap/oracle.hpp"
#include "treeknap/solvers.hpp"

namespace treeknap {

enum class Suite { kScalingN, kScalingC };
const char* to_string(Suite suite);
std::optional<Suite> parse_suite(std::string_view name);

struct BenchRecord {
  Algorithm algo;
  std::string constraint;
  TreeShape shape;
  std::size_t n;
  Weight capacity;
  std::uint64_t seed;
  int rep;
  std::uint64_t invocations;
  std::uint64_t convolutions;
  std::uint64_t shift_adds;
  std::int64_t ns;
};

struct BenchConfig {
  Suite suite = Suite::kScalingC;
  std::string constraint = "precedence";
  std::vector<Algorithm> algos = {Algorithm::kHLRecDP};
  TreeShape shape = TreeShape::kBinary;
  int reps = 3;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Empty means the suite default: scaling-c sweeps C = 2^7 .. 2^13 at
  // n = 511 (baseline stops at 2^10); scaling-n sweeps n = 2^7-1 .. 2^13-1
  // at C = 256.
  std::vector<std::size_t> sizes;
  std::vector<Weight> capacities;
};

// One record per (algorithm, sweep point, repetition) in that order. With
// threads > 1 repetitions run on a worker pool; the order is unchanged.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

std::string bench_csv_header();
std::string to_csv_row(const BenchRecord& record);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct SlopeFit {
  Algorithm algo;
  double slope;
  std::size_t points;
};

// Per algorithm: the fastest repetition at each sweep point, fitted over the
// upper half of the sweep (by n for scaling-n, by C for scaling-c).
std::vector<SlopeFit> fit_slopes(std::span<const BenchRecord> records, Suite suite);

}  // namespace treeknap
