// Runs the nine acceptance checks and prints one PASS/FAIL line each.
// Exit status is the number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "treeknap/bench.hpp"
#include "treeknap/error.hpp"
#include "treeknap/oracle.hpp"
#include "treeknap/solvers.hpp"
#include "treeknap/subtree_problems.hpp"

namespace tk = treeknap;

namespace {

// Pinned windows.
constexpr double kLinearLo = 0.85, kLinearHi = 1.15;
constexpr double kQuadLo = 1.8, kQuadHi = 2.2;
constexpr double kLog3Ceiling = 1.73;
constexpr int kTimingReps = 7;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::vector<tk::Automaton> constraints() {
  std::vector<tk::Automaton> out;
  for (const auto& n : tk::builtin_names()) out.push_back(tk::builtin(n));
  return out;
}

// All solvers against the oracle on one instance.
bool all_agree(const tk::Instance& inst, const tk::Automaton& aut) {
  const auto want = tk::brute_force(inst, aut).state_arrays;
  const auto id = tk::ProfitArray::identity(inst.capacity());
  return tk::baseline_dp(inst, aut).root_arrays == want && tk::recdp(inst, aut, id) == want &&
         tk::hlrecdp_arrays(inst, aut, id) == want;
}

Outcome exhaustive() {
  Outcome o;
  std::mt19937_64 rng(1);
  std::size_t count = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (const auto& parents : tk::enumerate_trees(n)) {
      std::vector<std::int64_t> w(n), p(n);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::uniform_int_distribution<std::int64_t>(0, 3)(rng);
        p[i] = std::uniform_int_distribution<std::int64_t>(0, 7)(rng);
      }
      for (std::int64_t c = 0; c <= 9; ++c) {
        const auto inst = tk::build_tree(parents, w, p, c);
        for (const auto& aut : constraints()) {
          ++count;
          o.require(all_agree(inst, aut), "mismatch on\n" + tk::serialize_instance(inst));
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(count) + " cases";
  return o;
}

Outcome random_small() {
  Outcome o;
  std::mt19937_64 rng(2);
  for (int t = 0; t < 500; ++t) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const auto c = std::uniform_int_distribution<std::int64_t>(0, 20)(rng);
    const auto inst = tk::generate_instance(tk::TreeShape::kRandom, n, 6, 20, c, rng());
    for (const auto& aut : constraints()) {
      o.require(all_agree(inst, aut), "mismatch on\n" + tk::serialize_instance(inst));
    }
  }
  if (o.pass) o.detail = "500 instances x 4 constraints";
  return o;
}

Outcome cross_solver() {
  Outcome o;
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    const auto c = std::uniform_int_distribution<std::int64_t>(0, 100)(rng);
    const auto shape = static_cast<tk::TreeShape>(t % 5);
    const auto inst = tk::generate_instance(shape, n, 25, 100, c, rng());
    for (const auto& aut : constraints()) {
      o.require(tk::hlrecdp(inst, aut).root_arrays == tk::baseline_dp(inst, aut).root_arrays,
                "mismatch on\n" + tk::serialize_instance(inst));
    }
  }
  if (o.pass) o.detail = "200 instances x 4 constraints";
  return o;
}

Outcome call_counts() {
  Outcome o;
  const auto prec = tk::builtin("precedence");
  for (auto shape : {tk::TreeShape::kPath, tk::TreeShape::kStar, tk::TreeShape::kBinary,
                     tk::TreeShape::kCaterpillar, tk::TreeShape::kRandom}) {
    for (std::size_t n : {1u, 17u, 1000u, 100000u}) {
      const auto inst = tk::generate_instance(shape, n, 3, 10, 8, n);
      const auto total = tk::hlrecdp(inst, prec).stats.total_invocations();
      o.require(total == n, std::string("precedence ") + tk::to_string(shape) + " n=" +
                                std::to_string(n) + ": " + std::to_string(total) + " invocations");
    }
  }
  const auto conn = tk::builtin("connectivity");
  for (auto shape : {tk::TreeShape::kBinary, tk::TreeShape::kRandom, tk::TreeShape::kCaterpillar,
                     tk::TreeShape::kStar, tk::TreeShape::kPath}) {
    for (std::size_t n : {7u, 255u, 4095u}) {
      const auto inst = tk::generate_instance(shape, n, 3, 10, 8, n + 1);
      const auto hld = tk::decorate_hld(inst);
      const auto stats = tk::hlrecdp(inst, conn).stats;
      for (std::size_t v = 0; v < n; ++v) {
        o.require(stats.invocations_per_vertex[v] <= (std::uint64_t{1} << hld.light_depth[v]),
                  std::string("connectivity ") + tk::to_string(shape) + " vertex " +
                      std::to_string(v));
      }
    }
  }
  const auto is = tk::builtin("independent-set");
  double worst = 0;
  for (int k = 1; k <= 13; ++k) {
    const std::size_t n = (std::size_t{1} << k) - 1;
    const auto inst = tk::generate_instance(tk::TreeShape::kBinary, n, 3, 10, 8, 1);
    const auto total = static_cast<double>(tk::hlrecdp(inst, is).stats.total_invocations());
    const double bound = 3.0 * std::pow(static_cast<double>(n), 1.585);
    worst = std::max(worst, total / bound);
    o.require(total <= bound, "independent-set n=" + std::to_string(n));
  }
  if (o.pass) {
    std::ostringstream ss;
    ss << "independent-set max total/(3 n^1.585) = " << worst;
    o.detail = ss.str();
  }
  return o;
}

double slope_of(const tk::BenchConfig& config, tk::Algorithm algo) {
  const auto records = tk::run_bench(config);
  for (const auto& fit : tk::fit_slopes(records, config.suite)) {
    if (fit.algo == algo) return fit.slope;
  }
  return NAN;
}

std::string fmt(const std::string& label, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.3f", label.c_str(), v);
  return buf;
}

Outcome linear_in_c() {
  Outcome o;
  std::string detail;
  for (const char* name : {"precedence", "independent-set"}) {
    tk::BenchConfig config;
    config.suite = tk::Suite::kScalingC;
    config.constraint = name;
    config.algos = {tk::Algorithm::kHLRecDP, tk::Algorithm::kBaseline};
    config.reps = kTimingReps;
    const auto records = tk::run_bench(config);
    for (const auto& fit : tk::fit_slopes(records, config.suite)) {
      const bool hl = fit.algo == tk::Algorithm::kHLRecDP;
      const double lo = hl ? kLinearLo : kQuadLo, hi = hl ? kLinearHi : kQuadHi;
      const auto label = std::string(name) + "/" + tk::to_string(fit.algo);
      detail += (detail.empty() ? "" : " ") + fmt(label, fit.slope);
      o.require(fit.slope >= lo && fit.slope <= hi, label + " slope out of window");
    }
  }
  o.detail = o.pass ? detail : o.detail + "; " + detail;
  return o;
}

Outcome exponent_in_n() {
  Outcome o;
  std::string detail;
  for (const char* name : {"precedence", "independent-set", "connectivity"}) {
    tk::BenchConfig config;
    config.suite = tk::Suite::kScalingN;
    config.constraint = name;
    config.reps = kTimingReps;
    const double s = slope_of(config, tk::Algorithm::kHLRecDP);
    detail += (detail.empty() ? "" : " ") + fmt(name, s);
    const bool linear = std::string(name) == "precedence";
    o.require(linear ? (s >= kLinearLo && s <= kLinearHi) : s <= kLog3Ceiling,
              std::string(name) + " slope out of window");
  }
  o.detail = o.pass ? detail : o.detail + "; " + detail;
  return o;
}

Outcome subtree_family() {
  Outcome o;
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
    const auto inst = tk::generate_instance(static_cast<tk::TreeShape>(t % 5), n, 6, 30,
                                            std::uniform_int_distribution<std::int64_t>(0, 40)(rng), rng());
    for (const auto& aut : constraints()) {
      const auto all = tk::for_all_subtree(inst, aut);
      for (tk::Vertex u = 0; u < static_cast<tk::Vertex>(n); ++u) {
        const auto sub = tk::extract_subtree(inst, u).instance;
        o.require(all.value[static_cast<std::size_t>(u)] == tk::hlrecdp(sub, aut).optimum,
                  "for_all_subtree mismatch on\n" + tk::serialize_instance(inst));
      }
    }
  }
  for (const char* name : {"precedence", "independent-set", "connectivity-closed"}) {
    const auto aut = tk::builtin(name);
    for (int t = 0; t < 40; ++t) {
      const auto n = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
      const auto inst = tk::generate_instance(tk::TreeShape::kRandom, n, 3, 9,
                                              std::uniform_int_distribution<std::int64_t>(0, 12)(rng), rng());
      const auto table = tk::for_all_subtree_complement(inst, aut);
      for (tk::Vertex u = 0; u < static_cast<tk::Vertex>(n); ++u) {
        for (tk::State q = 0; q < aut.state_count(); ++q) {
          o.require(table.rows[static_cast<std::size_t>(u)][q] ==
                        tk::brute_force_complement(inst, aut, u, q),
                    std::string("complement mismatch ") + name + " on\n" + tk::serialize_instance(inst));
        }
      }
    }
  }
  for (const auto& aut : constraints()) {
    for (int t = 0; t < 40; ++t) {
      const auto n = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
      const auto inst = tk::generate_instance(tk::TreeShape::kRandom, n, 3, 9,
                                              std::uniform_int_distribution<std::int64_t>(0, 12)(rng), rng());
      for (std::size_t k = 1; k <= 3; ++k) {
        o.require(tk::conn_k(inst, aut, k).best == tk::brute_force_ksubtree(inst, aut, k).best,
                  "conn_k mismatch k=" + std::to_string(k) + " on\n" + tk::serialize_instance(inst));
      }
    }
  }
  return o;
}

Outcome round_trips() {
  Outcome o;
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    const auto inst = tk::generate_instance(static_cast<tk::TreeShape>(t % 5), n, 1000, 100000,
                                            static_cast<std::int64_t>(rng() % 5000), rng());
    o.require(tk::parse_instance(tk::serialize_instance(inst)) == inst, "instance round trip");

    // Random automaton over up to four states.
    const std::size_t m = 1 + rng() % 4;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m; ++i) names.push_back("q" + std::to_string(i));
    auto st = [&] { return static_cast<tk::State>(rng() % m); };
    std::vector<tk::Rule> rules;
    for (int r = 0; r < 6; ++r) {
      tk::Shape shape;
      switch (rng() % 4) {
        case 0: shape = tk::Uniform{st()}; break;
        case 1: shape = tk::OneHot{st(), st()}; break;
        case 2: shape = tk::Explicit{std::vector<tk::State>(rng() % 4, st())}; break;
        default: shape = tk::Product{{{0, 0}, {static_cast<tk::State>(m - 1), static_cast<int>(rng() % 2)}}};
      }
      tk::Rule rule{st(), static_cast<int>(rng() % 2), shape};
      if (std::find(rules.begin(), rules.end(), rule) == rules.end()) rules.push_back(rule);
    }
    const tk::Automaton aut(names, {st()}, rules);
    o.require(tk::parse_automaton(tk::serialize_automaton(aut)) == aut, "automaton round trip");
  }

  // Exit codes, one per error class.
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "treeknap_acceptance";
  fs::create_directories(dir);
  auto file = [&](const char* name, const char* text) {
    const auto path = (dir / name).string();
    std::ofstream(path) << text;
    return path;
  };
  const auto f1 = file("f1", "3 3\n0 0\n1 2 1\n2 4 3\n");
  const auto one = file("one", "1 3\n5\n1\n");
  const auto bad = file("bad", "3 2\n0\n1 1 1\n2 3 4\n");
  const auto order = file("order", "3 2\n1 0\n1 1 1\n2 3 4\n");
  const auto badaut = file("badaut", "states s\ninit s\nrule s 1 explicit a b\n");
  struct Case {
    std::vector<std::string> args;
    int code;
  };
  const std::vector<Case> cases = {
      {{"solve", "--instance", f1, "--constraint", "precedence"}, tk::cli::kSolved},
      {{"solve", "--instance", one, "--constraint", "connectivity"}, tk::cli::kInfeasible},
      {{"solve", "--instance", bad, "--constraint", "precedence"}, tk::cli::kInvalid},
      {{"solve", "--instance", order, "--constraint", "precedence"}, tk::cli::kInvalid},
      {{"solve", "--instance", f1, "--automaton", badaut}, tk::cli::kInvalid},
      {{"solve", "--instance", f1, "--constraint", "clique"}, tk::cli::kInvalid},
      {{"solve", "--instance", f1, "--constraint", "precedence", "--witness"}, tk::cli::kInvalid},
      {{"complements", "--instance", f1, "--constraint", "connectivity"}, tk::cli::kInvalid},
      {{"solve", "--bogus"}, tk::cli::kInvalid},
  };
  for (const auto& c : cases) {
    std::ostringstream out, err;
    const int rc = tk::cli::run_cli(c.args, out, err);
    std::string joined;
    for (const auto& a : c.args) joined += a + " ";
    o.require(rc == c.code, "exit " + std::to_string(rc) + " for " + joined);
    o.require(c.code <= tk::cli::kInfeasible || (out.str().empty() && !err.str().empty()),
              "diagnostics not on the error stream for " + joined);
  }
  o.require(tk::cli::exit_code_for(tk::Error(tk::ErrorCode::kContractViolation, "x")) == tk::cli::kContract,
            "contract violation exit code");
  fs::remove_all(dir);
  return o;
}

Outcome witnesses() {
  Outcome o;
  std::mt19937_64 rng(9);
  const auto auts = constraints();
  for (int t = 0; t < 200; ++t) {
    const auto& aut = auts[static_cast<std::size_t>(t) % auts.size()];
    const bool oracle = t % 2 == 1;
    const auto n = std::uniform_int_distribution<std::size_t>(1, oracle ? 14 : 150)(rng);
    const auto inst = tk::generate_instance(static_cast<tk::TreeShape>(t % 5), n, 8, 40,
                                            std::uniform_int_distribution<std::int64_t>(0, 60)(rng), rng());
    tk::SolveOptions options;
    options.witness = true;
    const auto r = tk::solve(inst, aut, oracle ? tk::Algorithm::kOracle : tk::Algorithm::kBaseline, options);
    if (!r.optimum) {
      o.require(!r.witness.has_value(), "witness without an optimum");
      continue;
    }
    if (!r.witness) {
      o.require(false, "missing witness");
      continue;
    }
    std::vector<std::uint8_t> labels(n, 0);
    tk::Weight w = 0;
    tk::Profit p = 0;
    for (tk::Vertex v : *r.witness) {
      labels[static_cast<std::size_t>(v)] = 1;
      w += inst.weight(v);
      p += inst.profit(v);
    }
    o.require(tk::accepts(aut, inst, labels) && w <= inst.capacity() && p == r.optimum->value,
              "invalid witness on\n" + tk::serialize_instance(inst));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"1 oracle equivalence (exhaustive)", exhaustive},
      {"2 oracle equivalence (random)", random_small},
      {"3 cross-solver agreement at scale", cross_solver},
      {"4 call-count laws", call_counts},
      {"5 linear in C", linear_in_c},
      {"6 exponent in n", exponent_in_n},
      {"7 subtree family", subtree_family},
      {"8 format round trips and exit codes", round_trips},
      {"9 witness validity", witnesses},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s (%.1fs)%s%s\n", o.pass ? "PASS" : "FAIL", name, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
