#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "treeknap/automaton.hpp"
#include "treeknap/bench.hpp"
#include "treeknap/error.hpp"
#include "treeknap/oracle.hpp"
#include "treeknap/solvers.hpp"
#include "treeknap/subtree_problems.hpp"
#include "treeknap/tree.hpp"

namespace treeknap::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::kParse, "cannot write " + path);
}

struct ConstraintArgs {
  std::string constraint;
  std::string automaton;

  void attach(CLI::App* cmd) {
    auto* c = cmd->add_option("--constraint", constraint, "built-in constraint name");
    auto* a = cmd->add_option("--automaton", automaton, "automaton file");
    c->excludes(a);
  }

  Automaton load() const {
    if (!automaton.empty()) return parse_automaton(read_file(automaton));
    if (constraint.empty()) {
      throw Error(ErrorCode::kParse, "one of --constraint or --automaton is required");
    }
    return builtin(constraint);
  }
};

std::string value_token(const std::optional<Profit>& v) {
  return v ? std::to_string(*v) : "INFEASIBLE";
}

std::string value_token(const std::optional<BestValue>& v) {
  return v ? std::to_string(v->value) : "INFEASIBLE";
}

Algorithm algorithm_from(const std::string& name) {
  auto a = parse_algorithm(name);
  if (!a) throw Error(ErrorCode::kParse, "unknown algorithm '" + name + "'");
  return *a;
}

TreeShape shape_from(const std::string& name) {
  auto s = parse_shape(name);
  if (!s) throw Error(ErrorCode::kParse, "unknown shape '" + name + "'");
  return *s;
}

// --- solve -------------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  ConstraintArgs automaton;
  std::string algo = "hlrecdp";
  bool array = false;
  bool witness = false;
  bool stats = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Instance inst = parse_instance(read_file(a.instance));
  const Automaton aut = a.automaton.load();
  SolveOptions options;
  options.witness = a.witness;
  const SolveResult r = solve(inst, aut, algorithm_from(a.algo), options);
  out << (r.optimum ? "value " + std::to_string(r.optimum->value) : "INFEASIBLE") << '\n';
  if (a.witness && r.witness) {
    out << "witness";
    for (Vertex v : *r.witness) out << ' ' << v;
    out << '\n';
  }
  if (a.array) {
    ProfitArray combined(inst.capacity());
    for (State q : aut.initial()) max_into(combined, r.root_arrays[q]);
    out << "array\n" << dump_array(combined);
  }
  if (a.stats) {
    out << "invocations " << r.stats.total_invocations() << '\n'
        << "chains " << r.stats.chains << '\n'
        << "convolutions " << r.stats.convolutions << '\n'
        << "shift_adds " << r.stats.shift_adds << '\n'
        << "maxima " << r.stats.maxima << '\n';
  }
  return r.optimum ? kSolved : kInfeasible;
}

// --- compare -----------------------------------------------------------------

struct CompareArgs {
  int trials = 100;
  std::size_t n_max = 12;
  std::int64_t c_max = 20;
  std::uint64_t seed = 1;
  std::string constraint = "all";
  std::size_t exhaustive_n = 0;
  bool inject_fault = false;
  std::string reproducer;
};

constexpr std::size_t kRecDPMaxVertices = 40;
constexpr std::size_t kRecDPMaxHeight = 16;

// Returns a description of the first disagreement, if any.
std::optional<std::string> disagreement(const Instance& inst, const Automaton& aut,
                                        bool inject_fault) {
  const auto id = ProfitArray::identity(inst.capacity());
  const auto base = baseline_dp(inst, aut).root_arrays;
  if (hlrecdp_arrays(inst, aut, id, nullptr, inject_fault) != base) {
    return "hlrecdp disagrees with baseline";
  }
  if (inst.size() <= kRecDPMaxVertices && height(inst) <= kRecDPMaxHeight &&
      recdp(inst, aut, id) != base) {
    return "recdp disagrees with baseline";
  }
  if (inst.size() <= kKSubtreeOracleMaxVertices && brute_force(inst, aut).state_arrays != base) {
    return "baseline disagrees with the oracle";
  }
  return std::nullopt;
}

Instance without_leaf(const Instance& inst, Vertex leaf) {
  std::vector<std::int64_t> parents, w, p;
  for (Vertex v = 0; v < static_cast<Vertex>(inst.size()); ++v) {
    if (v == leaf) continue;
    if (v > 0) {
      const Vertex par = inst.parent(v);
      parents.push_back(par > leaf ? par - 1 : par);
    }
    w.push_back(inst.weight(v));
    p.push_back(inst.profit(v));
  }
  return build_tree(parents, w, p, inst.capacity());
}

Instance with_values(const Instance& inst, Vertex v, Weight weight, Profit profit) {
  auto w = inst.weights();
  auto p = inst.profits();
  w[static_cast<std::size_t>(v)] = weight;
  p[static_cast<std::size_t>(v)] = profit;
  const auto list = inst.parent_list();
  std::vector<std::int64_t> parents(list.begin(), list.end());
  return build_tree(parents, w, p, inst.capacity());
}

// Greedy shrinking: drop leaves, zero values, lower the capacity while the
// disagreement persists.
Instance shrink(Instance inst, const Automaton& aut, bool inject_fault) {
  auto still_fails = [&](const Instance& candidate) {
    return disagreement(candidate, aut, inject_fault).has_value();
  };
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<Instance> candidates;
    for (Vertex v = static_cast<Vertex>(inst.size()) - 1; v >= 1; --v) {
      if (inst.degree(v) == 0) candidates.push_back(without_leaf(inst, v));
    }
    for (Vertex v = 0; v < static_cast<Vertex>(inst.size()); ++v) {
      if (inst.weight(v) > 0) candidates.push_back(with_values(inst, v, 0, inst.profit(v)));
      if (inst.profit(v) > 1) candidates.push_back(with_values(inst, v, inst.weight(v), 1));
    }
    if (inst.capacity() > 0) {
      candidates.push_back(inst.with_capacity(inst.capacity() / 2));
      candidates.push_back(inst.with_capacity(inst.capacity() - 1));
    }
    for (auto& c : candidates) {
      if (still_fails(c)) {
        inst = std::move(c);
        progress = true;
        break;
      }
    }
  }
  return inst;
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  std::vector<std::string> names;
  if (a.constraint == "all") {
    names = builtin_names();
  } else {
    names = {a.constraint};
  }
  std::vector<Automaton> automata;
  for (const auto& n : names) automata.push_back(builtin(n));
  if (a.exhaustive_n > kEnumerateMaxVertices) {
    throw Error(ErrorCode::kParse, "--exhaustive-n is limited to 8");
  }
  if (a.n_max < 1 || a.c_max < 0 || a.trials < 0) {
    throw Error(ErrorCode::kParse, "--n-max must be >= 1, --c-max and --trials >= 0");
  }

  std::size_t checked = 0;
  auto check = [&](const Instance& inst) -> int {
    for (std::size_t i = 0; i < automata.size(); ++i) {
      ++checked;
      auto what = disagreement(inst, automata[i], a.inject_fault);
      if (!what) continue;
      const Instance small = shrink(inst, automata[i], a.inject_fault);
      const auto why = disagreement(small, automata[i], a.inject_fault).value_or(*what);
      out << "MISMATCH " << why << " (constraint " << names[i] << ")\n"
          << "# instance\n" << serialize_instance(small)
          << "# automaton\n" << serialize_automaton(automata[i]);
      if (!a.reproducer.empty()) {
        write_file(a.reproducer + ".instance", serialize_instance(small));
        write_file(a.reproducer + ".automaton", serialize_automaton(automata[i]));
      }
      return kInfeasible;
    }
    return kSolved;
  };

  std::mt19937_64 rng(a.seed);
  for (std::size_t n = 1; n <= a.exhaustive_n; ++n) {
    for (const auto& parents : enumerate_trees(n)) {
      std::vector<std::int64_t> w(n), p(n);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::uniform_int_distribution<std::int64_t>(0, 3)(rng);
        p[i] = std::uniform_int_distribution<std::int64_t>(0, 7)(rng);
      }
      for (std::int64_t c = 0; c <= 9; ++c) {
        if (int rc = check(build_tree(parents, w, p, c)); rc != kSolved) return rc;
      }
    }
  }
  for (int t = 0; t < a.trials; ++t) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, a.n_max)(rng);
    const auto c = std::uniform_int_distribution<std::int64_t>(0, a.c_max)(rng);
    const auto inst = generate_instance(TreeShape::kRandom, n, std::max<std::int64_t>(1, a.c_max / 4),
                                        20, c, rng());
    if (int rc = check(inst); rc != kSolved) return rc;
  }
  out << "compared " << checked << " instance/constraint pairs: all solvers agree\n";
  return kSolved;
}

// --- bench -------------------------------------------------------------------

struct BenchArgs {
  std::string suite;
  std::string constraint = "precedence";
  std::vector<std::string> algos = {"hlrecdp"};
  std::string shape = "binary";
  int reps = 3;
  std::uint64_t seed = 1;
  std::string out_file;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  BenchConfig config;
  auto suite = parse_suite(a.suite);
  if (!suite) throw Error(ErrorCode::kParse, "unknown suite '" + a.suite + "'");
  config.suite = *suite;
  config.constraint = a.constraint;
  config.algos.clear();
  for (const auto& name : a.algos) config.algos.push_back(algorithm_from(name));
  config.shape = shape_from(a.shape);
  config.reps = a.reps;
  config.seed = a.seed;
  if (const char* env = std::getenv("TREEKNAP_THREADS")) {
    config.threads = static_cast<unsigned>(std::max(1, std::atoi(env)));
  }
  builtin(config.constraint);  // validate before running anything
  const auto records = run_bench(config);

  std::ostringstream csv;
  csv << bench_csv_header() << '\n';
  for (const auto& r : records) csv << to_csv_row(r) << '\n';
  const bool to_stdout = a.out_file.empty() || a.out_file == "-";
  if (to_stdout) {
    out << csv.str();
  } else {
    write_file(a.out_file, csv.str());
  }
  for (const auto& fit : fit_slopes(records, config.suite)) {
    out << (to_stdout ? "# " : "") << "slope " << to_string(fit.algo) << ' ' << std::fixed
        << std::setprecision(3) << fit.slope << " (" << fit.points << " points)\n";
  }
  return kSolved;
}

// --- small commands ------------------------------------------------------------

struct GenArgs {
  std::string shape = "random";
  std::size_t n = 10;
  std::int64_t max_weight = 10;
  std::int64_t max_profit = 10;
  std::int64_t capacity = 10;
  std::uint64_t seed = 1;
  std::string out_file;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const auto inst =
      generate_instance(shape_from(a.shape), a.n, a.max_weight, a.max_profit, a.capacity, a.seed);
  if (a.out_file.empty() || a.out_file == "-") {
    out << serialize_instance(inst);
  } else {
    write_file(a.out_file, serialize_instance(inst));
  }
  return kSolved;
}

struct DiversityArgs {
  ConstraintArgs automaton;
  std::size_t n = 10;
};

int cmd_diversity(const DiversityArgs& a, std::ostream& out) {
  const Automaton aut = a.automaton.load();
  out << diversity(aut, a.n) << ", prefix-closed: " << (is_prefix_closed(aut, a.n) ? "yes" : "no")
      << '\n';
  return kSolved;
}

struct KSubtreeArgs {
  std::string instance;
  ConstraintArgs automaton;
  std::size_t k = 1;
  std::string algo = "hlrecdp";
};

int cmd_ksubtree(const KSubtreeArgs& a, std::ostream& out) {
  const Instance inst = parse_instance(read_file(a.instance));
  const Automaton aut = a.automaton.load();
  const Algorithm algo = algorithm_from(a.algo);
  std::vector<std::optional<Profit>> best;
  if (algo == Algorithm::kOracle) {
    best = brute_force_ksubtree(inst, aut, a.k).best;
  } else {
    best = conn_k(inst, aut, a.k, algo).best;
  }
  for (std::size_t l = 0; l < best.size(); ++l) out << (l ? " " : "") << value_token(best[l]);
  out << '\n';
  return kSolved;
}

struct PerVertexArgs {
  std::string instance;
  ConstraintArgs automaton;
};

int cmd_all_subtrees(const PerVertexArgs& a, std::ostream& out) {
  const Instance inst = parse_instance(read_file(a.instance));
  const auto values = for_all_subtree(inst, a.automaton.load());
  for (std::size_t u = 0; u < inst.size(); ++u) out << u << ' ' << value_token(values.value[u]) << '\n';
  return kSolved;
}

int cmd_complements(const PerVertexArgs& a, std::ostream& out) {
  const Instance inst = parse_instance(read_file(a.instance));
  const auto table = for_all_subtree_complement(inst, a.automaton.load());
  for (std::size_t u = 0; u < inst.size(); ++u) {
    out << u << ' ' << value_token(table.best(static_cast<Vertex>(u))) << '\n';
  }
  return kSolved;
}

}  // namespace

int exit_code_for(const Error& error) {
  return error.is_contract_violation() ? kContract : kInvalid;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Automaton-constrained tree knapsack solvers"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  solve_cmd->add_option("--instance", solve_args.instance, "instance file")->required();
  solve_args.automaton.attach(solve_cmd);
  solve_cmd->add_option("--algo", solve_args.algo, "baseline | recdp | hlrecdp | oracle");
  solve_cmd->add_flag("--array", solve_args.array, "dump the root array");
  solve_cmd->add_flag("--witness", solve_args.witness, "print an optimal vertex set");
  solve_cmd->add_flag("--stats", solve_args.stats, "print call counters");

  CompareArgs compare_args;
  auto* compare_cmd = app.add_subcommand("compare", "differential test of all solvers");
  compare_cmd->add_option("--trials", compare_args.trials, "random instances");
  compare_cmd->add_option("--n-max", compare_args.n_max, "largest random n");
  compare_cmd->add_option("--c-max", compare_args.c_max, "largest random capacity");
  compare_cmd->add_option("--seed", compare_args.seed, "seed");
  compare_cmd->add_option("--constraint", compare_args.constraint, "constraint name or all");
  compare_cmd->add_option("--exhaustive-n", compare_args.exhaustive_n,
                          "also check every tree up to this size (C = 0..9)");
  compare_cmd->add_flag("--inject-fault", compare_args.inject_fault,
                        "break hlrecdp on purpose (harness self-test)");
  compare_cmd->add_option("--reproducer", compare_args.reproducer,
                          "write PREFIX.instance and PREFIX.automaton on mismatch");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "timing sweeps with slope fits");
  bench_cmd->add_option("--suite", bench_args.suite, "scaling-n | scaling-c")->required();
  bench_cmd->add_option("--constraint", bench_args.constraint, "built-in constraint");
  bench_cmd->add_option("--algo", bench_args.algos, "comma-separated algorithms")->delimiter(',');
  bench_cmd->add_option("--shape", bench_args.shape, "path | star | binary | caterpillar | random");
  bench_cmd->add_option("--reps", bench_args.reps, "repetitions per point");
  bench_cmd->add_option("--seed", bench_args.seed, "seed");
  bench_cmd->add_option("--out", bench_args.out_file, "CSV output file (default stdout)");

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "write a random instance");
  gen_cmd->add_option("--shape", gen_args.shape, "path | star | binary | caterpillar | random");
  gen_cmd->add_option("--n", gen_args.n, "vertices")->required();
  gen_cmd->add_option("--max-weight", gen_args.max_weight, "largest weight");
  gen_cmd->add_option("--max-profit", gen_args.max_profit, "largest profit");
  gen_cmd->add_option("--capacity", gen_args.capacity, "capacity");
  gen_cmd->add_option("--seed", gen_args.seed, "seed");
  gen_cmd->add_option("--out", gen_args.out_file, "output file (default stdout)");

  DiversityArgs diversity_args;
  auto* diversity_cmd = app.add_subcommand("diversity", "transition diversity and prefix closure");
  diversity_args.automaton.attach(diversity_cmd);
  diversity_cmd->add_option("--n", diversity_args.n, "largest arity")->required();

  KSubtreeArgs ksubtree_args;
  auto* ksubtree_cmd = app.add_subcommand("ksubtree", "best total profit for l = 0..k subtrees");
  ksubtree_cmd->add_option("--instance", ksubtree_args.instance, "instance file")->required();
  ksubtree_args.automaton.attach(ksubtree_cmd);
  ksubtree_cmd->add_option("--k", ksubtree_args.k, "largest number of subtrees")->required();
  ksubtree_cmd->add_option("--algo", ksubtree_args.algo, "hlrecdp | baseline | oracle");

  PerVertexArgs all_args;
  auto* all_cmd = app.add_subcommand("all-subtrees", "optimum of every rooted subtree");
  all_cmd->add_option("--instance", all_args.instance, "instance file")->required();
  all_args.automaton.attach(all_cmd);

  PerVertexArgs comp_args;
  auto* comp_cmd = app.add_subcommand("complements", "optimum outside every rooted subtree");
  comp_cmd->add_option("--instance", comp_args.instance, "instance file")->required();
  comp_args.automaton.attach(comp_cmd);

  std::vector<const char*> argv{"treeknap"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSolved;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args, out);
    if (*compare_cmd) return cmd_compare(compare_args, out);
    if (*bench_cmd) return cmd_bench(bench_args, out);
    if (*gen_cmd) return cmd_gen(gen_args, out);
    if (*diversity_cmd) return cmd_diversity(diversity_args, out);
    if (*ksubtree_cmd) return cmd_ksubtree(ksubtree_args, out);
    if (*all_cmd) return cmd_all_subtrees(all_args, out);
    if (*comp_cmd) return cmd_complements(comp_args, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kContract;
  }
  return kInvalid;
}

}  // namespace treeknap::cli
