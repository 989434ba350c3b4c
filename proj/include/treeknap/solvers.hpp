#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "treeknap/automaton.hpp"
#include "treeknap/profit_array.hpp"
#include "treeknap/tree.hpp"

namespace treeknap {

struct CallStats {
  std::vector<std::uint64_t> invocations_per_vertex;
  std::uint64_t chains = 0;
  std::uint64_t convolutions = 0;
  std::uint64_t shift_adds = 0;
  std::uint64_t maxima = 0;

  explicit CallStats(std::size_t n = 0) : invocations_per_vertex(n, 0) {}
  std::uint64_t total_invocations() const noexcept;
  bool operator==(const CallStats&) const = default;
};

enum class Algorithm { kBaseline, kRecDP, kHLRecDP, kOracle };

const char* to_string(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct SolveResult {
  // x_{r,q} for every state q of the automaton (not only the initial ones).
  std::vector<ProfitArray> root_arrays;
  std::optional<BestValue> optimum;  // nullopt: INFEASIBLE
  CallStats stats;
  std::optional<std::vector<Vertex>> witness;
};

struct SolveOptions {
  bool witness = false;
  // Test hook: HLRecDP merges rule results with min instead of max.
  bool inject_fault = false;
};

// Best entry over the initial states; ties go to the smaller weight, then to
// the earlier initial state.
std::optional<BestValue> optimum_of(const Automaton& aut,
                                    std::span<const ProfitArray> root_arrays);

// Bottom-up convolution DP. Keeps every vertex's arrays when a witness is
// requested and reconstructs one by backtracking over recomputed splits.
SolveResult baseline_dp(const Instance& instance, const Automaton& aut,
                        bool want_witness = false);

// Threads x0 through the tree in input child order, one call per
// (vertex, state, input). Exponential in the depth for most automata; meant
// for small trees.
std::vector<ProfitArray> recdp(const Instance& instance, const Automaton& aut,
                               const ProfitArray& x0, CallStats* stats = nullptr);

// Heavy child first and entered once per invocation.
std::vector<ProfitArray> hlrecdp_arrays(const Instance& instance, const Automaton& aut,
                                        const ProfitArray& x0, CallStats* stats = nullptr,
                                        bool inject_fault = false);
SolveResult hlrecdp(const Instance& instance, const Automaton& aut,
                    const SolveOptions& options = {});

// Witnesses are only available from kBaseline and kOracle; asking another
// algorithm for one throws kUnsupported.
SolveResult solve(const Instance& instance, const Automaton& aut, Algorithm algo,
                  const SolveOptions& options = {});

}  // namespace treeknap
