#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "treeknap/automaton.hpp"
#include "treeknap/profit_array.hpp"
#include "treeknap/solvers.hpp"
#include "treeknap/tree.hpp"

namespace treeknap {

struct SubtreeValues {
  std::vector<std::optional<BestValue>> value;  // optimum restricted to T_u
  CallStats stats;
};

// One heavy-light run per heavy path with identity input, reading off the
// arrays of every vertex on the path.
SubtreeValues for_all_subtree(const Instance& instance, const Automaton& aut);

// rows[u][q]: best profit by exact weight over X outside T_u with a run that
// accepts everything outside T_u and gives parent(u) the state q; u is an
// unconstrained hole in its parent's rule. rows[0] is the identity for every q.
struct ComplementTable {
  std::vector<std::vector<ProfitArray>> rows;
  CallStats stats;

  // Best over all parent states.
  std::optional<BestValue> best(Vertex u) const;
};

using ComplementSink = std::function<void(Vertex, std::span<const ProfitArray>)>;

// Requires a prefix-closed automaton (kNotPrefixClosed otherwise). The
// streaming form hands each vertex's rows to `sink` once and keeps only the
// working set of the current heavy-path recursion.
CallStats for_all_subtree_complement(const Instance& instance, const Automaton& aut,
                                     const ComplementSink& sink);
ComplementTable for_all_subtree_complement(const Instance& instance, const Automaton& aut);

struct LiftedAutomaton {
  Automaton automaton;
  State out;  // "no component open here"
};

// Adds a fresh state `out` with rule (out, 0) -> PRODUCT({(out, +0)} and
// {(q0, +1) : q0 initial}). The new state is named "out", or "out_" and so on
// when that name is taken.
LiftedAutomaton lift_k(const Automaton& aut);

struct KSubtreeResult {
  std::vector<std::optional<Profit>> best;  // best[l], l = 0..k
  CallStats stats;
};

// Exactly-l optimum for every l <= k over pairwise non-ancestral roots, each
// carrying a selection accepted on its full subtree. Uses the heavy-light
// engine on KTable tableaux (kHLRecDP) or the convolution DP (kBaseline).
KSubtreeResult conn_k(const Instance& instance, const Automaton& aut, std::size_t k,
                      Algorithm algo = Algorithm::kHLRecDP);

}  // namespace treeknap
