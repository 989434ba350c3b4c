#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "treeknap/automaton.hpp"
#include "treeknap/profit_array.hpp"
#include "treeknap/tree.hpp"

namespace treeknap {

inline constexpr std::size_t kOracleMaxVertices = 25;
inline constexpr std::size_t kKSubtreeOracleMaxVertices = 12;
inline constexpr std::size_t kKSubtreeOracleMaxK = 4;
inline constexpr std::size_t kEnumerateMaxVertices = 8;

struct OracleResult {
  std::vector<ProfitArray> state_arrays;  // per state q, accepted from q
  ProfitArray combined;                   // max over the initial states
  std::optional<BestValue> optimum;
  // Best set: largest profit, then smallest weight, then smallest bitmask.
  std::vector<Vertex> witness;
};

// Enumerates all 2^n labelings. Throws kSizeGuard above kOracleMaxVertices.
OracleResult brute_force(const Instance& instance, const Automaton& aut);

struct KSubtreeOracle {
  std::vector<std::optional<Profit>> best;  // best[l], l = 0..k
  std::vector<std::vector<Vertex>> roots;   // an optimal antichain per l
};

// Enumerates antichains of at most k roots and combines per-root oracle
// arrays by exhaustive weight splits.
KSubtreeOracle brute_force_ksubtree(const Instance& instance, const Automaton& aut,
                                    std::size_t k);

// Best profit by exact weight over X outside T_u such that some run
// accepts everything outside T_u (u is an unconstrained hole) and assigns q
// to parent(u). For the root this is the identity array.
ProfitArray brute_force_complement(const Instance& instance, const Automaton& aut,
                                   Vertex u, State q);

// All parent sequences of n-vertex trees in lexicographic order.
std::vector<std::vector<std::int64_t>> enumerate_trees(std::size_t n);

enum class TreeShape { kPath, kStar, kBinary, kCaterpillar, kRandom };
const char* to_string(TreeShape shape);
std::optional<TreeShape> parse_shape(std::string_view name);

std::vector<std::int64_t> make_parents(TreeShape shape, std::size_t n, std::uint64_t seed);
// Weights uniform in [0, max_weight], profits uniform in [0, max_profit].
Instance generate_instance(TreeShape shape, std::size_t n, std::int64_t max_weight,
                           std::int64_t max_profit, std::int64_t capacity,
                           std::uint64_t seed);

}  // namespace treeknap
