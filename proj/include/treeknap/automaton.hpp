#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "treeknap/tree.hpp"

namespace treeknap {

using State = std::uint32_t;
using StateMask = std::uint64_t;

inline constexpr std::size_t kMaxStates = 64;

// A child state together with the number of components it opens. Increments
// other than 0 only appear in PRODUCT options of lifted automata.
struct Option {
  State state = 0;
  int increment = 0;
  auto operator<=>(const Option&) const = default;
};

// Rule right-hand sides, generic over the arity d of the vertex they apply to.
struct Uniform {
  State state;  // (q', ..., q'); the empty tuple at arity 0
  auto operator<=>(const Uniform&) const = default;
};
struct OneHot {
  State special;   // at exactly one position
  State fallback;  // everywhere else; yields nothing at arity 0
  auto operator<=>(const OneHot&) const = default;
};
struct Product {
  std::vector<Option> options;  // every position independently
  auto operator<=>(const Product&) const = default;
};
struct Explicit {
  std::vector<State> states;  // exactly this tuple, only at its own arity
  auto operator<=>(const Explicit&) const = default;
};
using Shape = std::variant<Uniform, OneHot, Product, Explicit>;

struct Rule {
  State source = 0;
  int label = 0;
  Shape shape;
  bool operator==(const Rule&) const = default;
};

class Automaton {
 public:
  Automaton() = default;
  // Validates: nonempty initial set, at most kMaxStates states, unique names,
  // states in range, increments in {0, 1} and only on PRODUCT options, no
  // duplicate rules.
  Automaton(std::vector<std::string> names, std::vector<State> initial,
            std::vector<Rule> rules);

  std::size_t state_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(State q) const { return names_[q]; }
  std::optional<State> find_state(std::string_view name) const;

  const std::vector<State>& initial() const noexcept { return initial_; }
  StateMask initial_mask() const noexcept;
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  // Indices into rules() with the given source.
  const std::vector<std::size_t>& rules_for(State q, int label) const {
    return by_source_[2 * q + static_cast<std::size_t>(label)];
  }
  bool has_increments() const noexcept;

  bool operator==(const Automaton& other) const {
    return names_ == other.names_ && initial_ == other.initial_ &&
           rules_ == other.rules_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<State> initial_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::size_t>> by_source_;
};

// A child-state description at a fixed arity. Concrete shapes are
// canonicalised so that equal tuples compare equal; PRODUCT is kept
// structural. options_at(i) lists the admissible (state, increment) pairs for
// child position i.
class Pattern {
 public:
  enum class Kind : std::uint8_t { kUniform, kOneHot, kProduct, kExplicit };

  static Pattern uniform(State q, std::size_t arity);
  static Pattern one_hot(State special, State fallback, std::size_t position,
                         std::size_t arity);
  static Pattern product(std::vector<Option> options, std::size_t arity);
  static Pattern explicit_tuple(std::vector<State> states);

  Kind kind() const noexcept { return kind_; }
  std::size_t arity() const noexcept { return arity_; }
  std::span<const Option> options_at(std::size_t position) const;
  // ONE_HOT only.
  std::size_t special_position() const noexcept { return special_; }
  const Option& fallback() const { return options_[1]; }
  const std::vector<Option>& options() const noexcept { return options_; }

  // Expands to concrete state tuples (increments dropped). PRODUCT patterns
  // expand to |options|^arity tuples; callers guard the size.
  std::vector<std::vector<State>> expand() const;

  auto operator<=>(const Pattern&) const = default;

 private:
  Kind kind_ = Kind::kExplicit;
  std::size_t arity_ = 0;
  std::size_t special_ = 0;
  std::vector<Option> options_;
};

// Distinct child patterns for source (q, label) at arity d, merged across
// all rules with that source, in first-appearance order.
std::vector<Pattern> transitions(const Automaton& aut, State q, int label,
                                 std::size_t arity);

// Maximum over arities m <= n of the number of distinct tuples across all
// rules. PRODUCT shapes count |options|^m. Saturates at 2^63-1.
std::uint64_t diversity(const Automaton& aut, std::size_t n);
// Same, but a PRODUCT shape counts once: the number of distinct chains a
// solver evaluates per vertex.
std::uint64_t chain_diversity(const Automaton& aut, std::size_t n);

bool is_prefix_closed(const Automaton& aut, std::size_t n);
Automaton prefix_closure(const Automaton& aut);

// Greatest set I of states from which the only accepted labeling of any
// subtree is the all-zero one: no (q, 1) rule, every (q, 0) tuple stays
// inside I, and some (q, 0) tuple exists at every arity.
StateMask inert_states(const Automaton& aut);

// Per-vertex selection flags (0/1).
using LabelVector = std::vector<std::uint8_t>;

// States from which the labeled subtree at each vertex is accepted, computed
// bottom-up. `hole`, when set, is a vertex whose subtree is ignored: every
// state is acceptable there.
std::vector<StateMask> good_states(const Automaton& aut, const Instance& instance,
                                   std::span<const std::uint8_t> labels,
                                   Vertex hole = kNoVertex);
// Whether some tuple for (q, label) fits the children's good sets.
bool rule_fits(const Automaton& aut, State q, int label,
               std::span<const StateMask> child_good);
bool accepts(const Automaton& aut, const Instance& instance,
             std::span<const std::uint8_t> labels);

// "independent-set", "precedence", "connectivity", "connectivity-closed".
Automaton builtin(std::string_view name);
std::vector<std::string> builtin_names();

// Text format:
//   states <name>...
//   init <name>...
//   rule <state> <0|1> uniform q | onehot q_a q_b | product q[:inc]... | explicit q...
Automaton parse_automaton(std::string_view text);
std::string serialize_automaton(const Automaton& aut);

}  // namespace treeknap
