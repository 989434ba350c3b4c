#include "treeknap/automaton.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "text.hpp"
#include "treeknap/error.hpp"

namespace treeknap {
namespace {

constexpr std::uint64_t kSaturated =
    static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

std::uint64_t sat_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp && r != kSaturated; ++i) r = sat_mul(r, base);
  return r;
}

StateMask bit(State q) { return StateMask{1} << q; }

StateMask option_mask(const std::vector<Option>& options) {
  StateMask m = 0;
  for (const auto& o : options) m |= bit(o.state);
  return m;
}

template <class Fn>
void for_each_state_in_shape(const Shape& shape, Fn&& fn) {
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Uniform>) {
          fn(s.state, 0);
        } else if constexpr (std::is_same_v<S, OneHot>) {
          fn(s.special, 0);
          fn(s.fallback, 0);
        } else if constexpr (std::is_same_v<S, Product>) {
          for (const auto& o : s.options) fn(o.state, o.increment);
        } else {
          for (State q : s.states) fn(q, 0);
        }
      },
      shape);
}

}  // namespace

Automaton::Automaton(std::vector<std::string> names, std::vector<State> initial,
                     std::vector<Rule> rules)
    : names_(std::move(names)), initial_(std::move(initial)), rules_(std::move(rules)) {
  if (names_.empty() || names_.size() > kMaxStates) {
    throw Error(ErrorCode::kInvalidAutomaton,
                "an automaton needs between 1 and 64 states");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) {
        throw Error(ErrorCode::kInvalidAutomaton, "duplicate state name " + names_[i]);
      }
    }
  }
  if (initial_.empty()) {
    throw Error(ErrorCode::kInvalidAutomaton, "the initial state set is empty");
  }
  const auto count = static_cast<State>(names_.size());
  for (State q : initial_) {
    if (q >= count) throw Error(ErrorCode::kUnknownState, "initial state out of range");
  }
  std::sort(initial_.begin(), initial_.end());
  initial_.erase(std::unique(initial_.begin(), initial_.end()), initial_.end());

  by_source_.assign(2 * names_.size(), {});
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    Rule& r = rules_[i];
    if (r.source >= count || (r.label != 0 && r.label != 1)) {
      throw Error(ErrorCode::kInvalidAutomaton, "rule source out of range");
    }
    const bool is_product = std::holds_alternative<Product>(r.shape);
    for_each_state_in_shape(r.shape, [&](State q, int inc) {
      if (q >= count) throw Error(ErrorCode::kUnknownState, "rule state out of range");
      if (inc != 0 && (!is_product || inc != 1)) {
        throw Error(ErrorCode::kInvalidAutomaton,
                    "component increments must be 0 or 1 and only on product options");
      }
    });
    if (auto* p = std::get_if<Product>(&r.shape)) {
      if (p->options.empty()) {
        throw Error(ErrorCode::kBadShape, "a product needs at least one option");
      }
      std::sort(p->options.begin(), p->options.end());
      p->options.erase(std::unique(p->options.begin(), p->options.end()),
                       p->options.end());
    }
    for (std::size_t j : by_source_[2 * r.source + static_cast<std::size_t>(r.label)]) {
      if (rules_[j].shape == r.shape) {
        throw Error(ErrorCode::kDuplicateRule,
                    "duplicate rule for (" + names_[r.source] + ", " +
                        std::to_string(r.label) + ")");
      }
    }
    by_source_[2 * r.source + static_cast<std::size_t>(r.label)].push_back(i);
  }
}

std::optional<State> Automaton::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<State>(i);
  }
  return std::nullopt;
}

StateMask Automaton::initial_mask() const noexcept {
  StateMask m = 0;
  for (State q : initial_) m |= bit(q);
  return m;
}

bool Automaton::has_increments() const noexcept {
  for (const auto& r : rules_) {
    if (const auto* p = std::get_if<Product>(&r.shape)) {
      for (const auto& o : p->options) {
        if (o.increment != 0) return true;
      }
    }
  }
  return false;
}

// --- Pattern ---------------------------------------------------------------

Pattern Pattern::uniform(State q, std::size_t arity) {
  if (arity == 0) return explicit_tuple({});
  Pattern p;
  p.kind_ = Kind::kUniform;
  p.arity_ = arity;
  p.options_ = {Option{q, 0}};
  return p;
}

Pattern Pattern::one_hot(State special, State fallback, std::size_t position,
                         std::size_t arity) {
  if (special == fallback || arity == 1) return uniform(special, arity);
  // (a, b) at arity 2 is both one_hot(a, b, 0) and one_hot(b, a, 1).
  if (arity == 2 && position == 1) return one_hot(fallback, special, 0, 2);
  Pattern p;
  p.kind_ = Kind::kOneHot;
  p.arity_ = arity;
  p.special_ = position;
  p.options_ = {Option{special, 0}, Option{fallback, 0}};
  return p;
}

Pattern Pattern::product(std::vector<Option> options, std::size_t arity) {
  if (arity == 0) return explicit_tuple({});
  std::sort(options.begin(), options.end());
  options.erase(std::unique(options.begin(), options.end()), options.end());
  if (options.size() == 1 && options[0].increment == 0) {
    return uniform(options[0].state, arity);
  }
  Pattern p;
  p.kind_ = Kind::kProduct;
  p.arity_ = arity;
  p.options_ = std::move(options);
  return p;
}

Pattern Pattern::explicit_tuple(std::vector<State> states) {
  const std::size_t d = states.size();
  if (d > 0) {
    std::map<State, std::size_t> counts;
    for (State q : states) ++counts[q];
    if (counts.size() == 1) return uniform(states[0], d);
    if (counts.size() == 2) {
      if (d == 2) return one_hot(states[0], states[1], 0, 2);
      for (auto [q, c] : counts) {
        if (c != 1) continue;
        State other = counts.begin()->first == q ? std::next(counts.begin())->first
                                                 : counts.begin()->first;
        auto pos = static_cast<std::size_t>(
            std::find(states.begin(), states.end(), q) - states.begin());
        return one_hot(q, other, pos, d);
      }
    }
  }
  Pattern p;
  p.kind_ = Kind::kExplicit;
  p.arity_ = d;
  for (State q : states) p.options_.push_back(Option{q, 0});
  return p;
}

std::span<const Option> Pattern::options_at(std::size_t position) const {
  switch (kind_) {
    case Kind::kUniform:
      return {options_.data(), 1};
    case Kind::kOneHot:
      return {options_.data() + (position == special_ ? 0 : 1), 1};
    case Kind::kProduct:
      return options_;
    case Kind::kExplicit:
      break;
  }
  return {options_.data() + position, 1};
}

std::vector<std::vector<State>> Pattern::expand() const {
  std::vector<std::vector<State>> out;
  if (kind_ != Kind::kProduct) {
    std::vector<State> t(arity_);
    for (std::size_t i = 0; i < arity_; ++i) t[i] = options_at(i)[0].state;
    out.push_back(std::move(t));
    return out;
  }
  std::vector<std::size_t> digit(arity_, 0);
  while (true) {
    std::vector<State> t(arity_);
    for (std::size_t i = 0; i < arity_; ++i) t[i] = options_[digit[i]].state;
    out.push_back(std::move(t));
    std::size_t i = 0;
    while (i < arity_ && ++digit[i] == options_.size()) digit[i++] = 0;
    if (i == arity_) break;
  }
  return out;
}

// --- transitions and diversity ----------------------------------------------

std::vector<Pattern> transitions(const Automaton& aut, State q, int label,
                                 std::size_t arity) {
  std::vector<Pattern> out;
  std::set<Pattern> seen;
  auto emit = [&](Pattern p) {
    if (seen.insert(p).second) out.push_back(std::move(p));
  };
  for (std::size_t idx : aut.rules_for(q, label)) {
    const Shape& shape = aut.rules()[idx].shape;
    if (const auto* u = std::get_if<Uniform>(&shape)) {
      emit(Pattern::uniform(u->state, arity));
    } else if (const auto* h = std::get_if<OneHot>(&shape)) {
      if (arity == 0) continue;
      if (h->special == h->fallback) {
        emit(Pattern::uniform(h->special, arity));
        continue;
      }
      for (std::size_t j = 0; j < arity; ++j) {
        emit(Pattern::one_hot(h->special, h->fallback, j, arity));
      }
    } else if (const auto* p = std::get_if<Product>(&shape)) {
      emit(Pattern::product(p->options, arity));
    } else {
      const auto& e = std::get<Explicit>(shape);
      if (e.states.size() == arity) emit(Pattern::explicit_tuple(e.states));
    }
  }
  return out;
}

namespace {

// Size of the union of the cubes S^m. Dominated sets are dropped first, then
// inclusion-exclusion runs over the rest.
std::uint64_t cube_union(std::vector<StateMask> sets, std::size_t m) {
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<StateMask> kept;
  for (StateMask a : sets) {
    bool dominated = false;
    for (StateMask b : sets) dominated = dominated || (a != b && (a & b) == a);
    if (!dominated) kept.push_back(a);
  }
  std::uint64_t largest = 0;
  for (StateMask a : kept) {
    largest = std::max(largest, sat_pow(static_cast<std::uint64_t>(std::popcount(a)), m));
  }
  if (largest == kSaturated || kept.size() <= 1) return largest;
  if (kept.size() > 20) {
    throw Error(ErrorCode::kSizeGuard, "too many distinct PRODUCT option sets to count tuples");
  }
  // Every term is at most `largest` < 2^63 and there are < 2^20 of them.
  __int128 total = 0;
  for (std::uint32_t subset = 1; subset < (1u << kept.size()); ++subset) {
    StateMask common = ~StateMask{0};
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if ((subset >> i) & 1u) common &= kept[i];
    }
    const auto term = static_cast<__int128>(sat_pow(static_cast<std::uint64_t>(std::popcount(common)), m));
    total += std::popcount(subset) % 2 ? term : -term;
  }
  return total >= static_cast<__int128>(kSaturated) ? kSaturated : static_cast<std::uint64_t>(total);
}

bool covered(StateMask states, const std::vector<StateMask>& cubes) {
  return std::any_of(cubes.begin(), cubes.end(), [&](StateMask c) { return (states & c) == states; });
}

StateMask tuple_mask(const Pattern& p) {
  StateMask m = 0;
  for (std::size_t i = 0; i < p.arity(); ++i) {
    for (const auto& o : p.options_at(i)) m |= bit(o.state);
  }
  return m;
}

// Number of distinct tuples at exactly arity m across all rules. With
// product_as_one every PRODUCT option set counts once and concrete tuples are
// not matched against it.
std::uint64_t count_at_arity(const Automaton& aut, std::size_t m, bool product_as_one) {
  std::set<std::vector<Option>> products;
  std::vector<StateMask> cubes;
  auto finish = [&](std::uint64_t concrete_total, std::uint64_t uncovered_total) {
    if (product_as_one) return sat_add(concrete_total, products.size());
    return sat_add(uncovered_total, cube_union(cubes, m));
  };
  auto add_product = [&](const Pattern& p) {
    if (products.insert(p.options()).second) cubes.push_back(option_mask(p.options()));
  };
  if (m <= 2) {
    std::set<Pattern> concrete;
    for (State q = 0; q < aut.state_count(); ++q) {
      for (int label = 0; label < 2; ++label) {
        for (auto& p : transitions(aut, q, label, m)) {
          if (p.kind() == Pattern::Kind::kProduct) {
            add_product(p);
          } else {
            concrete.insert(std::move(p));
          }
        }
      }
    }
    std::uint64_t uncovered = 0;
    for (const auto& p : concrete) uncovered += covered(tuple_mask(p), cubes) ? 0 : 1;
    return finish(concrete.size(), uncovered);
  }
  // m >= 3: uniform tuples and one-hot tuples from distinct (a, b) pairs are
  // all distinct, so they can be counted without materialising m tuples each.
  std::set<State> uniform;
  std::set<std::pair<State, State>> pairs;
  std::vector<Pattern> others;
  for (const auto& r : aut.rules()) {
    if (const auto* u = std::get_if<Uniform>(&r.shape)) {
      uniform.insert(u->state);
    } else if (const auto* h = std::get_if<OneHot>(&r.shape)) {
      if (h->special == h->fallback) {
        uniform.insert(h->special);
      } else {
        pairs.insert({h->special, h->fallback});
      }
    } else if (const auto* p = std::get_if<Product>(&r.shape)) {
      auto pat = Pattern::product(p->options, m);
      if (pat.kind() == Pattern::Kind::kUniform) {
        uniform.insert(pat.options()[0].state);
      } else {
        add_product(pat);
      }
    } else {
      const auto& e = std::get<Explicit>(r.shape);
      if (e.states.size() == m) others.push_back(Pattern::explicit_tuple(e.states));
    }
  }
  std::set<Pattern> extras;
  for (auto& p : others) {
    if (p.kind() == Pattern::Kind::kUniform) {
      uniform.insert(p.options()[0].state);
    } else if (p.kind() == Pattern::Kind::kOneHot &&
               pairs.count({p.options()[0].state, p.options()[1].state})) {
      continue;
    } else {
      extras.insert(std::move(p));
    }
  }
  std::uint64_t concrete = sat_add(uniform.size(), sat_mul(m, pairs.size()));
  concrete = sat_add(concrete, extras.size());
  std::uint64_t uncovered = 0;
  for (State q : uniform) uncovered += covered(bit(q), cubes) ? 0 : 1;
  for (const auto& [a, b] : pairs) uncovered = sat_add(uncovered, covered(bit(a) | bit(b), cubes) ? 0 : m);
  for (const auto& p : extras) uncovered += covered(tuple_mask(p), cubes) ? 0 : 1;
  return finish(concrete, uncovered);
}

std::uint64_t max_over_arities(const Automaton& aut, std::size_t n, bool product_as_one) {
  std::set<std::size_t> arities;
  for (std::size_t m = 0; m <= std::min<std::size_t>(n, 3); ++m) arities.insert(m);
  for (const auto& r : aut.rules()) {
    if (const auto* e = std::get_if<Explicit>(&r.shape)) {
      if (e->states.size() <= n) arities.insert(e->states.size());
    }
  }
  arities.insert(n);
  std::uint64_t best = 0;
  for (std::size_t m : arities) best = std::max(best, count_at_arity(aut, m, product_as_one));
  return best;
}

// Whether the concrete pattern c is produced by (q, label) at its arity.
bool generates(const Automaton& aut, State q, int label, const Pattern& c) {
  for (const auto& p : transitions(aut, q, label, c.arity())) {
    if (p == c) return true;
    if (p.kind() != Pattern::Kind::kProduct) continue;
    bool covered = true;
    for (std::size_t i = 0; i < c.arity() && covered; ++i) {
      const Option o = c.options_at(i)[0];
      covered = std::binary_search(p.options().begin(), p.options().end(), o);
    }
    if (covered) return true;
  }
  return false;
}

std::optional<Pattern> prefix_of(const Pattern& p) {
  const std::size_t d = p.arity();
  switch (p.kind()) {
    case Pattern::Kind::kProduct:
      return std::nullopt;  // products are closed under prefixes
    case Pattern::Kind::kUniform:
      return Pattern::uniform(p.options()[0].state, d - 1);
    case Pattern::Kind::kOneHot:
      if (p.special_position() == d - 1) {
        return Pattern::uniform(p.options()[1].state, d - 1);
      }
      return Pattern::one_hot(p.options()[0].state, p.options()[1].state,
                              p.special_position(), d - 1);
    case Pattern::Kind::kExplicit:
      break;
  }
  std::vector<State> t;
  for (std::size_t i = 0; i + 1 < d; ++i) t.push_back(p.options()[i].state);
  return Pattern::explicit_tuple(std::move(t));
}

std::size_t closure_check_limit(const Automaton& aut, std::size_t n) {
  std::size_t longest = 0;
  for (const auto& r : aut.rules()) {
    if (const auto* e = std::get_if<Explicit>(&r.shape)) {
      longest = std::max(longest, e->states.size());
    }
  }
  // Beyond the longest explicit rule every template behaves the same at all
  // arities >= 3.
  return std::min(n, std::max<std::size_t>(4, longest + 2));
}

}  // namespace

std::uint64_t diversity(const Automaton& aut, std::size_t n) {
  return max_over_arities(aut, n, false);
}

std::uint64_t chain_diversity(const Automaton& aut, std::size_t n) {
  return max_over_arities(aut, n, true);
}

bool is_prefix_closed(const Automaton& aut, std::size_t n) {
  const std::size_t limit = closure_check_limit(aut, n);
  for (std::size_t d = 1; d <= limit; ++d) {
    for (State q = 0; q < aut.state_count(); ++q) {
      for (int label = 0; label < 2; ++label) {
        for (const auto& p : transitions(aut, q, label, d)) {
          auto prefix = prefix_of(p);
          if (prefix && !generates(aut, q, label, *prefix)) return false;
        }
      }
    }
  }
  return true;
}

Automaton prefix_closure(const Automaton& aut) {
  std::vector<Rule> rules = aut.rules();
  auto has_rule = [&](const Rule& r) {
    return std::find(rules.begin(), rules.end(), r) != rules.end();
  };
  const std::size_t original = rules.size();
  for (std::size_t i = 0; i < original; ++i) {
    const Rule r = rules[i];
    if (const auto* h = std::get_if<OneHot>(&r.shape)) {
      // The prefix of (b, ..., b, a) is (b, ..., b).
      Rule u{r.source, r.label, Uniform{h->fallback}};
      bool covered = has_rule(u);
      for (const auto& other : rules) {
        if (other.source != r.source || other.label != r.label) continue;
        if (const auto* p = std::get_if<Product>(&other.shape)) {
          covered = covered || std::binary_search(p->options.begin(), p->options.end(),
                                                  Option{h->fallback, 0});
        }
      }
      if (!covered) rules.push_back(u);
    } else if (const auto* e = std::get_if<Explicit>(&r.shape)) {
      for (std::size_t k = 0; k < e->states.size(); ++k) {
        std::vector<State> pre(e->states.begin(), e->states.begin() + static_cast<long>(k));
        Automaton current(aut.names(), aut.initial(), rules);
        if (generates(current, r.source, r.label, Pattern::explicit_tuple(pre))) continue;
        rules.push_back(Rule{r.source, r.label, Explicit{std::move(pre)}});
      }
    }
  }
  Automaton closed(aut.names(), aut.initial(), std::move(rules));
  if (!is_prefix_closed(closed, closure_check_limit(closed, 64))) {
    throw Error(ErrorCode::kContractViolation, "prefix closure did not converge");
  }
  return closed;
}

StateMask inert_states(const Automaton& aut) {
  const std::size_t count = aut.state_count();
  StateMask inert = count == 64 ? ~StateMask{0} : (StateMask{1} << count) - 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (State q = 0; q < count; ++q) {
      if (!(inert & bit(q))) continue;
      bool ok = aut.rules_for(q, 1).empty();
      bool all_arities = false;
      bool positive_arities = false;
      bool empty_tuple = false;
      for (std::size_t idx : aut.rules_for(q, 0)) {
        const Shape& shape = aut.rules()[idx].shape;
        for_each_state_in_shape(shape, [&](State s, int inc) {
          if (inc != 0 || !(inert & bit(s))) ok = false;
        });
        if (std::holds_alternative<Uniform>(shape) || std::holds_alternative<Product>(shape)) {
          all_arities = true;
        } else if (std::holds_alternative<OneHot>(shape)) {
          positive_arities = true;
        } else if (std::get<Explicit>(shape).states.empty()) {
          empty_tuple = true;
        }
      }
      ok = ok && (all_arities || (positive_arities && empty_tuple));
      if (!ok) {
        inert &= ~bit(q);
        changed = true;
      }
    }
  }
  return inert;
}

// --- acceptance ---------------------------------------------------------------

bool rule_fits(const Automaton& aut, State q, int label,
               std::span<const StateMask> child_good) {
  const std::size_t d = child_good.size();
  for (std::size_t idx : aut.rules_for(q, label)) {
    const Shape& shape = aut.rules()[idx].shape;
    bool fits = false;
    if (const auto* u = std::get_if<Uniform>(&shape)) {
      fits = std::all_of(child_good.begin(), child_good.end(),
                         [&](StateMask m) { return m & bit(u->state); });
    } else if (const auto* h = std::get_if<OneHot>(&shape)) {
      if (d == 0) continue;
      std::size_t missing = 0;
      std::size_t where = 0;
      for (std::size_t i = 0; i < d; ++i) {
        if (!(child_good[i] & bit(h->fallback))) {
          ++missing;
          where = i;
        }
      }
      if (missing == 0) {
        fits = std::any_of(child_good.begin(), child_good.end(),
                           [&](StateMask m) { return m & bit(h->special); });
      } else if (missing == 1) {
        fits = (child_good[where] & bit(h->special)) != 0;
      }
    } else if (const auto* p = std::get_if<Product>(&shape)) {
      const StateMask allowed = option_mask(p->options);
      fits = std::all_of(child_good.begin(), child_good.end(),
                         [&](StateMask m) { return (m & allowed) != 0; });
    } else {
      const auto& e = std::get<Explicit>(shape);
      fits = e.states.size() == d;
      for (std::size_t i = 0; i < d && fits; ++i) fits = (child_good[i] & bit(e.states[i])) != 0;
    }
    if (fits) return true;
  }
  return false;
}

std::vector<StateMask> good_states(const Automaton& aut, const Instance& instance,
                                   std::span<const std::uint8_t> labels, Vertex hole) {
  const std::size_t n = instance.size();
  if (labels.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "label vector length differs from n");
  }
  const std::size_t count = aut.state_count();
  const StateMask all = count == 64 ? ~StateMask{0} : (StateMask{1} << count) - 1;
  std::vector<StateMask> good(n, 0);
  std::vector<StateMask> scratch;
  for (std::size_t v = n; v-- > 0;) {
    if (static_cast<Vertex>(v) == hole) {
      good[v] = all;
      continue;
    }
    scratch.clear();
    for (Vertex c : instance.children(static_cast<Vertex>(v))) {
      scratch.push_back(good[static_cast<std::size_t>(c)]);
    }
    StateMask m = 0;
    for (State q = 0; q < count; ++q) {
      if (rule_fits(aut, q, labels[v] ? 1 : 0, scratch)) m |= bit(q);
    }
    good[v] = m;
  }
  return good;
}

bool accepts(const Automaton& aut, const Instance& instance,
             std::span<const std::uint8_t> labels) {
  auto good = good_states(aut, instance, labels);
  return (good[0] & aut.initial_mask()) != 0;
}

// --- built-ins ----------------------------------------------------------------

std::vector<std::string> builtin_names() {
  return {"independent-set", "precedence", "connectivity", "connectivity-closed"};
}

Automaton builtin(std::string_view name) {
  constexpr State s = 0, x = 1, o = 1, cx = 2;
  if (name == "independent-set") {
    return Automaton({"s", "x"}, {s, x},
                     {{s, 0, Uniform{s}}, {s, 1, Uniform{x}}, {x, 0, Uniform{s}}});
  }
  if (name == "precedence") {
    return Automaton({"s", "x"}, {s, x},
                     {{s, 0, Uniform{x}}, {s, 1, Uniform{s}}, {x, 0, Uniform{x}}});
  }
  if (name == "connectivity" || name == "connectivity-closed") {
    Automaton strict({"s", "o", "x"}, {s},
                     {{s, 0, OneHot{s, cx}},
                      {s, 1, Uniform{o}},
                      {o, 0, Uniform{cx}},
                      {o, 1, Uniform{o}},
                      {cx, 0, Uniform{cx}}});
    return name == "connectivity" ? strict : prefix_closure(strict);
  }
  throw Error(ErrorCode::kUnknownConstraint, "unknown constraint '" + std::string(name) + "'");
}

// --- text format ----------------------------------------------------------------

Automaton parse_automaton(std::string_view text) {
  using text::Line;
  auto lines = text::tokenize(text);
  std::vector<std::string> names;
  std::vector<State> initial;
  std::vector<Rule> rules;
  bool have_states = false;
  bool have_init = false;

  auto lookup = [&](const text::Token& tok, std::size_t line) -> State {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == tok.text) return static_cast<State>(i);
    }
    throw Error(ErrorCode::kUnknownState, "unknown state '" + std::string(tok.text) + "'",
                line, tok.column);
  };

  for (const Line& line : lines) {
    const auto& toks = line.tokens;
    const std::string_view key = toks[0].text;
    if (key == "states") {
      if (have_states) throw Error(ErrorCode::kParse, "repeated 'states' line", line.number, 1);
      if (toks.size() < 2) {
        throw Error(ErrorCode::kParse, "'states' needs at least one name", line.number,
                    line.end_column);
      }
      for (std::size_t i = 1; i < toks.size(); ++i) {
        std::string name(toks[i].text);
        if (std::find(names.begin(), names.end(), name) != names.end()) {
          throw Error(ErrorCode::kParse, "state '" + name + "' declared twice", line.number,
                      toks[i].column);
        }
        names.push_back(std::move(name));
      }
      have_states = true;
    } else if (key == "init") {
      if (!have_states) throw Error(ErrorCode::kParse, "'init' before 'states'", line.number, 1);
      if (have_init) throw Error(ErrorCode::kParse, "repeated 'init' line", line.number, 1);
      if (toks.size() < 2) {
        throw Error(ErrorCode::kParse, "'init' needs at least one state", line.number,
                    line.end_column);
      }
      for (std::size_t i = 1; i < toks.size(); ++i) initial.push_back(lookup(toks[i], line.number));
      have_init = true;
    } else if (key == "rule") {
      if (!have_states) throw Error(ErrorCode::kParse, "'rule' before 'states'", line.number, 1);
      if (toks.size() < 4) {
        throw Error(ErrorCode::kParse, "rule needs: rule <state> <0|1> <shape> ...",
                    line.number, line.end_column);
      }
      Rule r;
      r.source = lookup(toks[1], line.number);
      if (toks[2].text == "0") {
        r.label = 0;
      } else if (toks[2].text == "1") {
        r.label = 1;
      } else {
        throw Error(ErrorCode::kParse, "label must be 0 or 1", line.number, toks[2].column);
      }
      const std::string_view shape = toks[3].text;
      const std::size_t argc = toks.size() - 4;
      auto arity_error = [&](const char* what) {
        return Error(ErrorCode::kParse, std::string(shape) + " expects " + what, line.number,
                     toks.size() > 4 ? toks[4].column : line.end_column);
      };
      if (shape == "uniform") {
        if (argc != 1) throw arity_error("exactly one state");
        r.shape = Uniform{lookup(toks[4], line.number)};
      } else if (shape == "onehot") {
        if (argc != 2) throw arity_error("exactly two states");
        r.shape = OneHot{lookup(toks[4], line.number), lookup(toks[5], line.number)};
      } else if (shape == "product") {
        if (argc == 0) throw arity_error("at least one option");
        Product p;
        for (std::size_t i = 4; i < toks.size(); ++i) {
          std::string_view opt = toks[i].text;
          int inc = 0;
          if (auto colon = opt.find(':'); colon != std::string_view::npos) {
            std::string_view suffix = opt.substr(colon + 1);
            if (suffix == "0") {
              inc = 0;
            } else if (suffix == "1") {
              inc = 1;
            } else {
              throw Error(ErrorCode::kParse, "increment must be 0 or 1", line.number,
                          toks[i].column + colon + 1);
            }
            opt = opt.substr(0, colon);
          }
          p.options.push_back(Option{lookup({opt, toks[i].column}, line.number), inc});
        }
        r.shape = std::move(p);
      } else if (shape == "explicit") {
        Explicit e;
        for (std::size_t i = 4; i < toks.size(); ++i) e.states.push_back(lookup(toks[i], line.number));
        r.shape = std::move(e);
      } else {
        throw Error(ErrorCode::kBadShape, "unknown shape '" + std::string(shape) + "'",
                    line.number, toks[3].column);
      }
      if (auto* p = std::get_if<Product>(&r.shape)) {
        std::sort(p->options.begin(), p->options.end());
        p->options.erase(std::unique(p->options.begin(), p->options.end()), p->options.end());
      }
      if (std::find(rules.begin(), rules.end(), r) != rules.end()) {
        throw Error(ErrorCode::kDuplicateRule, "duplicate rule line", line.number, 1);
      }
      rules.push_back(std::move(r));
    } else {
      throw Error(ErrorCode::kParse, "unknown keyword '" + std::string(key) + "'", line.number,
                  toks[0].column);
    }
  }
  if (!have_states) throw Error(ErrorCode::kParse, "missing 'states' line", 1, 1);
  if (!have_init) throw Error(ErrorCode::kParse, "missing 'init' line", 1, 1);
  return Automaton(std::move(names), std::move(initial), std::move(rules));
}

std::string serialize_automaton(const Automaton& aut) {
  std::ostringstream os;
  os << "states";
  for (const auto& n : aut.names()) os << ' ' << n;
  os << "\ninit";
  for (State q : aut.initial()) os << ' ' << aut.name(q);
  os << '\n';
  for (const auto& r : aut.rules()) {
    os << "rule " << aut.name(r.source) << ' ' << r.label << ' ';
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Uniform>) {
            os << "uniform " << aut.name(s.state);
          } else if constexpr (std::is_same_v<S, OneHot>) {
            os << "onehot " << aut.name(s.special) << ' ' << aut.name(s.fallback);
          } else if constexpr (std::is_same_v<S, Product>) {
            os << "product";
            for (const auto& o : s.options) {
              os << ' ' << aut.name(o.state);
              if (o.increment != 0) os << ':' << o.increment;
            }
          } else {
            os << "explicit";
            for (State q : s.states) os << ' ' << aut.name(q);
          }
        },
        r.shape);
    os << '\n';
  }
  return os.str();
}

}  // namespace treeknap
