#pragma once

// Fixtures and a reference oracle written independently of the library: runs
// are searched top-down by expanding rule shapes directly, so neither Pattern
// nor good_states is involved.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "treeknap/automaton.hpp"
#include "treeknap/profit_array.hpp"
#include "treeknap/tree.hpp"

namespace treeknap::testing {

inline Instance make(std::vector<std::int64_t> parents, std::vector<std::int64_t> w,
                     std::vector<std::int64_t> p, std::int64_t capacity) {
  return build_tree(parents, w, p, capacity);
}

inline Instance star_f1() { return make({0, 0}, {1, 2, 1}, {2, 4, 3}, 3); }
inline Instance path_f2() { return make({0, 1}, {1, 1, 1}, {2, 3, 4}, 2); }

inline ProfitArray array_of(std::vector<std::optional<Profit>> values) {
  return ProfitArray::from_values(values);
}

// Tuples of child states a rule admits at arity d.
inline std::vector<std::vector<State>> tuples_of(const Shape& shape, std::size_t d) {
  std::vector<std::vector<State>> out;
  if (auto* u = std::get_if<Uniform>(&shape)) {
    out.emplace_back(d, u->state);
  } else if (auto* h = std::get_if<OneHot>(&shape)) {
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<State> t(d, h->fallback);
      t[i] = h->special;
      out.push_back(t);
    }
  } else if (auto* p = std::get_if<Product>(&shape)) {
    out.emplace_back();
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<std::vector<State>> next;
      for (const auto& t : out) {
        for (const auto& o : p->options) {
          auto e = t;
          e.push_back(o.state);
          next.push_back(e);
        }
      }
      out = std::move(next);
    }
  } else {
    const auto& e = std::get<Explicit>(shape);
    if (e.states.size() == d) out.push_back(e.states);
  }
  return out;
}

// Whether some run gives v the state q and accepts the labels below v.
// `hole` is accepted in any state; `forced` (if set) must carry `forced_state`.
struct RunSearch {
  const Automaton& aut;
  const Instance& inst;
  const std::vector<std::uint8_t>& labels;
  Vertex hole = kNoVertex;
  Vertex forced = kNoVertex;
  State forced_state = 0;

  bool ok(Vertex v, State q) const {
    if (v == hole) return true;
    if (v == forced && q != forced_state) return false;
    auto kids = inst.children(v);
    for (const auto& rule : aut.rules()) {
      if (rule.source != q || rule.label != labels[static_cast<std::size_t>(v)]) continue;
      for (const auto& t : tuples_of(rule.shape, kids.size())) {
        bool all = true;
        for (std::size_t i = 0; i < kids.size() && all; ++i) all = ok(kids[i], t[i]);
        if (all) return true;
      }
    }
    return false;
  }
};

inline std::vector<std::uint8_t> labels_of(std::size_t n, std::uint32_t mask) {
  std::vector<std::uint8_t> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = (mask >> i) & 1u;
  return l;
}

// Per-state exact-weight arrays by enumerating all subsets.
inline std::vector<ProfitArray> reference_arrays(const Instance& inst, const Automaton& aut) {
  std::vector<ProfitArray> out(aut.state_count(), ProfitArray(inst.capacity()));
  const std::size_t n = inst.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    auto labels = labels_of(n, mask);
    Weight w = 0;
    Profit p = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i]) {
        w += inst.weight(static_cast<Vertex>(i));
        p += inst.profit(static_cast<Vertex>(i));
      }
    }
    if (w > inst.capacity()) continue;
    RunSearch rs{aut, inst, labels};
    for (State q = 0; q < aut.state_count(); ++q) {
      if (!rs.ok(0, q)) continue;
      auto cur = out[q].at(w);
      if (!cur || *cur < p) out[q].set(w, p);
    }
  }
  return out;
}

inline std::optional<Profit> best_of(const ProfitArray& a) {
  std::optional<Profit> best;
  for (Weight c = 0; c <= a.capacity(); ++c) {
    if (auto v = a.at(c); v && (!best || *v > *best)) best = v;
  }
  return best;
}

inline std::optional<Profit> reference_optimum(const Instance& inst, const Automaton& aut) {
  auto arrays = reference_arrays(inst, aut);
  std::optional<Profit> best;
  for (State q : aut.initial()) {
    if (auto v = best_of(arrays[q]); v && (!best || *v > *best)) best = v;
  }
  return best;
}

// Random recursive tree with small values.
inline Instance random_instance(std::mt19937_64& rng, std::size_t n, std::int64_t max_w,
                                std::int64_t max_p, std::int64_t capacity) {
  std::vector<std::int64_t> parents, w(n), p(n);
  for (std::size_t v = 1; v < n; ++v) {
    parents.push_back(std::uniform_int_distribution<std::int64_t>(
        0, static_cast<std::int64_t>(v) - 1)(rng));
  }
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::uniform_int_distribution<std::int64_t>(0, max_w)(rng);
    p[i] = std::uniform_int_distribution<std::int64_t>(0, max_p)(rng);
  }
  return build_tree(parents, w, p, capacity);
}

}  // namespace treeknap::testing
