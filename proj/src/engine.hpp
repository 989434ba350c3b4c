#pragma once

// Internal machinery shared by the solvers, the subtree problems and the
// component-count lift. Templated over the tableau type (ProfitArray or
// KTable).

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treeknap/automaton.hpp"
#include "treeknap/profit_array.hpp"
#include "treeknap/solvers.hpp"
#include "treeknap/tree.hpp"

namespace treeknap::detail {

inline ProfitArray identity_like(const ProfitArray& a) {
  return ProfitArray::identity(a.capacity());
}
inline KTable identity_like(const KTable& a) { return KTable::identity(a.k(), a.capacity()); }

inline void min_into(ProfitArray& dst, const ProfitArray& src) {
  auto d = dst.raw_values();
  auto s = src.raw_values();
  for (std::size_t c = 0; c < d.size(); ++c) d[c] = std::min(d[c], s[c]);
}
inline void min_into(KTable& dst, const KTable& src) {
  for (std::size_t l = 0; l < dst.row_count(); ++l) min_into(dst.row(l), src.row(l));
}

inline bool all_bottom(const ProfitArray& a) { return a.all_bottom(); }
inline bool all_bottom(const KTable& t) {
  for (std::size_t l = 0; l < t.row_count(); ++l) {
    if (!t.row(l).all_bottom()) return false;
  }
  return true;
}

// Distinct patterns at one arity and which (state, label) sources use them.
struct Plan {
  std::vector<Pattern> patterns;
  // users[i]: non-inert sources of pattern i; all_users[i]: every source.
  std::vector<std::vector<std::pair<State, int>>> users;
  std::vector<std::vector<std::pair<State, int>>> all_users;
  // by_source[2q + label]: pattern indices in transition order.
  std::vector<std::vector<std::uint32_t>> by_source;
  std::vector<std::uint32_t> active;  // patterns with non-inert users
};

class PlanCache {
 public:
  explicit PlanCache(const Automaton& aut) : aut_(aut), inert_(inert_states(aut)) {}

  const Plan& at(std::size_t degree) {
    auto it = plans_.find(degree);
    if (it == plans_.end()) it = plans_.emplace(degree, build(degree)).first;
    return it->second;
  }

  const Automaton& automaton() const noexcept { return aut_; }
  StateMask inert() const noexcept { return inert_; }
  bool is_inert(State q) const noexcept { return (inert_ >> q) & 1u; }
  bool passes_through(std::span<const Option> options) const noexcept {
    return std::all_of(options.begin(), options.end(), [&](const Option& o) {
      return o.increment == 0 && is_inert(o.state);
    });
  }

 private:
  Plan build(std::size_t degree) const {
    Plan plan;
    const std::size_t count = aut_.state_count();
    plan.by_source.resize(2 * count);
    std::map<Pattern, std::uint32_t> index;
    for (State q = 0; q < count; ++q) {
      for (int label = 0; label < 2; ++label) {
        for (auto& p : transitions(aut_, q, label, degree)) {
          auto [it, fresh] = index.emplace(p, static_cast<std::uint32_t>(plan.patterns.size()));
          if (fresh) {
            plan.patterns.push_back(std::move(p));
            plan.users.emplace_back();
            plan.all_users.emplace_back();
          }
          const std::uint32_t i = it->second;
          plan.all_users[i].emplace_back(q, label);
          if (!is_inert(q)) plan.users[i].emplace_back(q, label);
          plan.by_source[2 * q + static_cast<std::size_t>(label)].push_back(i);
        }
      }
    }
    for (std::uint32_t i = 0; i < plan.patterns.size(); ++i) {
      if (!plan.users[i].empty()) plan.active.push_back(i);
    }
    return plan;
  }

  const Automaton& aut_;
  StateMask inert_;
  std::unordered_map<std::size_t, Plan> plans_;
};

inline constexpr std::size_t kNoPosition = static_cast<std::size_t>(-1);

// Position of the heavy child inside children(u), kNoPosition for leaves.
inline std::vector<std::size_t> heavy_positions(const Instance& instance,
                                                const HldDecoration& hld) {
  std::vector<std::size_t> pos(instance.size(), kNoPosition);
  for (std::size_t u = 0; u < instance.size(); ++u) {
    const Vertex h = hld.heavy_child[u];
    if (h == kNoVertex) continue;
    auto kids = instance.children(static_cast<Vertex>(u));
    pos[u] = static_cast<std::size_t>(std::lower_bound(kids.begin(), kids.end(), h) -
                                      kids.begin());
  }
  return pos;
}

// Heavy-light recursive evaluation. run(head, x) returns y_{head,q,x} for
// every state q; heads are vertices that start a heavy path.
template <class T>
class Engine {
 public:
  using Visitor = std::function<void(Vertex, const std::vector<T>&)>;

  Engine(const Instance& instance, const HldDecoration& hld, PlanCache& plans,
         CallStats& stats, bool inject_fault = false)
      : inst_(instance),
        hld_(hld),
        plans_(plans),
        stats_(stats),
        heavy_pos_(heavy_positions(instance, hld)),
        fault_(inject_fault) {}

  std::vector<T> run(Vertex head, const T& x) { return walk(head, x, nullptr); }

  // Walks the whole heavy path and reports every path vertex's arrays. The
  // input is the same for all of them, so with x = identity these are the
  // subtree solutions.
  std::vector<T> run_capture(Vertex head, const T& x, const Visitor& visit) {
    return walk(head, x, &visit);
  }

  T combine(const std::vector<T>& results, std::span<const Option> options) {
    T out = shift_count(results[options[0].state], options[0].increment);
    for (std::size_t i = 1; i < options.size(); ++i) {
      max_into(out, shift_count(results[options[i].state], options[i].increment));
      ++stats_.maxima;
    }
    return out;
  }

  // acc <- combine(run(child, acc), options), skipped when every option is an
  // inert state with no increment.
  void thread(Vertex child, std::span<const Option> options, T& acc) {
    if (plans_.passes_through(options)) return;
    acc = combine(walk(child, acc, nullptr), options);
  }

  std::size_t heavy_position(Vertex u) const { return heavy_pos_[static_cast<std::size_t>(u)]; }
  const Plan& plan(Vertex u) { return plans_.at(inst_.degree(u)); }
  PlanCache& plans() noexcept { return plans_; }
  CallStats& stats() noexcept { return stats_; }

  void merge(T& dst, const T& src, bool first) {
    if (first) {
      dst = src;
      return;
    }
    ++stats_.maxima;
    if (fault_) {
      min_into(dst, src);
    } else {
      max_into(dst, src);
    }
  }

 private:
  bool needs_heavy(Vertex u) {
    const std::size_t jh = heavy_position(u);
    if (jh == kNoPosition) return false;
    const Plan& pl = plan(u);
    for (std::uint32_t i : pl.active) {
      if (!plans_.passes_through(pl.patterns[i].options_at(jh))) return true;
    }
    return false;
  }

  std::vector<T> walk(Vertex head, const T& x, const Visitor* visit) {
    std::vector<Vertex> path;
    for (Vertex u = head;;) {
      path.push_back(u);
      const Vertex h = hld_.heavy_child[static_cast<std::size_t>(u)];
      if (h == kNoVertex || (visit == nullptr && !needs_heavy(u))) break;
      u = h;
    }
    std::vector<T> result;
    for (std::size_t i = path.size(); i-- > 0;) {
      auto next = evaluate(path[i], x, i + 1 < path.size() ? &result : nullptr);
      if (visit) (*visit)(path[i], next);
      result = std::move(next);
    }
    return result;
  }

  T chain(Vertex u, const Pattern& p, const T& x, const std::vector<T>* heavy) {
    ++stats_.chains;
    auto kids = inst_.children(u);
    const std::size_t jh = heavy_position(u);
    T acc = (jh != kNoPosition && heavy != nullptr) ? combine(*heavy, p.options_at(jh)) : x;
    auto visit_position = [&](std::size_t j) {
      if (j != jh) thread(kids[j], p.options_at(j), acc);
    };
    if (p.kind() == Pattern::Kind::kOneHot &&
        plans_.passes_through({&p.fallback(), 1})) {
      visit_position(p.special_position());
    } else if (p.kind() == Pattern::Kind::kUniform &&
               plans_.passes_through(p.options_at(0))) {
      // every child passes the array through unchanged
    } else {
      for (std::size_t j = 0; j < kids.size(); ++j) visit_position(j);
    }
    return acc;
  }

  std::vector<T> evaluate(Vertex u, const T& x, const std::vector<T>* heavy) {
    ++stats_.invocations_per_vertex[static_cast<std::size_t>(u)];
    const Plan& pl = plan(u);
    const std::size_t count = plans_.automaton().state_count();
    std::vector<T> y;
    y.reserve(count);
    std::vector<char> seen(count, 0);
    for (State q = 0; q < count; ++q) {
      if (plans_.is_inert(q)) {
        y.push_back(x);
        seen[q] = 1;
      } else {
        y.push_back(bottom_like(x));
      }
    }
    for (std::uint32_t i : pl.active) {
      const T z = chain(u, pl.patterns[i], x, heavy);
      std::optional<T> shifted;
      for (auto [q, label] : pl.users[i]) {
        if (label == 1) {
          if (!shifted) {
            shifted = shift_add(z, 1, inst_.weight(u), inst_.profit(u));
            ++stats_.shift_adds;
          }
          merge(y[q], *shifted, !seen[q]);
        } else {
          merge(y[q], z, !seen[q]);
        }
        seen[q] = 1;
      }
    }
    return y;
  }

  const Instance& inst_;
  const HldDecoration& hld_;
  PlanCache& plans_;
  CallStats& stats_;
  std::vector<std::size_t> heavy_pos_;
  bool fault_;
};

// Bottom-up convolution DP over any tableau type. Returns X[v][q] for every
// vertex when keep_all is set, otherwise only X[0] is guaranteed populated.
template <class T>
std::vector<std::vector<T>> baseline_tables(const Instance& instance, PlanCache& plans,
                                            const T& identity, CallStats& stats,
                                            bool keep_all) {
  const std::size_t n = instance.size();
  const std::size_t count = plans.automaton().state_count();
  std::vector<std::vector<T>> X(n);
  for (std::size_t v = n; v-- > 0;) {
    const auto u = static_cast<Vertex>(v);
    ++stats.invocations_per_vertex[v];
    auto kids = instance.children(u);
    const Plan& pl = plans.at(kids.size());
    std::vector<T> y(count, bottom_like(identity));
    std::vector<char> seen(count, 0);
    for (std::size_t i = 0; i < pl.patterns.size(); ++i) {
      const Pattern& p = pl.patterns[i];
      ++stats.chains;
      auto effective = [&](std::size_t j) {
        auto options = p.options_at(j);
        const auto& child = X[static_cast<std::size_t>(kids[j])];
        T out = shift_count(child[options[0].state], options[0].increment);
        for (std::size_t o = 1; o < options.size(); ++o) {
          max_into(out, shift_count(child[options[o].state], options[o].increment));
          ++stats.maxima;
        }
        return out;
      };
      T z = kids.empty() ? identity : effective(0);
      for (std::size_t j = 1; j < kids.size(); ++j) {
        z = convolve(z, effective(j));
        ++stats.convolutions;
      }
      std::optional<T> shifted;
      for (auto [q, label] : pl.all_users[i]) {
        const T* src = &z;
        if (label == 1) {
          if (!shifted) {
            shifted = shift_add(z, 1, instance.weight(u), instance.profit(u));
            ++stats.shift_adds;
          }
          src = &*shifted;
        }
        if (seen[q]) {
          max_into(y[q], *src);
          ++stats.maxima;
        } else {
          y[q] = *src;
          seen[q] = 1;
        }
      }
    }
    X[v] = std::move(y);
    if (!keep_all) {
      for (Vertex c : kids) {
        X[static_cast<std::size_t>(c)].clear();
        X[static_cast<std::size_t>(c)].shrink_to_fit();
      }
    }
  }
  return X;
}

// Runs fn on a thread with a large stack and rethrows its exception.
void run_with_large_stack(const std::function<void()>& fn);

}  // namespace treeknap::detail
