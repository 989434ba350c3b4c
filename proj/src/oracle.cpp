#include "treeknap/oracle.hpp"

#include <algorithm>
#include <random>

#include "treeknap/error.hpp"

namespace treeknap {
namespace {

void guard(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kSizeGuard, what);
}

struct Totals {
  Weight weight = 0;
  Profit profit = 0;
};

Totals totals(const Instance& instance, const LabelVector& labels) {
  Totals t;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (!labels[v]) continue;
    t.weight += instance.weight(static_cast<Vertex>(v));
    t.profit += instance.profit(static_cast<Vertex>(v));
  }
  return t;
}

void raise(ProfitArray& a, Weight c, Profit p) {
  if (a.raw(c) < p) a.set(c, p);
}

bool is_ancestor(const Instance& instance, Vertex a, Vertex v) {
  for (; v != kNoVertex; v = instance.parent(v)) {
    if (v == a) return true;
  }
  return false;
}

}  // namespace

OracleResult brute_force(const Instance& instance, const Automaton& aut) {
  const std::size_t n = instance.size();
  guard(n <= kOracleMaxVertices, "brute force is limited to 25 vertices");
  const Weight cap = instance.capacity();
  OracleResult r;
  r.state_arrays.assign(aut.state_count(), ProfitArray(cap));
  r.combined = ProfitArray(cap);
  std::optional<std::uint64_t> best_mask;
  Totals best;
  LabelVector labels(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t v = 0; v < n; ++v) labels[v] = (mask >> v) & 1u;
    const Totals t = totals(instance, labels);
    if (t.weight > cap) continue;
    const StateMask good = good_states(aut, instance, labels)[0];
    for (State q = 0; q < aut.state_count(); ++q) {
      if ((good >> q) & 1u) raise(r.state_arrays[q], t.weight, t.profit);
    }
    if (!(good & aut.initial_mask())) continue;
    raise(r.combined, t.weight, t.profit);
    if (!best_mask || t.profit > best.profit ||
        (t.profit == best.profit && t.weight < best.weight)) {
      best_mask = mask;
      best = t;
    }
  }
  if (best_mask) {
    r.optimum = BestValue{best.profit, best.weight};
    for (std::size_t v = 0; v < n; ++v) {
      if ((*best_mask >> v) & 1u) r.witness.push_back(static_cast<Vertex>(v));
    }
  }
  return r;
}

KSubtreeOracle brute_force_ksubtree(const Instance& instance, const Automaton& aut,
                                    std::size_t k) {
  const std::size_t n = instance.size();
  guard(n <= kKSubtreeOracleMaxVertices, "k-subtree brute force is limited to 12 vertices");
  guard(k <= kKSubtreeOracleMaxK, "k-subtree brute force is limited to k <= 4");
  const Weight cap = instance.capacity();

  // Per root v: best accepted selection inside the full T_v, by exact weight.
  std::vector<ProfitArray> rooted;
  for (std::size_t v = 0; v < n; ++v) {
    auto sub = extract_subtree(instance, static_cast<Vertex>(v));
    rooted.push_back(brute_force(sub.instance, aut).combined);
  }

  KSubtreeOracle out;
  out.best.assign(k + 1, std::nullopt);
  out.roots.assign(k + 1, {});
  out.best[0] = 0;
  std::vector<Vertex> chosen;
  // Depth-first over antichains with increasing vertex indices.
  auto visit = [&](auto&& self, std::size_t next, const ProfitArray& acc) -> void {
    if (!chosen.empty()) {
      if (auto b = best_value(acc)) {
        auto& slot = out.best[chosen.size()];
        if (!slot || b->value > *slot) {
          slot = b->value;
          out.roots[chosen.size()] = chosen;
        }
      }
    }
    if (chosen.size() == k) return;
    for (std::size_t v = next; v < n; ++v) {
      const auto cand = static_cast<Vertex>(v);
      bool free = std::none_of(chosen.begin(), chosen.end(), [&](Vertex c) {
        return is_ancestor(instance, c, cand) || is_ancestor(instance, cand, c);
      });
      if (!free) continue;
      chosen.push_back(cand);
      // Exhaustive weight split between the roots chosen so far and v.
      ProfitArray merged(cap);
      for (Weight a = 0; a <= cap; ++a) {
        if (acc.is_bottom(a)) continue;
        for (Weight b = 0; a + b <= cap; ++b) {
          if (rooted[v].is_bottom(b)) continue;
          raise(merged, a + b, acc.raw(a) + rooted[v].raw(b));
        }
      }
      self(self, v + 1, merged);
      chosen.pop_back();
    }
  };
  visit(visit, 0, ProfitArray::identity(cap));
  return out;
}

ProfitArray brute_force_complement(const Instance& instance, const Automaton& aut, Vertex u,
                                   State q) {
  const std::size_t n = instance.size();
  guard(n <= kOracleMaxVertices, "brute force is limited to 25 vertices");
  const Weight cap = instance.capacity();
  if (u == 0) return ProfitArray::identity(cap);

  std::vector<char> inside(n, 0);
  for (std::size_t v = static_cast<std::size_t>(u); v < n; ++v) {
    inside[v] = v == static_cast<std::size_t>(u) ||
                (instance.parent(static_cast<Vertex>(v)) != kNoVertex &&
                 inside[static_cast<std::size_t>(instance.parent(static_cast<Vertex>(v)))]);
  }
  std::vector<Vertex> path;  // root .. parent(u)
  for (Vertex v = instance.parent(u); v != kNoVertex; v = instance.parent(v)) path.push_back(v);
  std::reverse(path.begin(), path.end());

  ProfitArray out(cap);
  LabelVector labels(n);
  std::vector<StateMask> masks;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool skip = false;
    for (std::size_t v = 0; v < n; ++v) {
      labels[v] = (mask >> v) & 1u;
      skip = skip || (labels[v] && inside[v]);
    }
    if (skip) continue;
    const Totals t = totals(instance, labels);
    if (t.weight > cap) continue;
    const auto good = good_states(aut, instance, labels, u);
    // States a run can assign along the root path, given the good sets below.
    StateMask reach = good[0] & aut.initial_mask();
    for (std::size_t i = 0; i + 1 < path.size() && reach; ++i) {
      const Vertex w = path[i];
      const Vertex next = path[i + 1];
      auto kids = instance.children(w);
      masks.clear();
      std::size_t pos = 0;
      for (std::size_t j = 0; j < kids.size(); ++j) {
        masks.push_back(good[static_cast<std::size_t>(kids[j])]);
        if (kids[j] == next) pos = j;
      }
      StateMask next_reach = 0;
      for (State s = 0; s < aut.state_count(); ++s) {
        if (!((good[static_cast<std::size_t>(next)] >> s) & 1u)) continue;
        masks[pos] = StateMask{1} << s;
        for (State r = 0; r < aut.state_count(); ++r) {
          if (((reach >> r) & 1u) && rule_fits(aut, r, labels[static_cast<std::size_t>(w)], masks)) {
            next_reach |= StateMask{1} << s;
            break;
          }
        }
      }
      reach = next_reach;
    }
    if ((reach >> q) & 1u) raise(out, t.weight, t.profit);
  }
  return out;
}

std::vector<std::vector<std::int64_t>> enumerate_trees(std::size_t n) {
  guard(n >= 1 && n <= kEnumerateMaxVertices, "tree enumeration needs 1 <= n <= 8");
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> parents(n - 1, 0);
  while (true) {
    out.push_back(parents);
    // Odometer: the last entry varies fastest, entry i ranges over [0, i].
    std::size_t i = parents.size();
    while (i > 0) {
      --i;
      if (parents[i] < static_cast<std::int64_t>(i)) {
        ++parents[i];
        break;
      }
      parents[i] = 0;
      if (i == 0) return out;
    }
    if (parents.empty()) return out;
  }
}

const char* to_string(TreeShape shape) {
  switch (shape) {
    case TreeShape::kPath: return "path";
    case TreeShape::kStar: return "star";
    case TreeShape::kBinary: return "binary";
    case TreeShape::kCaterpillar: return "caterpillar";
    case TreeShape::kRandom: return "random";
  }
  return "unknown";
}

std::optional<TreeShape> parse_shape(std::string_view name) {
  for (auto s : {TreeShape::kPath, TreeShape::kStar, TreeShape::kBinary, TreeShape::kCaterpillar,
                 TreeShape::kRandom}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::vector<std::int64_t> make_parents(TreeShape shape, std::size_t n, std::uint64_t seed) {
  std::vector<std::int64_t> parents;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 1; i < n; ++i) {
    const auto v = static_cast<std::int64_t>(i);
    switch (shape) {
      case TreeShape::kPath: parents.push_back(v - 1); break;
      case TreeShape::kStar: parents.push_back(0); break;
      case TreeShape::kBinary: parents.push_back((v - 1) / 2); break;
      case TreeShape::kCaterpillar: parents.push_back(v % 2 == 0 ? v - 2 : v - 1); break;
      case TreeShape::kRandom:
        parents.push_back(std::uniform_int_distribution<std::int64_t>(0, v - 1)(rng));
        break;
    }
  }
  return parents;
}

Instance generate_instance(TreeShape shape, std::size_t n, std::int64_t max_weight,
                           std::int64_t max_profit, std::int64_t capacity,
                           std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kLengthMismatch, "a tree needs at least one vertex");
  if (max_weight < 0 || max_profit < 0) {
    throw Error(ErrorCode::kNegativeValue, "weight and profit bounds must be nonnegative");
  }
  auto parents = make_parents(shape, n, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::int64_t> wd(0, max_weight);
  std::uniform_int_distribution<std::int64_t> pd(0, max_profit);
  std::vector<std::int64_t> w(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = wd(rng);
    p[i] = pd(rng);
  }
  return build_tree(parents, w, p, capacity);
}

}  // namespace treeknap
