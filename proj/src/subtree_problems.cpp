#include "treeknap/subtree_problems.hpp"

#include "engine.hpp"
#include "treeknap/error.hpp"

namespace treeknap {
namespace {

using Row = std::vector<ProfitArray>;

// Complement arrays along heavy paths.
//
// Notation for a heavy path u_0 .. u_m (u_0 its head, u_m a leaf): a Row
// indexed by the state of some path vertex holds the best arrays over
// everything threaded so far. Index |Q| ("end") stands for "below the leaf".
//
// acc[s][e] for a block [lo, hi) of path positions holds the best arrays over
// all vertices of T_{u_0} outside the block (plus the part above u_0), given
// that u_lo gets state s and u_hi gets state e. Splitting a block runs
// "backward" steps (from u_hi up to u_mid) for the left half and "forward"
// steps (from u_lo down to u_mid) for the right half, so every light subtree
// is entered O(log m) times per path.
class Complement {
 public:
  Complement(const Instance& instance, const Automaton& aut, const ComplementSink& sink)
      : inst_(instance),
        sink_(sink),
        hld_(decorate_hld(instance)),
        plans_(aut),
        stats_(instance.size()),
        engine_(instance, hld_, plans_, stats_),
        states_(aut.state_count()),
        end_(aut.state_count()) {}

  CallStats run() {
    const Weight cap = inst_.capacity();
    Row root(states_, ProfitArray::identity(cap));
    sink_(0, root);
    Row head = blank();
    for (State q : plans_.automaton().initial()) head[q] = ProfitArray::identity(cap);
    process(0, head);
    return stats_;
  }

 private:
  Row blank() const { return Row(states_ + 1, ProfitArray(inst_.capacity())); }

  void raise(ProfitArray& dst, const ProfitArray& src) {
    max_into(dst, src);
    ++stats_.maxima;
  }

  ProfitArray shifted(const ProfitArray& z, int label, Vertex u) {
    if (label == 0) return z;
    ++stats_.shift_adds;
    return shift_add(z, 1, inst_.weight(u), inst_.profit(u));
  }

  // Threads acc through the light children of u that pattern p reaches.
  ProfitArray lights(Vertex u, const Pattern& p, ProfitArray acc) {
    ++stats_.chains;
    auto kids = inst_.children(u);
    const std::size_t jh = engine_.heavy_position(u);
    for (std::size_t j = 0; j < kids.size(); ++j) {
      if (j != jh) engine_.thread(kids[j], p.options_at(j), acc);
    }
    return acc;
  }

  // Row by heavy-child state (or end) -> Row by state of u.
  Row backward(Vertex u, const Row& below) {
    Row out = blank();
    const std::size_t jh = engine_.heavy_position(u);
    const detail::Plan& plan = engine_.plan(u);
    for (std::size_t i = 0; i < plan.patterns.size(); ++i) {
      const Pattern& p = plan.patterns[i];
      ProfitArray in = jh == detail::kNoPosition ? below[end_]
                                                 : engine_.combine(below, p.options_at(jh));
      if (in.all_bottom()) continue;
      const ProfitArray z = lights(u, p, std::move(in));
      for (auto [t, label] : plan.all_users[i]) raise(out[t], shifted(z, label, u));
    }
    return out;
  }

  // Row by state of u -> Row by heavy-child state (or end). When `hole` is
  // given it also collects the complement of the heavy child, indexed by the
  // state of u.
  Row forward(Vertex u, const Row& above, Row* hole) {
    Row out = blank();
    const std::size_t jh = engine_.heavy_position(u);
    const detail::Plan& plan = engine_.plan(u);
    for (std::size_t i = 0; i < plan.patterns.size(); ++i) {
      const Pattern& p = plan.patterns[i];
      std::optional<State> cached;
      ProfitArray z;
      for (auto [s, label] : plan.all_users[i]) {
        if (above[s].all_bottom()) continue;
        if (cached != s) {
          z = lights(u, p, above[s]);
          cached = s;
        }
        const ProfitArray r = shifted(z, label, u);
        if (hole) raise((*hole)[s], r);
        if (jh == detail::kNoPosition) {
          raise(out[end_], r);
        } else {
          for (const Option& o : p.options_at(jh)) raise(out[o.state], r);
        }
      }
    }
    return out;
  }

  void emit(Vertex v, const Row& row) {
    sink_(v, std::span<const ProfitArray>(row.data(), states_));
  }

  void process(Vertex head, const Row& top) {
    std::vector<Vertex> path;
    for (Vertex u = head; u != kNoVertex; u = hld_.heavy_child[static_cast<std::size_t>(u)]) {
      path.push_back(u);
    }
    Row incoming = top;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      Row hole = blank();
      incoming = forward(path[i], incoming, &hole);
      emit(path[i + 1], hole);
    }
    std::vector<Row> acc(states_, blank());
    for (State s = 0; s < states_; ++s) acc[s][end_] = top[s];
    split(path, 0, path.size(), acc);
  }

  void split(const std::vector<Vertex>& path, std::size_t lo, std::size_t hi,
             const std::vector<Row>& acc) {
    if (hi - lo == 1) {
      leaf(path[lo], acc);
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    {
      std::vector<Row> left;
      for (State s = 0; s < states_; ++s) {
        Row r = acc[s];
        for (std::size_t i = hi; i-- > mid;) r = backward(path[i], r);
        left.push_back(std::move(r));
      }
      split(path, lo, mid, left);
    }
    std::vector<Row> right(states_, blank());
    const bool to_end = hi == path.size();
    for (std::size_t e = to_end ? end_ : 0; e < (to_end ? end_ + 1 : states_); ++e) {
      Row f = blank();
      bool any = false;
      for (State s = 0; s < states_; ++s) {
        f[s] = acc[s][e];
        any = any || !f[s].all_bottom();
      }
      if (!any) continue;
      for (std::size_t i = lo; i < mid; ++i) f = forward(path[i], f, nullptr);
      for (State s = 0; s < states_; ++s) right[s][e] = std::move(f[s]);
    }
    split(path, mid, hi, right);
  }

  // Complements of the light children of one path vertex u, by excluding one
  // light position at a time with a divide and conquer over the positions.
  void leaf(Vertex u, const std::vector<Row>& acc) {
    auto kids = inst_.children(u);
    const std::size_t jh = engine_.heavy_position(u);
    std::vector<std::size_t> light;
    for (std::size_t j = 0; j < kids.size(); ++j) {
      if (j != jh) light.push_back(j);
    }
    if (light.empty()) return;
    std::vector<Row> hole(light.size(), blank());
    std::vector<Row> below(light.size(), blank());
    const detail::Plan& plan = engine_.plan(u);

    for (std::size_t i = 0; i < plan.patterns.size(); ++i) {
      const Pattern& p = plan.patterns[i];
      const auto& users = plan.all_users[i];
      for (std::size_t a = 0; a < users.size();) {
        const State s = users[a].first;
        std::vector<int> labels;
        for (; a < users.size() && users[a].first == s; ++a) labels.push_back(users[a].second);
        ProfitArray start = jh == detail::kNoPosition
                                ? acc[s][end_]
                                : engine_.combine(acc[s], p.options_at(jh));
        if (start.all_bottom()) continue;
        ++stats_.chains;
        auto exclude = [&](auto&& self, std::size_t lo, std::size_t hi,
                           const ProfitArray& cur) -> void {
          if (hi - lo == 1) {
            for (int label : labels) {
              const ProfitArray r = shifted(cur, label, u);
              raise(hole[lo][s], r);
              for (const Option& o : p.options_at(light[lo])) raise(below[lo][o.state], r);
            }
            return;
          }
          const std::size_t mid = lo + (hi - lo) / 2;
          ProfitArray left = cur;
          for (std::size_t b = mid; b < hi; ++b) {
            engine_.thread(kids[light[b]], p.options_at(light[b]), left);
          }
          self(self, lo, mid, left);
          ProfitArray right = cur;
          for (std::size_t b = lo; b < mid; ++b) {
            engine_.thread(kids[light[b]], p.options_at(light[b]), right);
          }
          self(self, mid, hi, right);
        };
        exclude(exclude, 0, light.size(), start);
      }
    }
    for (std::size_t b = 0; b < light.size(); ++b) {
      emit(kids[light[b]], hole[b]);
      process(kids[light[b]], below[b]);
    }
  }

  const Instance& inst_;
  const ComplementSink& sink_;
  HldDecoration hld_;
  detail::PlanCache plans_;
  CallStats stats_;
  detail::Engine<ProfitArray> engine_;
  std::size_t states_;
  std::size_t end_;
};

}  // namespace

SubtreeValues for_all_subtree(const Instance& instance, const Automaton& aut) {
  if (aut.has_increments()) {
    throw Error(ErrorCode::kUnsupported, "automata with component increments are not supported");
  }
  SubtreeValues out;
  out.stats = CallStats(instance.size());
  out.value.assign(instance.size(), std::nullopt);
  const HldDecoration hld = decorate_hld(instance);
  detail::PlanCache plans(aut);
  detail::Engine<ProfitArray> engine(instance, hld, plans, out.stats);
  const ProfitArray id = ProfitArray::identity(instance.capacity());
  for (const auto& path : hld.heavy_paths) {
    engine.run_capture(path.front(), id, [&](Vertex v, const std::vector<ProfitArray>& ys) {
      out.value[static_cast<std::size_t>(v)] = optimum_of(aut, ys);
    });
  }
  return out;
}

std::optional<BestValue> ComplementTable::best(Vertex u) const {
  std::optional<BestValue> b;
  for (const auto& a : rows[static_cast<std::size_t>(u)]) {
    auto v = best_value(a);
    if (v && (!b || v->value > b->value || (v->value == b->value && v->weight < b->weight))) {
      b = v;
    }
  }
  return b;
}

CallStats for_all_subtree_complement(const Instance& instance, const Automaton& aut,
                                     const ComplementSink& sink) {
  if (aut.has_increments()) {
    throw Error(ErrorCode::kUnsupported, "automata with component increments are not supported");
  }
  if (!is_prefix_closed(aut, instance.size())) {
    throw Error(ErrorCode::kNotPrefixClosed,
                "complement arrays need a prefix-closed automaton (see connectivity-closed)");
  }
  Complement c(instance, aut, sink);
  return c.run();
}

ComplementTable for_all_subtree_complement(const Instance& instance, const Automaton& aut) {
  ComplementTable table;
  table.rows.resize(instance.size());
  table.stats = for_all_subtree_complement(
      instance, aut, [&](Vertex v, std::span<const ProfitArray> rows) {
        table.rows[static_cast<std::size_t>(v)].assign(rows.begin(), rows.end());
      });
  return table;
}

LiftedAutomaton lift_k(const Automaton& aut) {
  if (aut.has_increments()) {
    throw Error(ErrorCode::kUnsupported, "automaton is already lifted");
  }
  if (aut.state_count() >= kMaxStates) {
    throw Error(ErrorCode::kInvalidAutomaton, "no room for the extra state");
  }
  std::string name = "out";
  while (aut.find_state(name)) name += '_';
  auto names = aut.names();
  names.push_back(name);
  const auto out = static_cast<State>(aut.state_count());
  Product product;
  product.options.push_back({out, 0});
  for (State q : aut.initial()) product.options.push_back({q, 1});
  auto rules = aut.rules();
  rules.push_back({out, 0, std::move(product)});
  return {Automaton(std::move(names), {out}, std::move(rules)), out};
}

KSubtreeResult conn_k(const Instance& instance, const Automaton& aut, std::size_t k,
                      Algorithm algo) {
  KSubtreeResult result;
  result.stats = CallStats(instance.size());
  if (k == 0) {
    result.best = {0};
    return result;
  }
  const LiftedAutomaton lifted = lift_k(aut);
  detail::PlanCache plans(lifted.automaton);
  const KTable id = KTable::identity(k, instance.capacity());
  std::vector<KTable> root;
  if (algo == Algorithm::kHLRecDP) {
    const HldDecoration hld = decorate_hld(instance);
    detail::Engine<KTable> engine(instance, hld, plans, result.stats);
    root = engine.run(0, id);
  } else if (algo == Algorithm::kBaseline) {
    root = std::move(detail::baseline_tables(instance, plans, id, result.stats, false)[0]);
  } else {
    throw Error(ErrorCode::kUnsupported, "conn_k runs on hlrecdp or baseline");
  }
  result.best.assign(k + 1, std::nullopt);
  auto consider = [&](std::size_t l, const ProfitArray& row) {
    if (auto b = best_value(row); b && (!result.best[l] || b->value > *result.best[l])) {
      result.best[l] = b->value;
    }
  };
  for (std::size_t l = 0; l <= k; ++l) {
    consider(l, root[lifted.out].row(l));
    if (l == 0) continue;
    for (State q0 : aut.initial()) consider(l, root[q0].row(l - 1));
  }
  return result;
}

}  // namespace treeknap
