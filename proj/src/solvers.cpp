#include "treeknap/solvers.hpp"

#include <pthread.h>

#include <exception>
#include <numeric>

#include "engine.hpp"
#include "treeknap/error.hpp"
#include "treeknap/oracle.hpp"

namespace treeknap {

namespace detail {

void run_with_large_stack(const std::function<void()>& fn) {
  constexpr std::size_t kStackBytes = std::size_t{1} << 30;
  struct Context {
    const std::function<void()>* fn;
    std::exception_ptr error;
  } ctx{&fn, nullptr};
  auto entry = [](void* arg) -> void* {
    auto* c = static_cast<Context*>(arg);
    try {
      (*c->fn)();
    } catch (...) {
      c->error = std::current_exception();
    }
    return nullptr;
  };
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStackBytes);
  pthread_t thread;
  const int rc = pthread_create(&thread, &attr, entry, &ctx);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();  // could not get a big stack; try on the current one
    return;
  }
  pthread_join(thread, nullptr);
  if (ctx.error) std::rethrow_exception(ctx.error);
}

}  // namespace detail

namespace {

void require_plain(const Automaton& aut) {
  if (aut.has_increments()) {
    throw Error(ErrorCode::kUnsupported,
                "automata with component increments are only solved by conn_k");
  }
}

void require_input(const Instance& instance, const ProfitArray& x0) {
  if (x0.capacity() != instance.capacity()) {
    throw Error(ErrorCode::kLengthMismatch, "input array length must be C+1");
  }
}

class RecDP {
 public:
  RecDP(const Instance& instance, detail::PlanCache& plans, CallStats& stats)
      : inst_(instance), plans_(plans), stats_(stats) {}

  ProfitArray run(Vertex u, State q, const ProfitArray& x) {
    ++stats_.invocations_per_vertex[static_cast<std::size_t>(u)];
    if (plans_.is_inert(q)) return x;
    auto kids = inst_.children(u);
    const detail::Plan& plan = plans_.at(kids.size());
    ProfitArray result(x.capacity());
    bool first = true;
    for (int label = 0; label < 2; ++label) {
      for (std::uint32_t i : plan.by_source[2 * q + static_cast<std::size_t>(label)]) {
        const Pattern& p = plan.patterns[i];
        ++stats_.chains;
        ProfitArray acc = x;
        for (std::size_t j = 0; j < kids.size(); ++j) {
          auto options = p.options_at(j);
          if (plans_.passes_through(options)) continue;
          ProfitArray next = run(kids[j], options[0].state, acc);
          for (std::size_t o = 1; o < options.size(); ++o) {
            max_into(next, run(kids[j], options[o].state, acc));
            ++stats_.maxima;
          }
          acc = std::move(next);
        }
        if (label == 1) {
          acc = shift_add(acc, 1, inst_.weight(u), inst_.profit(u));
          ++stats_.shift_adds;
        }
        if (first) {
          result = std::move(acc);
          first = false;
        } else {
          max_into(result, acc);
          ++stats_.maxima;
        }
      }
    }
    return result;
  }

 private:
  const Instance& inst_;
  detail::PlanCache& plans_;
  CallStats& stats_;
};

// Walks back through recomputed chain convolutions to find one optimal
// labeling. X holds every vertex's arrays.
std::vector<Vertex> reconstruct(const Instance& instance, detail::PlanCache& plans,
                                const std::vector<std::vector<ProfitArray>>& X,
                                State q0, Weight c0, Profit v0) {
  struct Task {
    Vertex u;
    State q;
    Weight c;
    Profit value;
  };
  std::vector<std::uint8_t> labels(instance.size(), 0);
  std::vector<Task> stack{{0, q0, c0, v0}};
  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    auto kids = instance.children(t.u);
    const std::size_t d = kids.size();
    const detail::Plan& plan = plans.at(d);
    bool found = false;
    for (int label = 0; label < 2 && !found; ++label) {
      const Weight shift = label ? instance.weight(t.u) : 0;
      const Profit gain = label ? instance.profit(t.u) : 0;
      if (t.c < shift || t.value < gain) continue;
      const Weight c = t.c - shift;
      const Profit target = t.value - gain;
      for (std::uint32_t i : plan.by_source[2 * t.q + static_cast<std::size_t>(label)]) {
        const Pattern& p = plan.patterns[i];
        std::vector<ProfitArray> eff;
        std::vector<ProfitArray> prefix;
        for (std::size_t j = 0; j < d; ++j) {
          auto options = p.options_at(j);
          const auto& child = X[static_cast<std::size_t>(kids[j])];
          ProfitArray e = child[options[0].state];
          for (std::size_t o = 1; o < options.size(); ++o) max_into(e, child[options[o].state]);
          prefix.push_back(j == 0 ? e : convolve(prefix.back(), e));
          eff.push_back(std::move(e));
        }
        const std::int64_t total =
            d == 0 ? (c == 0 ? 0 : ProfitArray::kBottom) : prefix.back().raw(c);
        if (total != target) continue;
        found = true;
        labels[static_cast<std::size_t>(t.u)] = static_cast<std::uint8_t>(label);
        Weight rest = c;
        Profit remaining = target;
        for (std::size_t j = d; j-- > 0;) {
          Weight cj = rest;
          if (j > 0) {
            for (cj = 0; cj <= rest; ++cj) {
              const auto a = prefix[j - 1].raw(rest - cj);
              const auto b = eff[j].raw(cj);
              if (a >= 0 && b >= 0 && a + b == remaining) break;
            }
          }
          const Profit part = eff[j].raw(cj);
          if (cj > rest || part < 0) {
            throw Error(ErrorCode::kContractViolation, "witness split not found");
          }
          const auto& child = X[static_cast<std::size_t>(kids[j])];
          for (const Option& o : p.options_at(j)) {
            if (child[o.state].raw(cj) == part) {
              stack.push_back({kids[j], o.state, cj, part});
              break;
            }
          }
          remaining -= part;
          rest -= cj;
        }
        break;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kContractViolation,
                  "no rule reproduces the value at vertex " + std::to_string(t.u));
    }
  }
  std::vector<Vertex> chosen;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v]) chosen.push_back(static_cast<Vertex>(v));
  }
  return chosen;
}

void validate_witness(const Instance& instance, const Automaton& aut,
                      const std::vector<Vertex>& witness, const BestValue& optimum) {
  LabelVector labels(instance.size(), 0);
  Weight w = 0;
  Profit p = 0;
  for (Vertex v : witness) {
    labels[static_cast<std::size_t>(v)] = 1;
    w += instance.weight(v);
    p += instance.profit(v);
  }
  if (!accepts(aut, instance, labels) || w > instance.capacity() || p != optimum.value) {
    throw Error(ErrorCode::kContractViolation, "reconstructed witness does not check out");
  }
}

}  // namespace

std::uint64_t CallStats::total_invocations() const noexcept {
  return std::accumulate(invocations_per_vertex.begin(), invocations_per_vertex.end(),
                         std::uint64_t{0});
}

const char* to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kBaseline: return "baseline";
    case Algorithm::kRecDP: return "recdp";
    case Algorithm::kHLRecDP: return "hlrecdp";
    case Algorithm::kOracle: return "oracle";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::kBaseline, Algorithm::kRecDP, Algorithm::kHLRecDP,
                 Algorithm::kOracle}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<BestValue> optimum_of(const Automaton& aut,
                                    std::span<const ProfitArray> root_arrays) {
  std::optional<BestValue> best;
  for (State q : aut.initial()) {
    auto b = best_value(root_arrays[q]);
    if (!b) continue;
    if (!best || b->value > best->value ||
        (b->value == best->value && b->weight < best->weight)) {
      best = b;
    }
  }
  return best;
}

SolveResult baseline_dp(const Instance& instance, const Automaton& aut, bool want_witness) {
  require_plain(aut);
  SolveResult result;
  result.stats = CallStats(instance.size());
  detail::PlanCache plans(aut);
  auto X = detail::baseline_tables(instance, plans, ProfitArray::identity(instance.capacity()),
                                   result.stats, want_witness);
  result.root_arrays = X[0];
  result.optimum = optimum_of(aut, result.root_arrays);
  if (want_witness && result.optimum) {
    State q0 = aut.initial().front();
    for (State q : aut.initial()) {
      auto b = best_value(result.root_arrays[q]);
      if (b && *b == *result.optimum) {
        q0 = q;
        break;
      }
    }
    auto witness = reconstruct(instance, plans, X, q0, result.optimum->weight,
                               result.optimum->value);
    validate_witness(instance, aut, witness, *result.optimum);
    result.witness = std::move(witness);
  }
  return result;
}

std::vector<ProfitArray> recdp(const Instance& instance, const Automaton& aut,
                               const ProfitArray& x0, CallStats* stats) {
  require_plain(aut);
  require_input(instance, x0);
  CallStats local(instance.size());
  CallStats& s = stats ? *stats : local;
  if (s.invocations_per_vertex.size() != instance.size()) s = CallStats(instance.size());
  detail::PlanCache plans(aut);
  std::vector<ProfitArray> out;
  detail::run_with_large_stack([&] {
    RecDP rec(instance, plans, s);
    for (State q = 0; q < aut.state_count(); ++q) out.push_back(rec.run(0, q, x0));
  });
  return out;
}

std::vector<ProfitArray> hlrecdp_arrays(const Instance& instance, const Automaton& aut,
                                        const ProfitArray& x0, CallStats* stats,
                                        bool inject_fault) {
  require_plain(aut);
  require_input(instance, x0);
  CallStats local(instance.size());
  CallStats& s = stats ? *stats : local;
  if (s.invocations_per_vertex.size() != instance.size()) s = CallStats(instance.size());
  const HldDecoration hld = decorate_hld(instance);
  detail::PlanCache plans(aut);
  detail::Engine<ProfitArray> engine(instance, hld, plans, s, inject_fault);
  return engine.run(0, x0);
}

SolveResult hlrecdp(const Instance& instance, const Automaton& aut,
                    const SolveOptions& options) {
  if (options.witness) {
    throw Error(ErrorCode::kUnsupported,
                "hlrecdp threads arrays through chains and keeps no back-pointers; "
                "use --algo baseline or oracle for a witness");
  }
  SolveResult result;
  result.stats = CallStats(instance.size());
  result.root_arrays = hlrecdp_arrays(instance, aut, ProfitArray::identity(instance.capacity()),
                                      &result.stats, options.inject_fault);
  result.optimum = optimum_of(aut, result.root_arrays);
  return result;
}

SolveResult solve(const Instance& instance, const Automaton& aut, Algorithm algo,
                  const SolveOptions& options) {
  switch (algo) {
    case Algorithm::kBaseline:
      return baseline_dp(instance, aut, options.witness);
    case Algorithm::kRecDP: {
      if (options.witness) {
        throw Error(ErrorCode::kUnsupported,
                    "recdp keeps no back-pointers; use --algo baseline or oracle for a witness");
      }
      SolveResult result;
      result.stats = CallStats(instance.size());
      result.root_arrays =
          recdp(instance, aut, ProfitArray::identity(instance.capacity()), &result.stats);
      result.optimum = optimum_of(aut, result.root_arrays);
      return result;
    }
    case Algorithm::kHLRecDP:
      return hlrecdp(instance, aut, options);
    case Algorithm::kOracle: {
      auto oracle = brute_force(instance, aut);
      SolveResult result;
      result.stats = CallStats(instance.size());
      result.root_arrays = std::move(oracle.state_arrays);
      result.optimum = oracle.optimum;
      if (options.witness && result.optimum) result.witness = std::move(oracle.witness);
      return result;
    }
  }
  throw Error(ErrorCode::kUnsupported, "unknown algorithm");
}

}  // namespace treeknap
