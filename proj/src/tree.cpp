#include "treeknap/tree.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "treeknap/error.hpp"
#include "text.hpp"

namespace treeknap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParentOrder: return "parent-order";
    case ErrorCode::kNegativeValue: return "negative-value";
    case ErrorCode::kOverflowRisk: return "overflow-risk";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kUnknownState: return "unknown-state";
    case ErrorCode::kDuplicateRule: return "duplicate-rule";
    case ErrorCode::kBadShape: return "bad-shape";
    case ErrorCode::kInvalidAutomaton: return "invalid-automaton";
    case ErrorCode::kUnknownConstraint: return "unknown-constraint";
    case ErrorCode::kSizeGuard: return "size-guard";
    case ErrorCode::kNotPrefixClosed: return "not-prefix-closed";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kContractViolation: return "contract-violation";
  }
  return "unknown";
}

std::vector<Vertex> Instance::parent_list() const {
  return {parent_.begin() + (parent_.empty() ? 0 : 1), parent_.end()};
}

Instance Instance::with_capacity(Weight capacity) const {
  std::vector<std::int64_t> parents(parent_.begin() + 1, parent_.end());
  return build_tree(parents, weight_, profit_, capacity);
}

Instance build_tree(std::span<const std::int64_t> parents,
                    std::span<const std::int64_t> weights,
                    std::span<const std::int64_t> profits,
                    std::int64_t capacity) {
  const std::size_t n = weights.size();
  if (n == 0) {
    throw Error(ErrorCode::kLengthMismatch, "a tree needs at least one vertex");
  }
  if (profits.size() != n || parents.size() + 1 != n) {
    throw Error(ErrorCode::kLengthMismatch,
                "expected " + std::to_string(n - 1) + " parents and " +
                    std::to_string(n) + " profits, got " +
                    std::to_string(parents.size()) + " and " +
                    std::to_string(profits.size()));
  }
  if (n > static_cast<std::size_t>(INT32_MAX)) {
    throw Error(ErrorCode::kOverflowRisk, "too many vertices");
  }
  for (std::size_t i = 1; i < n; ++i) {
    auto p = parents[i - 1];
    if (p < 0 || static_cast<std::size_t>(p) >= i) {
      throw Error(ErrorCode::kParentOrder,
                  "parent of vertex " + std::to_string(i) + " is " +
                      std::to_string(p) + ", which is not less than the child");
    }
  }
  if (capacity < 0) {
    throw Error(ErrorCode::kNegativeValue, "capacity must be nonnegative");
  }
  std::int64_t max_profit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0 || profits[i] < 0) {
      throw Error(ErrorCode::kNegativeValue,
                  "vertex " + std::to_string(i) + " has a negative weight or profit");
    }
    max_profit = std::max(max_profit, profits[i]);
  }
  if (capacity >= kValueLimit ||
      (max_profit > 0 &&
       static_cast<std::int64_t>(n) > (kValueLimit - 1) / max_profit)) {
    throw Error(ErrorCode::kOverflowRisk,
                "n * max(profit) and the capacity must stay below 2^61");
  }

  Instance inst;
  inst.capacity_ = capacity;
  inst.weight_.assign(weights.begin(), weights.end());
  inst.profit_.assign(profits.begin(), profits.end());
  inst.parent_.assign(n, kNoVertex);
  std::vector<std::size_t> count(n + 1, 0);
  for (std::size_t i = 1; i < n; ++i) {
    inst.parent_[i] = static_cast<Vertex>(parents[i - 1]);
    ++count[static_cast<std::size_t>(parents[i - 1]) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) count[i + 1] += count[i];
  inst.child_offset_ = count;
  inst.child_list_.resize(n - 1);
  // Filling in increasing child order keeps every child list sorted.
  for (std::size_t i = 1; i < n; ++i) {
    auto p = static_cast<std::size_t>(parents[i - 1]);
    inst.child_list_[count[p]++] = static_cast<Vertex>(i);
  }
  return inst;
}

HldDecoration decorate_hld(const Instance& instance) {
  const std::size_t n = instance.size();
  HldDecoration d;
  d.size.assign(n, 1);
  d.heavy_child.assign(n, kNoVertex);
  d.light_depth.assign(n, 0);
  for (std::size_t i = n; i-- > 1;) {
    d.size[static_cast<std::size_t>(instance.parent(static_cast<Vertex>(i)))] += d.size[i];
  }
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t best = 0;
    for (Vertex v : instance.children(static_cast<Vertex>(u))) {
      if (d.size[static_cast<std::size_t>(v)] > best) {
        best = d.size[static_cast<std::size_t>(v)];
        d.heavy_child[u] = v;
      }
    }
  }
  for (std::size_t v = 1; v < n; ++v) {
    auto p = static_cast<std::size_t>(instance.parent(static_cast<Vertex>(v)));
    d.light_depth[v] = d.light_depth[p] +
                       (d.heavy_child[p] == static_cast<Vertex>(v) ? 0u : 1u);
  }
  for (std::size_t v = 0; v < n; ++v) {
    bool head = v == 0 ||
                d.heavy_child[static_cast<std::size_t>(
                    instance.parent(static_cast<Vertex>(v)))] != static_cast<Vertex>(v);
    if (!head) continue;
    std::vector<Vertex> path;
    for (Vertex u = static_cast<Vertex>(v); u != kNoVertex;
         u = d.heavy_child[static_cast<std::size_t>(u)]) {
      path.push_back(u);
    }
    d.heavy_paths.push_back(std::move(path));
  }
  return d;
}

namespace {

using text::Line;
using text::Token;
using text::parse_int;

std::vector<std::int64_t> parse_row(const Line& line, std::size_t expected,
                                    const char* what) {
  if (line.tokens.size() != expected) {
    std::size_t col = line.tokens.size() > expected ? line.tokens[expected].column
                                                    : line.end_column;
    throw Error(ErrorCode::kParse,
                "expected " + std::to_string(expected) + " " + what + " entries, found " +
                    std::to_string(line.tokens.size()),
                line.number, col);
  }
  std::vector<std::int64_t> row;
  row.reserve(expected);
  for (const auto& tok : line.tokens) row.push_back(parse_int(tok, line.number));
  return row;
}

}  // namespace

Instance parse_instance(std::string_view text) {
  auto lines = text::tokenize(text);
  if (lines.empty()) throw Error(ErrorCode::kParse, "empty instance", 1, 1);
  const auto header = parse_row(lines[0], 2, "header");
  if (header[0] < 1) {
    throw Error(ErrorCode::kParse, "vertex count must be at least 1",
                lines[0].number, lines[0].tokens[0].column);
  }
  const auto n = static_cast<std::size_t>(header[0]);
  const std::size_t expected_lines = n == 1 ? 3 : 4;
  if (lines.size() != expected_lines) {
    const Line& last = lines.back();
    throw Error(ErrorCode::kParse,
                "expected " + std::to_string(expected_lines) + " non-empty lines, found " +
                    std::to_string(lines.size()),
                lines.size() > expected_lines ? lines[expected_lines].number : last.number + 1,
                1);
  }
  std::size_t next = 1;
  std::vector<std::int64_t> parents;
  if (n > 1) parents = parse_row(lines[next++], n - 1, "parent");
  auto weights = parse_row(lines[next++], n, "weight");
  auto profits = parse_row(lines[next++], n, "profit");
  return build_tree(parents, weights, profits, header[1]);
}

std::string serialize_instance(const Instance& instance) {
  std::ostringstream os;
  os << instance.size() << ' ' << instance.capacity() << '\n';
  auto write_row = [&os](const auto& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
    os << '\n';
  };
  if (instance.size() > 1) write_row(instance.parent_list());
  write_row(instance.weights());
  write_row(instance.profits());
  return os.str();
}

Subtree extract_subtree(const Instance& instance, Vertex root) {
  const std::size_t n = instance.size();
  std::vector<Vertex> local(n, kNoVertex);
  Subtree sub;
  local[static_cast<std::size_t>(root)] = 0;
  sub.mapping.push_back(root);
  std::vector<std::int64_t> parents;
  for (std::size_t v = static_cast<std::size_t>(root) + 1; v < n; ++v) {
    auto p = instance.parent(static_cast<Vertex>(v));
    if (local[static_cast<std::size_t>(p)] == kNoVertex) continue;
    local[v] = static_cast<Vertex>(sub.mapping.size());
    sub.mapping.push_back(static_cast<Vertex>(v));
    parents.push_back(local[static_cast<std::size_t>(p)]);
  }
  std::vector<std::int64_t> w, p;
  for (Vertex v : sub.mapping) {
    w.push_back(instance.weight(v));
    p.push_back(instance.profit(v));
  }
  sub.instance = build_tree(parents, w, p, instance.capacity());
  return sub;
}

std::size_t height(const Instance& instance) {
  std::vector<std::size_t> depth(instance.size(), 0);
  std::size_t h = 0;
  for (std::size_t v = 1; v < instance.size(); ++v) {
    depth[v] = depth[static_cast<std::size_t>(instance.parent(static_cast<Vertex>(v)))] + 1;
    h = std::max(h, depth[v]);
  }
  return h;
}

}  // namespace treeknap
