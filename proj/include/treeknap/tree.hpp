#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treeknap {

using Vertex = std::int32_t;
using Weight = std::int64_t;
using Profit = std::int64_t;

inline constexpr Vertex kNoVertex = -1;

// Totals of profits and the capacity are kept below this bound so that the
// negative sentinel used by profit arrays can never be reached by a sum.
inline constexpr std::int64_t kValueLimit = std::int64_t{1} << 61;

// A rooted tree with per-vertex weights and profits plus a global capacity.
// Vertex 0 is the root and every other vertex has a smaller-indexed parent.
// Instances are only produced by build_tree / parse_instance and are
// immutable afterwards.
class Instance {
 public:
  std::size_t size() const noexcept { return weight_.size(); }
  Weight capacity() const noexcept { return capacity_; }

  Vertex parent(Vertex v) const { return parent_[static_cast<std::size_t>(v)]; }
  Weight weight(Vertex v) const { return weight_[static_cast<std::size_t>(v)]; }
  Profit profit(Vertex v) const { return profit_[static_cast<std::size_t>(v)]; }

  // Children in ascending index order.
  std::span<const Vertex> children(Vertex v) const {
    auto b = child_offset_[static_cast<std::size_t>(v)];
    auto e = child_offset_[static_cast<std::size_t>(v) + 1];
    return {child_list_.data() + b, e - b};
  }
  std::size_t degree(Vertex v) const { return children(v).size(); }

  // parent list excluding the root, i.e. entries for vertices 1..n-1.
  std::vector<Vertex> parent_list() const;
  const std::vector<Weight>& weights() const noexcept { return weight_; }
  const std::vector<Profit>& profits() const noexcept { return profit_; }

  Instance with_capacity(Weight capacity) const;

  bool operator==(const Instance& other) const = default;

 private:
  friend Instance build_tree(std::span<const std::int64_t>,
                             std::span<const std::int64_t>,
                             std::span<const std::int64_t>, std::int64_t);

  std::vector<Vertex> parent_;
  std::vector<std::size_t> child_offset_;
  std::vector<Vertex> child_list_;
  std::vector<Weight> weight_;
  std::vector<Profit> profit_;
  Weight capacity_ = 0;
};

// Validates and builds an instance. `parents` has n-1 entries (parent of
// vertex 1, 2, ...). Throws Error with kLengthMismatch, kParentOrder,
// kNegativeValue or kOverflowRisk.
Instance build_tree(std::span<const std::int64_t> parents,
                    std::span<const std::int64_t> weights,
                    std::span<const std::int64_t> profits,
                    std::int64_t capacity);

struct HldDecoration {
  std::vector<std::size_t> size;
  std::vector<Vertex> heavy_child;  // kNoVertex for leaves
  std::vector<std::uint32_t> light_depth;
  std::vector<std::vector<Vertex>> heavy_paths;  // each listed top-down

  bool operator==(const HldDecoration& other) const = default;
};

// Heavy child is the child with the largest subtree; ties go to the smallest
// index. Runs in O(n) without recursion.
HldDecoration decorate_hld(const Instance& instance);

// Line-oriented text format:
//   n C
//   parent(1) ... parent(n-1)      (line omitted when n = 1)
//   w(0) ... w(n-1)
//   p(0) ... p(n-1)
// '#' starts a comment. Errors carry line and column.
Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& instance);

// The subtree rooted at `root`, relabelled in ascending original order (which
// keeps parent < child). `mapping[i]` is the original vertex of new vertex i.
struct Subtree {
  Instance instance;
  std::vector<Vertex> mapping;
};
Subtree extract_subtree(const Instance& instance, Vertex root);

// Tree height in edges (0 for a single vertex).
std::size_t height(const Instance& instance);

}  // namespace treeknap
