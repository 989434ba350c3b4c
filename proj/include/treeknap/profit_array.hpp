#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeknap/tree.hpp"

namespace treeknap {

// Best profit at weight exactly c for c in [0, capacity]; BOTTOM marks weights
// with no feasible labeling.
//
// Real entries are always >= 0, so BOTTOM is stored as a negative sentinel.
// Sums that involve BOTTOM stay strictly negative (all real totals are below
// kValueLimit) and are folded back to BOTTOM, so no addition can wrap.
class ProfitArray {
 public:
  static constexpr std::int64_t kBottom = -(std::int64_t{1} << 62);

  ProfitArray() = default;
  // All-BOTTOM array of length capacity+1.
  explicit ProfitArray(Weight capacity);
  // From explicit entries; std::nullopt is BOTTOM.
  static ProfitArray from_values(std::span<const std::optional<Profit>> values);

  static ProfitArray identity(Weight capacity);
  static ProfitArray bottom(Weight capacity) { return ProfitArray(capacity); }

  Weight capacity() const noexcept {
    return static_cast<Weight>(values_.size()) - 1;
  }
  std::size_t length() const noexcept { return values_.size(); }

  bool is_bottom(Weight c) const { return raw(c) < 0; }
  std::optional<Profit> at(Weight c) const {
    auto v = raw(c);
    return v < 0 ? std::nullopt : std::optional<Profit>(v);
  }
  bool all_bottom() const;

  std::int64_t raw(Weight c) const { return values_[static_cast<std::size_t>(c)]; }
  std::span<std::int64_t> raw_values() noexcept { return values_; }
  std::span<const std::int64_t> raw_values() const noexcept { return values_; }

  void set(Weight c, std::optional<Profit> value) {
    values_[static_cast<std::size_t>(c)] = value ? *value : kBottom;
  }

  bool operator==(const ProfitArray& other) const = default;

 private:
  std::vector<std::int64_t> values_;
};

struct BestValue {
  Profit value;
  Weight weight;
  bool operator==(const BestValue&) const = default;
};

// result[c] = a[c - sigma*w] + sigma*p.
ProfitArray shift_add(const ProfitArray& a, int sigma, Weight w, Profit p);
ProfitArray pointwise_max(const ProfitArray& a, const ProfitArray& b);
void max_into(ProfitArray& dst, const ProfitArray& src);
// Naive max-plus convolution truncated at the capacity.
ProfitArray convolve(const ProfitArray& a, const ProfitArray& b);
// Maximum entry with the smallest weight attaining it.
std::optional<BestValue> best_value(const ProfitArray& a);

// Component-count shifting is meaningless for a plain array: only increment
// 0 is accepted.
ProfitArray shift_count(const ProfitArray& a, int increment);
ProfitArray bottom_like(const ProfitArray& a);

// Lines "c value" with value an integer or "-inf".
std::string dump_array(const ProfitArray& a);

// A ProfitArray per component count l in [0, k].
class KTable {
 public:
  KTable() = default;
  KTable(std::size_t k, Weight capacity);  // all BOTTOM

  static KTable identity(std::size_t k, Weight capacity);

  std::size_t k() const noexcept { return rows_.empty() ? 0 : rows_.size() - 1; }
  Weight capacity() const { return rows_.front().capacity(); }
  const ProfitArray& row(std::size_t l) const { return rows_[l]; }
  ProfitArray& row(std::size_t l) { return rows_[l]; }
  std::size_t row_count() const noexcept { return rows_.size(); }

  bool operator==(const KTable& other) const = default;

 private:
  std::vector<ProfitArray> rows_;
};

KTable shift_add(const KTable& a, int sigma, Weight w, Profit p);
KTable pointwise_max(const KTable& a, const KTable& b);
void max_into(KTable& dst, const KTable& src);
// Convolution over both the component count and the weight.
KTable convolve(const KTable& a, const KTable& b);
// rows[l] <- rows[l - increment].
KTable shift_count(const KTable& a, int increment);
KTable bottom_like(const KTable& a);

}  // namespace treeknap
