#include "treeknap/profit_array.hpp"

#include <algorithm>
#include <sstream>

#include "treeknap/error.hpp"

namespace treeknap {
namespace {

constexpr std::int64_t kBottom = ProfitArray::kBottom;

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                "profit arrays have different lengths: " + std::to_string(a) +
                    " vs " + std::to_string(b));
  }
}

}  // namespace

ProfitArray::ProfitArray(Weight capacity)
    : values_(static_cast<std::size_t>(capacity) + 1, kBottom) {
  if (capacity < 0) {
    throw Error(ErrorCode::kNegativeValue, "capacity must be nonnegative");
  }
}

ProfitArray ProfitArray::from_values(
    std::span<const std::optional<Profit>> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "profit array needs length >= 1");
  }
  ProfitArray a(static_cast<Weight>(values.size()) - 1);
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c] && *values[c] < 0) {
      throw Error(ErrorCode::kNegativeValue, "profit entries must be >= 0");
    }
    a.set(static_cast<Weight>(c), values[c]);
  }
  return a;
}

ProfitArray ProfitArray::identity(Weight capacity) {
  ProfitArray a(capacity);
  a.values_[0] = 0;
  return a;
}

bool ProfitArray::all_bottom() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](std::int64_t v) { return v < 0; });
}

ProfitArray shift_add(const ProfitArray& a, int sigma, Weight w, Profit p) {
  if (sigma == 0) return a;
  ProfitArray r(a.capacity());
  const Weight cap = a.capacity();
  if (w > cap) return r;
  auto src = a.raw_values();
  auto dst = r.raw_values();
  for (Weight c = w; c <= cap; ++c) {
    std::int64_t v = src[static_cast<std::size_t>(c - w)];
    dst[static_cast<std::size_t>(c)] = v < 0 ? kBottom : v + p;
  }
  return r;
}

void max_into(ProfitArray& dst, const ProfitArray& src) {
  require_same_length(dst.length(), src.length());
  auto d = dst.raw_values();
  auto s = src.raw_values();
  for (std::size_t c = 0; c < d.size(); ++c) d[c] = std::max(d[c], s[c]);
}

ProfitArray pointwise_max(const ProfitArray& a, const ProfitArray& b) {
  ProfitArray r = a;
  max_into(r, b);
  return r;
}

ProfitArray convolve(const ProfitArray& a, const ProfitArray& b) {
  require_same_length(a.length(), b.length());
  const std::size_t len = a.length();
  ProfitArray r(a.capacity());
  auto x = a.raw_values();
  auto y = b.raw_values();
  auto out = r.raw_values();
  // Full O(C^2) evaluation with no sparsity shortcuts; BOTTOM sums stay
  // negative and are normalised afterwards.
  for (std::size_t i = 0; i < len; ++i) {
    const std::int64_t xi = x[i];
    std::int64_t* o = out.data() + i;
    const std::size_t rem = len - i;
    for (std::size_t j = 0; j < rem; ++j) o[j] = std::max(o[j], xi + y[j]);
  }
  for (auto& v : out) {
    if (v < 0) v = kBottom;
  }
  return r;
}

std::optional<BestValue> best_value(const ProfitArray& a) {
  std::optional<BestValue> best;
  for (Weight c = 0; c <= a.capacity(); ++c) {
    auto v = a.raw(c);
    if (v < 0) continue;
    if (!best || v > best->value) best = BestValue{v, c};
  }
  return best;
}

ProfitArray shift_count(const ProfitArray& a, int increment) {
  if (increment != 0) {
    throw Error(ErrorCode::kUnsupported,
                "component-count increments need a KTable tableau");
  }
  return a;
}

ProfitArray bottom_like(const ProfitArray& a) {
  return ProfitArray(a.capacity());
}

std::string dump_array(const ProfitArray& a) {
  std::ostringstream os;
  for (Weight c = 0; c <= a.capacity(); ++c) {
    os << c << ' ';
    if (auto v = a.at(c)) {
      os << *v;
    } else {
      os << "-inf";
    }
    os << '\n';
  }
  return os.str();
}

KTable::KTable(std::size_t k, Weight capacity)
    : rows_(k + 1, ProfitArray(capacity)) {}

KTable KTable::identity(std::size_t k, Weight capacity) {
  KTable t(k, capacity);
  t.rows_[0] = ProfitArray::identity(capacity);
  return t;
}

KTable shift_add(const KTable& a, int sigma, Weight w, Profit p) {
  if (sigma == 0) return a;
  KTable r = a;
  for (std::size_t l = 0; l < a.row_count(); ++l) {
    r.row(l) = shift_add(a.row(l), sigma, w, p);
  }
  return r;
}

void max_into(KTable& dst, const KTable& src) {
  require_same_length(dst.row_count(), src.row_count());
  for (std::size_t l = 0; l < dst.row_count(); ++l) max_into(dst.row(l), src.row(l));
}

KTable pointwise_max(const KTable& a, const KTable& b) {
  KTable r = a;
  max_into(r, b);
  return r;
}

KTable convolve(const KTable& a, const KTable& b) {
  require_same_length(a.row_count(), b.row_count());
  KTable r(a.k(), a.capacity());
  for (std::size_t l1 = 0; l1 < a.row_count(); ++l1) {
    if (a.row(l1).all_bottom()) continue;
    for (std::size_t l2 = 0; l1 + l2 < a.row_count(); ++l2) {
      max_into(r.row(l1 + l2), convolve(a.row(l1), b.row(l2)));
    }
  }
  return r;
}

KTable shift_count(const KTable& a, int increment) {
  if (increment == 0) return a;
  if (increment < 0) {
    throw Error(ErrorCode::kUnsupported, "negative component increment");
  }
  KTable r(a.k(), a.capacity());
  const auto inc = static_cast<std::size_t>(increment);
  for (std::size_t l = inc; l < a.row_count(); ++l) r.row(l) = a.row(l - inc);
  return r;
}

KTable bottom_like(const KTable& a) { return KTable(a.k(), a.capacity()); }

}  // namespace treeknap
