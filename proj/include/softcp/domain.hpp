#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

namespace softcp {

using Value = std::int64_t;
using Cost = std::int64_t;

// Finite domain stored as a sorted, duplicate-free vector of values.
class Domain {
 public:
  Domain() = default;
  Domain(std::initializer_list<Value> values) : values_(values) { normalize(); }
  explicit Domain(std::vector<Value> values) : values_(std::move(values)) {
    normalize();
  }

  static Domain range(Value lo, Value hi) {
    Domain d;
    for (Value v = lo; v <= hi; ++v) d.values_.push_back(v);
    return d;
  }

  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool is_fixed() const { return values_.size() == 1; }
  [[nodiscard]] Value min() const { return values_.front(); }
  [[nodiscard]] Value max() const { return values_.back(); }

  [[nodiscard]] bool contains(Value v) const {
    return std::binary_search(values_.begin(), values_.end(), v);
  }

  [[nodiscard]] std::span<const Value> values() const { return values_; }
  [[nodiscard]] auto begin() const { return values_.begin(); }
  [[nodiscard]] auto end() const { return values_.end(); }

  // Removes every value strictly below `lo`. Returns true on change.
  bool remove_below(Value lo) {
    auto it = std::lower_bound(values_.begin(), values_.end(), lo);
    if (it == values_.begin()) return false;
    values_.erase(values_.begin(), it);
    return true;
  }

  // Removes every value strictly above `hi`. Returns true on change.
  bool remove_above(Value hi) {
    auto it = std::upper_bound(values_.begin(), values_.end(), hi);
    if (it == values_.end()) return false;
    values_.erase(it, values_.end());
    return true;
  }

  bool remove(Value v) {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    if (it == values_.end() || *it != v) return false;
    values_.erase(it);
    return true;
  }

  template <typename Pred>
  bool remove_if(Pred pred) {
    auto it = std::remove_if(values_.begin(), values_.end(), pred);
    bool changed = it != values_.end();
    values_.erase(it, values_.end());
    return changed;
  }

  friend bool operator==(const Domain&, const Domain&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Domain& d) {
    os << '{';
    for (std::size_t i = 0; i < d.values_.size(); ++i) {
      if (i) os << ',';
      os << d.values_[i];
    }
    return os << '}';
  }

 private:
  void normalize() {
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  }

  std::vector<Value> values_;
};

using Domains = std::vector<Domain>;

// Sorted union of all values appearing in `domains`.
inline std::vector<Value> union_of(std::span<const Domain> domains) {
  std::vector<Value> out;
  for (const auto& d : domains) out.insert(out.end(), d.begin(), d.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Outcome of a single propagator call. On failure `domains`/`cost_domain`
// are unspecified.
enum class FailReason {
  kNone,
  kInfeasible,        // underlying flow / path problem has no solution
  kMeasureUndefined,  // var measure requested but the occurrence bounds cannot be met
  kCostTooHigh,       // minimum violation exceeds max of the cost domain
  kEmptyDomain,
};

inline const char* to_string(FailReason r) {
  switch (r) {
    case FailReason::kNone: return "none";
    case FailReason::kInfeasible: return "infeasible";
    case FailReason::kMeasureUndefined: return "measure undefined";
    case FailReason::kCostTooHigh: return "cost too high";
    case FailReason::kEmptyDomain: return "empty domain";
  }
  return "?";
}

struct Propagation {
  FailReason failure = FailReason::kNone;
  Domains domains;
  Domain cost_domain;
  Cost min_violation = 0;

  [[nodiscard]] bool ok() const { return failure == FailReason::kNone; }

  static Propagation fail(FailReason r) {
    Propagation p;
    p.failure = r;
    return p;
  }
};

}  // namespace softcp
