#pragma once

// Brute-force ground truth: exhaustive enumeration of the domain product and
// breadth-first search over reassignments. Deliberately naive; shares no
// traversal code with the propagators.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "softcp/automaton.hpp"
#include "softcp/domain.hpp"
#include "softcp/soft_gcc.hpp"
#include "softcp/soft_regular.hpp"

namespace softcp::oracle {

inline constexpr double kMaxTuples = 1e6;

class SizeGuardExceeded : public std::invalid_argument {
 public:
  explicit SizeGuardExceeded(double tuples)
      : std::invalid_argument("domain product of " + std::to_string(static_cast<long long>(tuples)) +
                              " tuples exceeds the oracle size guard of 1000000") {}
};

struct GccSpec {
  GccBounds bounds;
  ViolationMeasure measure;
  std::vector<Value> universe;  // empty: union of the domains
};

struct RegularSpec {
  const Dfa* dfa;
  RegularMeasure measure = RegularMeasure::kVar;
  EditWeights weights;
};

using ConstraintSpec = std::variant<GccSpec, RegularSpec>;

inline double product_size(std::span<const Domain> domains) {
  double p = 1;
  for (const auto& d : domains) p *= static_cast<double>(d.size());
  return p;
}

// Violation of a full tuple; nullopt when the measure is undefined (var gcc
// with unsatisfiable bounds, or Hamming with no word of that length).
inline std::optional<Cost> tuple_violation(const ConstraintSpec& spec,
                                           std::span<const Value> tuple,
                                           std::span<const Value> universe) {
  if (const auto* g = std::get_if<GccSpec>(&spec)) {
    if (g->measure.kind == MeasureKind::kVar) return violation_var(tuple, g->bounds, universe);
    return violation_val(tuple, g->bounds, universe, g->measure);
  }
  const auto& r = std::get<RegularSpec>(spec);
  std::vector<Symbol> word(tuple.begin(), tuple.end());
  if (r.measure == RegularMeasure::kVar) {
    // Hamming distance with a substitution weight: mismatches times the weight.
    auto h = hamming_to_language(*r.dfa, word);
    if (!h) return std::nullopt;
    return *h * r.weights.substitution;
  }
  return edit_to_language(*r.dfa, word, r.weights);
}

// Calls visit(tuple) for each tuple of the domain product, in lexicographic
// order of domain positions.
template <typename Visit>
void for_each_tuple(std::span<const Domain> domains, Visit&& visit) {
  double size = product_size(domains);
  if (size > kMaxTuples) throw SizeGuardExceeded(size);
  const std::size_t n = domains.size();
  for (const auto& d : domains)
    if (d.empty()) return;
  std::vector<std::size_t> idx(n, 0);
  std::vector<Value> tuple(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) tuple[i] = domains[i].values()[idx[i]];
    visit(std::span<const Value>(tuple));
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < domains[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

inline std::vector<Value> spec_universe(const ConstraintSpec& spec, std::span<const Domain> domains) {
  if (const auto* g = std::get_if<GccSpec>(&spec)) {
    if (!g->universe.empty()) return g->universe;
    return union_of(domains);
  }
  return {};
}

// Minimum violation over the domain product; nullopt when no tuple has a
// defined violation.
inline std::optional<Cost> enumerate_min_violation(std::span<const Domain> domains,
                                                   const ConstraintSpec& spec) {
  std::vector<Value> universe = spec_universe(spec, domains);
  std::optional<Cost> best;
  for_each_tuple(domains, [&](std::span<const Value> t) {
    auto v = tuple_violation(spec, t, universe);
    if (v && (!best || *v < *best)) best = v;
  });
  return best;
}

// Keeps d in D_i iff some tuple with x_i = d has violation <= z_max.
inline std::optional<Domains> oracle_filter(std::span<const Domain> domains,
                                            const ConstraintSpec& spec, Cost z_max) {
  std::vector<Value> universe = spec_universe(spec, domains);
  std::vector<std::set<Value>> supported(domains.size());
  for_each_tuple(domains, [&](std::span<const Value> t) {
    auto v = tuple_violation(spec, t, universe);
    if (!v || *v > z_max) return;
    for (std::size_t i = 0; i < t.size(); ++i) supported[i].insert(t[i]);
  });
  Domains out;
  for (const auto& s : supported) {
    if (s.empty()) return std::nullopt;
    out.emplace_back(std::vector<Value>(s.begin(), s.end()));
  }
  return out;
}

inline bool satisfies_gcc(std::span<const Value> assignment, const GccBounds& bounds,
                          std::span<const Value> universe) {
  std::map<Value, Count> counts;
  for (Value v : assignment) ++counts[v];
  for (Value d : universe) {
    Count c = counts.count(d) ? counts[d] : 0;
    if (c < bounds.lower(d) || c > bounds.upper(d)) return false;
  }
  return true;
}

// Fewest coordinates to change (over values of `universe`) to satisfy the
// hard gcc, by breadth-first search; nullopt when nothing satisfies it.
inline std::optional<Cost> brute_force_variable_cost(std::span<const Value> assignment,
                                                     const GccBounds& bounds,
                                                     std::span<const Value> universe) {
  if (assignment.size() > 8) throw std::invalid_argument("brute-force search limited to 8 variables");
  using State = std::vector<Value>;
  std::map<State, Cost> seen;
  std::deque<State> queue;
  State start(assignment.begin(), assignment.end());
  seen[start] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    State s = std::move(queue.front());
    queue.pop_front();
    Cost depth = seen[s];
    if (satisfies_gcc(s, bounds, universe)) return depth;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (Value v : universe) {
        if (v == s[i]) continue;
        State t = s;
        t[i] = v;
        if (seen.emplace(t, depth + 1).second) queue.push_back(std::move(t));
      }
    }
  }
  return std::nullopt;
}

}  // namespace softcp::oracle
