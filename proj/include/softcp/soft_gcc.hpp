#pragma once

// Soft global cardinality constraint: violation measures, the flow networks
// for the hard, variable-based and value-based versions, and domain
// consistency filtering through residual shortest paths.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "softcp/domain.hpp"
#include "softcp/flow_network.hpp"
#include "softcp/scc.hpp"

namespace softcp {

using Count = flow::Amount;
inline constexpr Count kUnbounded = flow::kInfinite;

struct Occurrence {
  Count lower = 0;
  Count upper = kUnbounded;
  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

// value -> [l_d, u_d]; values not listed are unconstrained (0, inf).
class GccBounds {
 public:
  GccBounds() = default;
  GccBounds(std::initializer_list<std::pair<const Value, Occurrence>> init) {
    for (const auto& [v, o] : init) set(v, o.lower, o.upper);
  }

  void set(Value v, Count lower, Count upper = kUnbounded) {
    if (lower < 0 || upper < 0) throw std::invalid_argument("occurrence bounds must be nonnegative");
    if (lower > upper) throw std::invalid_argument("occurrence lower bound exceeds upper bound");
    bounds_[v] = {lower, upper >= kUnbounded ? kUnbounded : upper};
  }

  [[nodiscard]] Occurrence get(Value v) const {
    auto it = bounds_.find(v);
    return it == bounds_.end() ? Occurrence{} : it->second;
  }
  [[nodiscard]] Count lower(Value v) const { return get(v).lower; }
  [[nodiscard]] Count upper(Value v) const { return get(v).upper; }
  [[nodiscard]] const std::map<Value, Occurrence>& entries() const { return bounds_; }

  friend bool operator==(const GccBounds&, const GccBounds&) = default;

 private:
  std::map<Value, Occurrence> bounds_;
};

using ValueCounts = std::map<Value, Count>;

inline ValueCounts count_values(std::span<const Value> assignment) {
  ValueCounts counts;
  for (Value v : assignment) ++counts[v];
  return counts;
}

inline Count count_of(const ValueCounts& counts, Value d) {
  auto it = counts.find(d);
  return it == counts.end() ? 0 : it->second;
}

inline Count overflow(const ValueCounts& counts, const GccBounds& bounds, Value d) {
  Count c = count_of(counts, d);
  Count u = bounds.upper(d);
  return c > u ? c - u : 0;
}

inline Count underflow(const ValueCounts& counts, const GccBounds& bounds, Value d) {
  Count c = count_of(counts, d);
  Count l = bounds.lower(d);
  return c < l ? l - c : 0;
}

// Per-value violation weight: an explicit table entry, else `d` itself when
// proportional, else `base`.
struct WeightFunction {
  Cost base = 1;
  bool proportional = false;
  std::map<Value, Cost> table;

  static WeightFunction constant(Cost c) { return {c, false, {}}; }
  static WeightFunction identity() { return {0, true, {}}; }

  Cost operator()(Value d) const {
    if (auto it = table.find(d); it != table.end()) return it->second;
    if (proportional) {
      if (d < 0) throw std::invalid_argument("proportional weight needs nonnegative values");
      return d;
    }
    return base;
  }
  friend bool operator==(const WeightFunction&, const WeightFunction&) = default;
};

enum class MeasureKind { kVar, kVal };

struct ViolationMeasure {
  MeasureKind kind = MeasureKind::kVal;
  WeightFunction over;   // value-based only
  WeightFunction under;  // value-based only

  static ViolationMeasure var() { return {MeasureKind::kVar, {}, {}}; }
  static ViolationMeasure val() { return {MeasureKind::kVal, {}, {}}; }
  static ViolationMeasure weighted(WeightFunction over, WeightFunction under) {
    return {MeasureKind::kVal, std::move(over), std::move(under)};
  }
  friend bool operator==(const ViolationMeasure&, const ViolationMeasure&) = default;
};

// Universe D_X for a bare assignment: its values plus every bounded value.
inline std::vector<Value> implied_universe(std::span<const Value> assignment,
                                           const GccBounds& bounds) {
  std::vector<Value> u(assignment.begin(), assignment.end());
  for (const auto& [v, o] : bounds.entries()) u.push_back(v);
  Domain sorted(std::move(u));
  return {sorted.begin(), sorted.end()};
}

// sum_d l_d <= n <= sum_d u_d over the universe.
inline bool occurrence_bounds_satisfiable(std::size_t n, const GccBounds& bounds,
                                          std::span<const Value> universe) {
  Count lo = 0, hi = 0;
  for (Value d : universe) {
    lo += bounds.lower(d);
    hi = std::min<Count>(kUnbounded, hi + bounds.upper(d));
  }
  return lo <= static_cast<Count>(n) && static_cast<Count>(n) <= hi;
}

// Minimum number of reassignments to satisfy the gcc; nullopt when the
// occurrence bounds are unsatisfiable for n variables.
inline std::optional<Cost> violation_var(std::span<const Value> assignment,
                                         const GccBounds& bounds,
                                         std::span<const Value> universe) {
  if (!occurrence_bounds_satisfiable(assignment.size(), bounds, universe)) return std::nullopt;
  ValueCounts counts = count_values(assignment);
  Cost over = 0, under = 0;
  for (Value d : universe) {
    over += overflow(counts, bounds, d);
    under += underflow(counts, bounds, d);
  }
  return std::max(over, under);
}

inline std::optional<Cost> violation_var(std::span<const Value> assignment,
                                         const GccBounds& bounds) {
  return violation_var(assignment, bounds, implied_universe(assignment, bounds));
}

inline Cost violation_val(std::span<const Value> assignment, const GccBounds& bounds,
                          std::span<const Value> universe,
                          const ViolationMeasure& weights = ViolationMeasure::val()) {
  ValueCounts counts = count_values(assignment);
  Cost total = 0;
  for (Value d : universe)
    total += weights.over(d) * overflow(counts, bounds, d) +
             weights.under(d) * underflow(counts, bounds, d);
  return total;
}

inline Cost violation_val(std::span<const Value> assignment, const GccBounds& bounds,
                          const ViolationMeasure& weights = ViolationMeasure::val()) {
  return violation_val(assignment, bounds, implied_universe(assignment, bounds), weights);
}

// Network over vertices s, t, x_1..x_n and the values of D_X.
struct GccNetwork {
  flow::FlowNetwork net;
  std::vector<Value> values;                      // D_X, ascending
  std::vector<std::vector<flow::ArcId>> assign;   // [i][j]: arc (x_i, values[j]) or -1
  std::vector<flow::ArcId> to_sink;               // [j]: (d, t) with (l_d, u_d)
  std::vector<flow::ArcId> underflow_arc;         // [j]: (s, d) or -1
  std::vector<flow::ArcId> overflow_arc;          // [j]: (d, t) overflow or -1
  std::vector<std::vector<flow::ArcId>> relax;    // [i][j]: unit-cost (x_i, d), d not in D_i, or -1

  [[nodiscard]] int num_vars() const { return static_cast<int>(assign.size()); }
  static constexpr flow::VertexId source() { return 0; }
  static constexpr flow::VertexId sink() { return 1; }
  [[nodiscard]] flow::VertexId var_vertex(int i) const { return 2 + i; }
  [[nodiscard]] flow::VertexId value_vertex(int j) const { return 2 + num_vars() + j; }
};

namespace detail {

inline std::vector<Value> resolve_universe(std::span<const Domain> domains,
                                           std::span<const Value> universe) {
  if (universe.empty()) return union_of(domains);
  Domain sorted(std::vector<Value>(universe.begin(), universe.end()));
  std::vector<Value> u(sorted.begin(), sorted.end());
  for (const auto& d : domains)
    for (Value v : d)
      if (!std::binary_search(u.begin(), u.end(), v))
        throw std::invalid_argument("domain value outside the constraint's value universe");
  return u;
}

}  // namespace detail

// Hard gcc network: A_{s->X} (1,1), A_{X->D_X} (0,1), A_{D_X->t} (l_d,u_d);
// all costs zero. An empty `universe` means the union of the domains.
inline GccNetwork build_gcc_network(std::span<const Domain> domains, const GccBounds& bounds,
                                    std::span<const Value> universe = {}) {
  if (domains.empty()) throw std::invalid_argument("gcc needs at least one variable");
  std::vector<Value> values = detail::resolve_universe(domains, universe);
  const int n = static_cast<int>(domains.size());
  const int m = static_cast<int>(values.size());
  GccNetwork g{flow::FlowNetwork(n + m + 2, GccNetwork::source(), GccNetwork::sink()),
               values,
               std::vector<std::vector<flow::ArcId>>(n, std::vector<flow::ArcId>(m, -1)),
               std::vector<flow::ArcId>(m, -1),
               std::vector<flow::ArcId>(m, -1),
               std::vector<flow::ArcId>(m, -1),
               std::vector<std::vector<flow::ArcId>>(n, std::vector<flow::ArcId>(m, -1))};
  for (int i = 0; i < n; ++i) g.net.add_arc(g.source(), g.var_vertex(i), 1, 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j)
      if (domains[i].contains(values[j]))
        g.assign[i][j] = g.net.add_arc(g.var_vertex(i), g.value_vertex(j), 0, 1, 0);
  }
  for (int j = 0; j < m; ++j) {
    Occurrence o = bounds.get(values[j]);
    g.to_sink[j] = g.net.add_arc(g.value_vertex(j), g.sink(), o.lower, o.upper, 0);
  }
  return g;
}

// Adds unit-cost relaxation arcs (x_i, d) for d in D_X \ D_i.
inline GccNetwork build_var_network(std::span<const Domain> domains, const GccBounds& bounds,
                                    std::span<const Value> universe = {}) {
  GccNetwork g = build_gcc_network(domains, bounds, universe);
  for (int i = 0; i < g.num_vars(); ++i)
    for (int j = 0; j < static_cast<int>(g.values.size()); ++j)
      if (g.assign[i][j] < 0) g.relax[i][j] = g.net.add_arc(g.var_vertex(i), g.value_vertex(j), 0, 1, 1);
  return g;
}

// Adds A_underflow = (s, d) with capacity l_d and cost F_under(d), and
// A_overflow = (d, t) with unbounded capacity and cost F_over(d). Underflow
// arcs of capacity zero are omitted.
inline GccNetwork build_val_network(std::span<const Domain> domains, const GccBounds& bounds,
                                    const ViolationMeasure& weights = ViolationMeasure::val(),
                                    std::span<const Value> universe = {}) {
  GccNetwork g = build_gcc_network(domains, bounds, universe);
  for (int j = 0; j < static_cast<int>(g.values.size()); ++j) {
    Value d = g.values[j];
    if (Count l = bounds.lower(d); l > 0)
      g.underflow_arc[j] = g.net.add_arc(g.source(), g.value_vertex(j), 0, l, weights.under(d));
    g.overflow_arc[j] =
        g.net.add_arc(g.value_vertex(j), g.sink(), 0, flow::kInfinite, weights.over(d));
  }
  return g;
}

namespace detail {

struct SolvedNetwork {
  GccNetwork network;
  flow::Flow flow;
  flow::ValueMode mode;
};

inline std::variant<SolvedNetwork, FailReason> solve_soft_gcc(std::span<const Domain> domains,
                                                              const GccBounds& bounds,
                                                              const ViolationMeasure& measure,
                                                              std::span<const Value> universe) {
  for (const auto& d : domains)
    if (d.empty()) return FailReason::kEmptyDomain;
  if (measure.kind == MeasureKind::kVar) {
    GccNetwork g = build_var_network(domains, bounds, universe);
    if (!occurrence_bounds_satisfiable(domains.size(), bounds, g.values))
      return FailReason::kMeasureUndefined;
    auto f = flow::feasible_min_cost_flow(g.net, g.num_vars());
    if (!f) return FailReason::kInfeasible;
    return SolvedNetwork{std::move(g), std::move(*f), flow::ValueMode::kFixed};
  }
  GccNetwork g = build_val_network(domains, bounds, measure, universe);
  auto f = flow::min_cost_feasible_flow(g.net);
  if (!f) return FailReason::kInfeasible;
  return SolvedNetwork{std::move(g), std::move(*f), flow::ValueMode::kFree};
}

// Common epilogue: bound the cost variable from below and check budget.
inline std::optional<FailReason> tighten_cost(Domain& z, Cost min_violation) {
  if (z.empty() || min_violation > z.max()) return FailReason::kCostTooHigh;
  z.remove_below(min_violation);
  return std::nullopt;
}

}  // namespace detail

// Minimum violation over all assignments of the domains, by min-cost flow.
inline std::optional<Cost> soft_gcc_min_violation(std::span<const Domain> domains,
                                                  const GccBounds& bounds,
                                                  const ViolationMeasure& measure,
                                                  std::span<const Value> universe = {}) {
  auto solved = detail::solve_soft_gcc(domains, bounds, measure, universe);
  if (auto* s = std::get_if<detail::SolvedNetwork>(&solved)) return s->flow.cost;
  return std::nullopt;
}

// Domain consistency on X and bound consistency on z: z's lower bound is
// raised to cost(f); d leaves D_i when no tuple with x_i = d fits the budget.
//
// For the value-based measure that is the forced cost of arc (x_i, d). For
// the variable-based measure a tuple with x_i = d may also be repaired by
// changing x_i itself, which the forced cost of (x_i, d) does not see. That
// repair costs 1 + M_i, where M_i is the optimum with x_i unconstrained, and
// M_i = cost(f) - 1 exactly when some relaxation arc out of x_i lies on an
// optimal flow. Hence every value survives a budget above cost(f).
inline Propagation propagate_soft_gcc(std::span<const Domain> domains, const GccBounds& bounds,
                                      const Domain& z_domain, const ViolationMeasure& measure,
                                      std::span<const Value> universe = {}) {
  auto solved = detail::solve_soft_gcc(domains, bounds, measure, universe);
  if (auto* r = std::get_if<FailReason>(&solved)) return Propagation::fail(*r);
  auto& [g, f, mode] = std::get<detail::SolvedNetwork>(solved);

  Propagation out;
  out.min_violation = f.cost;
  out.cost_domain = z_domain;
  if (auto r = detail::tighten_cost(out.cost_domain, f.cost)) return Propagation::fail(*r);
  const Cost budget = out.cost_domain.max();
  out.domains.assign(domains.begin(), domains.end());
  const bool var = measure.kind == MeasureKind::kVar;
  if (var && budget > f.cost) return out;

  const int n = g.num_vars();
  const int m = static_cast<int>(g.values.size());
  flow::ResidualGraph res = flow::residual(g.net, f, mode);
  // forced[i][j]: cheapest flow through the real or relaxation arc (x_i, values[j]).
  std::vector<std::vector<Cost>> forced(n, std::vector<Cost>(m, flow::kUnreachable));
  for (int j = 0; j < m; ++j) {
    bool needed = false;
    for (int i = 0; i < n && !needed; ++i) {
      flow::ArcId a = g.assign[i][j] >= 0 ? g.assign[i][j] : (var ? g.relax[i][j] : -1);
      needed = a >= 0 && f[a] == 0;
    }
    std::optional<flow::ShortestPathTree> tree;
    if (needed) tree = flow::shortest_residual_tree(res, g.value_vertex(j));
    for (int i = 0; i < n; ++i) {
      flow::ArcId a = g.assign[i][j] >= 0 ? g.assign[i][j] : (var ? g.relax[i][j] : -1);
      if (a < 0) continue;
      if (f[a] > 0) {
        forced[i][j] = f.cost;
      } else if (Cost back = tree->dist[g.var_vertex(i)]; back != flow::kUnreachable) {
        forced[i][j] = f.cost + back + g.net.arc(a).cost;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    bool self_repair = false;
    if (var)
      for (int j = 0; j < m && !self_repair; ++j)
        self_repair = g.relax[i][j] >= 0 && forced[i][j] == f.cost;
    if (self_repair) continue;
    for (int j = 0; j < m; ++j)
      if (g.assign[i][j] >= 0 && forced[i][j] > budget) out.domains[i].remove(g.values[j]);
  }
  for (const auto& d : out.domains)
    if (d.empty()) return Propagation::fail(FailReason::kEmptyDomain);
  return out;
}

inline bool all_lower_bounds_zero(const GccBounds& bounds, std::span<const Value> universe) {
  for (Value d : universe)
    if (bounds.lower(d) > 0) return false;
  return true;
}

// Same contract as propagate_soft_gcc for the value-based measure when every
// l_d = 0. The only costs then sit on arcs into t, so one SCC decomposition
// of the residual graph restricted to X u D_X prices every (x_i, d):
// zero extra cost inside a component, otherwise the cheapest exit to t from
// a component reachable from d plus the cheapest re-entry from t into a
// component that reaches x_i.
inline Propagation propagate_soft_gcc_scc_fastpath(std::span<const Domain> domains,
                                                   const GccBounds& bounds,
                                                   const Domain& z_domain,
                                                   const ViolationMeasure& measure,
                                                   std::span<const Value> universe = {}) {
  if (measure.kind != MeasureKind::kVal)
    throw std::invalid_argument("SCC fast path requires the value-based measure");
  {
    std::vector<Value> u = detail::resolve_universe(domains, universe);
    if (!all_lower_bounds_zero(bounds, u))
      throw std::invalid_argument("SCC fast path requires all occurrence lower bounds to be zero");
  }
  auto solved = detail::solve_soft_gcc(domains, bounds, measure, universe);
  if (auto* r = std::get_if<FailReason>(&solved)) return Propagation::fail(*r);
  auto& [g, f, mode] = std::get<detail::SolvedNetwork>(solved);

  Propagation out;
  out.min_violation = f.cost;
  out.cost_domain = z_domain;
  if (auto r = detail::tighten_cost(out.cost_domain, f.cost)) return Propagation::fail(*r);
  const Cost budget = out.cost_domain.max();

  const int n = g.num_vars();
  const int m = static_cast<int>(g.values.size());
  // Local vertex ids: 0..n-1 variables, n..n+m-1 values.
  auto local = [&](flow::VertexId v) { return v - 2; };
  std::vector<std::vector<int>> adj(n + m);
  std::vector<Cost> exit_cost(n + m, flow::kUnreachable), entry_cost(n + m, flow::kUnreachable);
  flow::ResidualGraph res = flow::residual(g.net, f, mode);
  for (const auto& a : res.arcs()) {
    bool tail_inner = a.tail >= 2, head_inner = a.head >= 2;
    if (tail_inner && head_inner) {
      adj[local(a.tail)].push_back(local(a.head));
    } else if (tail_inner && a.head == g.sink()) {
      exit_cost[local(a.tail)] = std::min(exit_cost[local(a.tail)], a.cost);
    } else if (a.tail == g.sink() && head_inner) {
      entry_cost[local(a.head)] = std::min(entry_cost[local(a.head)], a.cost);
    }
  }

  SccDecomposition scc = strongly_connected_components(adj);
  const int k = scc.num_components;
  std::vector<Cost> best_exit(k, flow::kUnreachable), best_entry(k, flow::kUnreachable);
  for (int v = 0; v < n + m; ++v) {
    best_exit[scc.component[v]] = std::min(best_exit[scc.component[v]], exit_cost[v]);
    best_entry[scc.component[v]] = std::min(best_entry[scc.component[v]], entry_cost[v]);
  }
  // Group cross-component arcs by their tail component.
  std::vector<std::vector<int>> cross(k);
  for (int v = 0; v < n + m; ++v)
    for (int w : adj[v])
      if (scc.component[v] != scc.component[w]) cross[scc.component[v]].push_back(scc.component[w]);
  // Successors have smaller indices: ascending order finalizes best_exit.
  for (int c = 0; c < k; ++c)
    for (int succ : cross[c]) best_exit[c] = std::min(best_exit[c], best_exit[succ]);
  // Predecessors have larger indices: descending order finalizes best_entry.
  for (int c = k - 1; c >= 0; --c)
    for (int succ : cross[c]) best_entry[succ] = std::min(best_entry[succ], best_entry[c]);

  out.domains.assign(domains.begin(), domains.end());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      flow::ArcId a = g.assign[i][j];
      if (a < 0 || f[a] > 0) continue;
      int cd = scc.component[n + j], cx = scc.component[i];
      bool keep;
      if (cd == cx) {
        keep = f.cost <= budget;
      } else {
        keep = best_exit[cd] != flow::kUnreachable && best_entry[cx] != flow::kUnreachable &&
               f.cost + best_exit[cd] + best_entry[cx] <= budget;
      }
      if (!keep) out.domains[i].remove(g.values[j]);
    }
  }
  for (const auto& d : out.domains)
    if (d.empty()) return Propagation::fail(FailReason::kEmptyDomain);
  return out;
}

}  // namespace softcp
