#pragma once

// Soft regular-language membership constraint over a layered graph of
// automaton states. Values of the constrained variables are symbol codes of
// the automaton's alphabet.

#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "softcp/automaton.hpp"
#include "softcp/domain.hpp"

namespace softcp {

enum class RegularMeasure { kVar, kEdit };

// Arc (q_k^i, q_l^{i+1}). `labels` is V_ikl = {v in D_i | delta(q_k, v) = q_l}.
struct LayerArc {
  StateId from;
  StateId to;
  std::vector<Symbol> labels;
  Cost off_label_cost;  // cost of routing a value outside `labels` over this arc
  bool added_for_deletion = false;
};

struct InsertionArc {
  StateId from;
  StateId to;
  Cost cost;
};

class LayeredGraph {
 public:
  [[nodiscard]] int num_vars() const { return static_cast<int>(layers_.size()); }
  [[nodiscard]] int num_states() const { return num_states_; }
  [[nodiscard]] RegularMeasure measure() const { return measure_; }
  [[nodiscard]] const std::vector<LayerArc>& arcs(int layer) const { return layers_.at(layer); }
  // Intra-layer arcs, replicated in every layer 0..n (edit graphs only).
  [[nodiscard]] const std::vector<InsertionArc>& insertion_arcs() const { return insertions_; }
  [[nodiscard]] StateId start() const { return start_; }
  [[nodiscard]] bool is_goal(StateId q) const { return goal_[q]; }

  // Step cost of assigning symbol v to the variable of `layer` while taking arc.
  [[nodiscard]] static Cost step_cost(const LayerArc& arc, Symbol v) {
    return std::binary_search(arc.labels.begin(), arc.labels.end(), v) ? 0 : arc.off_label_cost;
  }
  // Cheapest value of a nonempty domain on this arc.
  [[nodiscard]] static Cost cheapest_step(const LayerArc& arc) {
    return arc.labels.empty() ? arc.off_label_cost : 0;
  }

  // Shrinks every V_ikl to the given domains. Arcs are kept.
  void update_labels(const Dfa& dfa, std::span<const Domain> domains) {
    if (static_cast<int>(domains.size()) != num_vars())
      throw std::invalid_argument("domain count does not match layered graph");
    for (int i = 0; i < num_vars(); ++i) {
      for (auto& arc : layers_[i]) {
        arc.labels.clear();
        for (Value v : domains[i]) {
          Symbol s = static_cast<Symbol>(v);
          if (dfa.next(arc.from, s) == arc.to) arc.labels.push_back(s);
        }
      }
    }
  }

 private:
  friend LayeredGraph build_layered_var(const Dfa&, std::span<const Domain>, const EditWeights&);
  friend LayeredGraph build_layered_edit(const Dfa&, std::span<const Domain>, const EditWeights&);

  int num_states_ = 0;
  RegularMeasure measure_ = RegularMeasure::kVar;
  std::vector<std::vector<LayerArc>> layers_;
  std::vector<InsertionArc> insertions_;
  StateId start_ = 0;
  std::vector<bool> goal_;
};

namespace detail {

inline void check_symbol_domains(const Dfa& dfa, std::span<const Domain> domains) {
  if (domains.empty()) throw std::invalid_argument("regular constraint needs at least one variable");
  for (const auto& d : domains)
    for (Value v : d)
      if (v < 0 || v >= dfa.num_symbols())
        throw std::invalid_argument("domain value is not a symbol of the automaton");
}

}  // namespace detail

// Arc (q_k^i, q_l^{i+1}) for every (k, l) joined by some symbol of the whole
// alphabet; labels restricted to D_i.
inline LayeredGraph build_layered_var(const Dfa& dfa, std::span<const Domain> domains,
                                      const EditWeights& w = {}) {
  w.validate();
  detail::check_symbol_domains(dfa, domains);
  LayeredGraph g;
  g.num_states_ = dfa.num_states();
  g.measure_ = RegularMeasure::kVar;
  g.start_ = dfa.initial();
  g.goal_.resize(dfa.num_states());
  for (StateId q = 0; q < dfa.num_states(); ++q) g.goal_[q] = dfa.is_accepting(q);

  std::vector<LayerArc> skeleton;
  for (StateId k = 0; k < dfa.num_states(); ++k) {
    std::vector<bool> seen(dfa.num_states(), false);
    for (Symbol s = 0; s < dfa.num_symbols(); ++s) {
      StateId l = dfa.next(k, s);
      if (l == kNoTransition || seen[l]) continue;
      seen[l] = true;
      skeleton.push_back({k, l, {}, w.substitution});
    }
  }
  g.layers_.assign(domains.size(), skeleton);
  g.update_labels(dfa, domains);
  return g;
}

// Adds deletion arcs (q_k^i, q_k^{i+1}) where missing and intra-layer
// insertion arcs (q_k^i, q_l^i) wherever some symbol leads from q_k to q_l.
inline LayeredGraph build_layered_edit(const Dfa& dfa, std::span<const Domain> domains,
                                       const EditWeights& w = {}) {
  LayeredGraph g = build_layered_var(dfa, domains, w);
  g.measure_ = RegularMeasure::kEdit;
  for (auto& layer : g.layers_) {
    std::vector<bool> has_loop(dfa.num_states(), false);
    for (auto& arc : layer) {
      if (arc.from == arc.to) {
        // A value off the loop's labels is either substituted or deleted.
        arc.off_label_cost = std::min(w.substitution, w.deletion);
        has_loop[arc.from] = true;
      }
    }
    for (StateId q = 0; q < dfa.num_states(); ++q)
      if (!has_loop[q]) layer.push_back({q, q, {}, w.deletion, true});
  }
  for (StateId k = 0; k < dfa.num_states(); ++k) {
    std::vector<bool> seen(dfa.num_states(), false);
    for (Symbol s = 0; s < dfa.num_symbols(); ++s) {
      StateId l = dfa.next(k, s);
      if (l == kNoTransition || l == k || seen[l]) continue;
      seen[l] = true;
      g.insertions_.push_back({k, l, w.insertion});
    }
  }
  return g;
}

inline constexpr Cost kNoPath = std::numeric_limits<Cost>::max() / 4;

// forward[i][q]: cheapest path from q_0^1 to q^i; backward[i][q]: cheapest
// path from q^i to any goal node of the last layer. Layers are 0..n.
struct LayerCosts {
  std::vector<std::vector<Cost>> forward;
  std::vector<std::vector<Cost>> backward;
  Cost min_violation = kNoPath;
};

namespace detail {

inline LayerCosts acyclic_costs(const LayeredGraph& g) {
  const int n = g.num_vars(), nq = g.num_states();
  LayerCosts c{std::vector<std::vector<Cost>>(n + 1, std::vector<Cost>(nq, kNoPath)),
               std::vector<std::vector<Cost>>(n + 1, std::vector<Cost>(nq, kNoPath))};
  c.forward[0][g.start()] = 0;
  for (int i = 0; i < n; ++i)
    for (const auto& a : g.arcs(i))
      if (c.forward[i][a.from] != kNoPath)
        c.forward[i + 1][a.to] =
            std::min(c.forward[i + 1][a.to], c.forward[i][a.from] + LayeredGraph::cheapest_step(a));
  for (StateId q = 0; q < nq; ++q)
    if (g.is_goal(q)) c.backward[n][q] = 0;
  for (int i = n - 1; i >= 0; --i)
    for (const auto& a : g.arcs(i))
      if (c.backward[i + 1][a.to] != kNoPath)
        c.backward[i][a.from] =
            std::min(c.backward[i][a.from], c.backward[i + 1][a.to] + LayeredGraph::cheapest_step(a));
  return c;
}

// Dijkstra over nodes (layer, state), ties broken by (layer, state).
inline std::vector<std::vector<Cost>> edit_pass(const LayeredGraph& g, bool reverse) {
  const int n = g.num_vars(), nq = g.num_states();
  std::vector<Cost> dist((n + 1) * nq, kNoPath);
  using Item = std::pair<Cost, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  auto push = [&](int node, Cost d) {
    if (d < dist[node]) {
      dist[node] = d;
      heap.emplace(d, node);
    }
  };
  if (!reverse) {
    push(g.start(), 0);
  } else {
    for (StateId q = 0; q < nq; ++q)
      if (g.is_goal(q)) push(n * nq + q, 0);
  }

  // Adjacency per state for the direction of travel.
  std::vector<std::vector<InsertionArc>> ins(nq);
  for (const auto& a : g.insertion_arcs())
    ins[reverse ? a.to : a.from].push_back(a);
  std::vector<std::vector<std::vector<const LayerArc*>>> inter(n, std::vector<std::vector<const LayerArc*>>(nq));
  for (int i = 0; i < n; ++i)
    for (const auto& a : g.arcs(i)) inter[i][reverse ? a.to : a.from].push_back(&a);

  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d != dist[u]) continue;
    const int layer = u / nq;
    const StateId q = u % nq;
    for (const auto& a : ins[q]) push(layer * nq + (reverse ? a.from : a.to), d + a.cost);
    if (!reverse && layer < n) {
      for (const LayerArc* a : inter[layer][q])
        push((layer + 1) * nq + a->to, d + LayeredGraph::cheapest_step(*a));
    } else if (reverse && layer > 0) {
      for (const LayerArc* a : inter[layer - 1][q])
        push((layer - 1) * nq + a->from, d + LayeredGraph::cheapest_step(*a));
    }
  }
  std::vector<std::vector<Cost>> out(n + 1, std::vector<Cost>(nq));
  for (int i = 0; i <= n; ++i)
    for (StateId q = 0; q < nq; ++q) out[i][q] = dist[i * nq + q];
  return out;
}

}  // namespace detail

inline LayerCosts layer_costs(const LayeredGraph& g) {
  LayerCosts c;
  if (g.measure() == RegularMeasure::kVar) {
    c = detail::acyclic_costs(g);
  } else {
    c.forward = detail::edit_pass(g, false);
    c.backward = detail::edit_pass(g, true);
  }
  const int n = g.num_vars();
  for (StateId q = 0; q < g.num_states(); ++q)
    if (g.is_goal(q)) c.min_violation = std::min(c.min_violation, c.forward[n][q]);
  return c;
}

// Cost of a cheapest start-to-goal path; nullopt when no goal is reachable.
inline std::optional<Cost> min_violation(const LayeredGraph& g) {
  Cost c = layer_costs(g).min_violation;
  if (c == kNoPath) return std::nullopt;
  return c;
}

inline LayeredGraph build_layered(const Dfa& dfa, std::span<const Domain> domains,
                                  RegularMeasure measure, const EditWeights& w = {}) {
  return measure == RegularMeasure::kVar ? build_layered_var(dfa, domains, w)
                                         : build_layered_edit(dfa, domains, w);
}

struct RegularPropagation : Propagation {
  std::optional<LayeredGraph> graph;  // labels restricted to the surviving values
};

// Keeps v in D_i iff some arc of layer i gives
//   forward(q_k^i) + step_cost(arc, v) + backward(q_l^{i+1}) <= max z,
// and raises min z to the minimum violation.
inline RegularPropagation propagate_soft_regular(std::span<const Domain> domains, const Dfa& dfa,
                                                 const Domain& z_domain, RegularMeasure measure,
                                                 const EditWeights& w = {}) {
  RegularPropagation out;
  for (const auto& d : domains)
    if (d.empty()) {
      out.failure = FailReason::kEmptyDomain;
      return out;
    }
  LayeredGraph g = build_layered(dfa, domains, measure, w);
  LayerCosts c = layer_costs(g);
  if (c.min_violation == kNoPath) {
    out.failure = FailReason::kInfeasible;
    return out;
  }
  out.min_violation = c.min_violation;
  out.cost_domain = z_domain;
  if (out.cost_domain.empty() || c.min_violation > out.cost_domain.max()) {
    out.failure = FailReason::kCostTooHigh;
    return out;
  }
  out.cost_domain.remove_below(c.min_violation);
  const Cost budget = out.cost_domain.max();

  out.domains.assign(domains.begin(), domains.end());
  const int n = g.num_vars();
  for (int i = 0; i < n; ++i) {
    // Routing an arbitrary value at its arc's off-label price.
    Cost any_value = kNoPath;
    for (const auto& a : g.arcs(i)) {
      Cost f = c.forward[i][a.from], b = c.backward[i + 1][a.to];
      if (f != kNoPath && b != kNoPath) any_value = std::min(any_value, f + a.off_label_cost + b);
    }
    out.domains[i].remove_if([&](Value v) {
      Cost best = any_value;
      for (StateId k = 0; k < g.num_states(); ++k) {
        StateId l = dfa.next(k, static_cast<Symbol>(v));
        if (l == kNoTransition) continue;
        Cost f = c.forward[i][k], b = c.backward[i + 1][l];
        if (f != kNoPath && b != kNoPath) best = std::min(best, f + b);
      }
      return best > budget;
    });
    if (out.domains[i].empty()) {
      out.failure = FailReason::kEmptyDomain;
      return out;
    }
  }
  g.update_labels(dfa, out.domains);
  out.graph = std::move(g);
  return out;
}

}  // namespace softcp
