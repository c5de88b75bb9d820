#pragma once

// Minimal constraint kernel: finite-domain variables, FIFO propagation to a
// fixpoint and depth-first branch and bound on a cost variable.

#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "softcp/automaton.hpp"
#include "softcp/domain.hpp"
#include "softcp/soft_gcc.hpp"
#include "softcp/soft_regular.hpp"

namespace softcp {

using VarId = int;

struct Variable {
  std::string name;
  Domain domain;
};

struct SoftGccConstraint {
  std::vector<VarId> vars;
  GccBounds bounds;
  ViolationMeasure measure;
  VarId cost;
  std::vector<Value> universe;  // D_X, fixed when posted
};

struct SoftRegularConstraint {
  std::vector<VarId> vars;
  std::shared_ptr<const Dfa> dfa;
  RegularMeasure measure = RegularMeasure::kVar;
  EditWeights weights;
  VarId cost;
  std::vector<Value> symbol_values;  // model value of each symbol code
};

using Constraint = std::variant<SoftGccConstraint, SoftRegularConstraint>;

// Domain store indexed by VarId.
using Store = Domains;

class Model {
 public:
  VarId add_variable(std::string name, Domain domain) {
    if (domain.empty()) throw std::invalid_argument("variable '" + name + "' has an empty domain");
    if (index_.count(name)) throw std::invalid_argument("duplicate variable '" + name + "'");
    index_[name] = static_cast<VarId>(vars_.size());
    vars_.push_back({std::move(name), std::move(domain)});
    watchers_.emplace_back();
    return static_cast<VarId>(vars_.size() - 1);
  }

  int post_soft_gcc(std::vector<VarId> vars, GccBounds bounds, ViolationMeasure measure,
                    VarId cost) {
    check_scope(vars, cost);
    std::vector<Domain> doms;
    for (VarId v : vars) doms.push_back(vars_[v].domain);
    std::vector<Value> universe = union_of(doms);
    return add({SoftGccConstraint{std::move(vars), std::move(bounds), std::move(measure), cost,
                                  std::move(universe)}});
  }

  int post_soft_regular(std::vector<VarId> vars, std::shared_ptr<const Dfa> dfa,
                        RegularMeasure measure, EditWeights weights, VarId cost,
                        std::vector<Value> symbol_values) {
    check_scope(vars, cost);
    weights.validate();
    if (static_cast<int>(symbol_values.size()) != dfa->num_symbols())
      throw std::invalid_argument("symbol value table does not match the automaton alphabet");
    for (VarId v : vars)
      for (Value val : vars_[v].domain)
        if (std::find(symbol_values.begin(), symbol_values.end(), val) == symbol_values.end())
          throw std::invalid_argument("value of variable '" + vars_[v].name +
                                      "' is not a symbol of the automaton");
    return add({SoftRegularConstraint{std::move(vars), std::move(dfa), measure, weights, cost,
                                      std::move(symbol_values)}});
  }

  void minimize(VarId v) {
    check_var(v);
    objective_ = v;
  }

  [[nodiscard]] int num_vars() const { return static_cast<int>(vars_.size()); }
  [[nodiscard]] const Variable& var(VarId v) const { return vars_.at(v); }
  [[nodiscard]] const std::vector<Variable>& vars() const { return vars_; }
  [[nodiscard]] std::optional<VarId> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }
  [[nodiscard]] std::optional<VarId> objective() const { return objective_; }
  [[nodiscard]] const std::vector<std::vector<int>>& watchers() const { return watchers_; }

  [[nodiscard]] Store initial_store() const {
    Store s;
    for (const auto& v : vars_) s.push_back(v.domain);
    return s;
  }

  void check_var(VarId v) const {
    if (v < 0 || v >= num_vars()) throw std::invalid_argument("unknown variable id");
  }

 private:
  void check_scope(const std::vector<VarId>& vars, VarId cost) const {
    if (vars.empty()) throw std::invalid_argument("constraint needs at least one variable");
    check_var(cost);
    std::vector<bool> seen(vars_.size(), false);
    seen[cost] = true;
    for (VarId v : vars) {
      check_var(v);
      if (seen[v]) throw std::invalid_argument("variable '" + vars_[v].name + "' repeated in constraint scope");
      seen[v] = true;
    }
  }

  int add(Constraint c) {
    int id = static_cast<int>(constraints_.size());
    std::visit(
        [&](const auto& k) {
          for (VarId v : k.vars) watchers_[v].push_back(id);
          watchers_[k.cost].push_back(id);
        },
        c);
    constraints_.push_back(std::move(c));
    return id;
  }

  std::vector<Variable> vars_;
  std::map<std::string, VarId> index_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<int>> watchers_;
  std::optional<VarId> objective_;
};

// Runs one constraint's propagator against the store. Returns the new store
// or the failure reason.
inline std::variant<Store, FailReason> propagate_constraint(const Constraint& c, const Store& store) {
  Store next = store;
  if (const auto* g = std::get_if<SoftGccConstraint>(&c)) {
    Domains doms;
    for (VarId v : g->vars) doms.push_back(store[v]);
    bool fast = g->measure.kind == MeasureKind::kVal && all_lower_bounds_zero(g->bounds, g->universe);
    Propagation p = fast ? propagate_soft_gcc_scc_fastpath(doms, g->bounds, store[g->cost],
                                                           g->measure, g->universe)
                         : propagate_soft_gcc(doms, g->bounds, store[g->cost], g->measure,
                                              g->universe);
    if (!p.ok()) return p.failure;
    for (std::size_t i = 0; i < g->vars.size(); ++i) next[g->vars[i]] = p.domains[i];
    next[g->cost] = p.cost_domain;
    return next;
  }
  const auto& r = std::get<SoftRegularConstraint>(c);
  std::map<Value, Symbol> code;
  for (Symbol s = 0; s < static_cast<Symbol>(r.symbol_values.size()); ++s) code[r.symbol_values[s]] = s;
  Domains doms;
  for (VarId v : r.vars) {
    std::vector<Value> codes;
    for (Value val : store[v]) codes.push_back(code.at(val));
    doms.emplace_back(std::move(codes));
  }
  RegularPropagation p = propagate_soft_regular(doms, *r.dfa, store[r.cost], r.measure, r.weights);
  if (!p.ok()) return p.failure;
  for (std::size_t i = 0; i < r.vars.size(); ++i) {
    std::vector<Value> vals;
    for (Value s : p.domains[i]) vals.push_back(r.symbol_values[s]);
    next[r.vars[i]] = Domain(std::move(vals));
  }
  next[r.cost] = p.cost_domain;
  return next;
}

struct SearchStats {
  long long nodes = 0;
  long long propagations = 0;
  double wall_ms = 0;
};

// FIFO scheduling: every constraint once, then any constraint watching a
// variable whose domain changed.
inline std::optional<Store> propagate_fixpoint(const Model& model, Store store,
                                               SearchStats* stats = nullptr) {
  const int nc = static_cast<int>(model.constraints().size());
  std::deque<int> queue;
  std::vector<bool> queued(nc, true);
  for (int c = 0; c < nc; ++c) queue.push_back(c);
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    queued[c] = false;
    if (stats) ++stats->propagations;
    auto result = propagate_constraint(model.constraints()[c], store);
    if (std::holds_alternative<FailReason>(result)) return std::nullopt;
    Store& next = std::get<Store>(result);
    for (VarId v = 0; v < model.num_vars(); ++v) {
      if (next[v] == store[v]) continue;
      for (int w : model.watchers()[v])
        if (!queued[w]) {
          queued[w] = true;
          queue.push_back(w);
        }
    }
    store = std::move(next);
  }
  return store;
}

inline std::optional<Store> propagate_fixpoint(const Model& model) {
  return propagate_fixpoint(model, model.initial_store());
}

enum class SearchStatus { kOptimal, kSatisfiable, kInfeasible };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::kOptimal: return "optimal";
    case SearchStatus::kSatisfiable: return "satisfiable";
    case SearchStatus::kInfeasible: return "infeasible";
  }
  return "?";
}

struct SearchResult {
  SearchStatus status = SearchStatus::kInfeasible;
  std::vector<Value> assignment;  // by VarId; empty when infeasible
  Value objective = 0;
  SearchStats stats;
};

namespace detail {

class BranchAndBound {
 public:
  explicit BranchAndBound(const Model& model) : model_(model) {}

  SearchResult run() {
    auto start = std::chrono::steady_clock::now();
    dive(model_.initial_store());
    auto stop = std::chrono::steady_clock::now();
    result_.stats.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    if (!result_.assignment.empty())
      result_.status = model_.objective() ? SearchStatus::kOptimal : SearchStatus::kSatisfiable;
    return result_;
  }

 private:
  // Returns true to stop the search.
  bool dive(Store store) {
    ++result_.stats.nodes;
    if (incumbent_ && model_.objective()) {
      Domain& objective = store[*model_.objective()];
      objective.remove_above(*incumbent_ - 1);
      if (objective.empty()) return false;
    }
    auto fixed = propagate_fixpoint(model_, std::move(store), &result_.stats);
    if (!fixed) return false;
    int branch = -1;
    for (VarId v = 0; v < model_.num_vars(); ++v) {
      std::size_t size = (*fixed)[v].size();
      if (size > 1 && (branch < 0 || size < (*fixed)[branch].size())) branch = v;
    }
    if (branch < 0) {
      result_.assignment.clear();
      for (const auto& d : *fixed) result_.assignment.push_back(d.min());
      if (!model_.objective()) return true;
      incumbent_ = (*fixed)[*model_.objective()].min();
      result_.objective = *incumbent_;
      return false;
    }
    for (Value v : (*fixed)[branch]) {
      Store child = *fixed;
      child[branch] = Domain{v};
      if (dive(std::move(child))) return true;
    }
    return false;
  }

  const Model& model_;
  SearchResult result_;
  std::optional<Value> incumbent_;
};

}  // namespace detail

// Depth-first search, smallest domain first, ascending values. After each
// solution the objective is constrained below the incumbent, so the last
// solution found is optimal. Without an objective the first solution is
// returned.
inline SearchResult solve_min(const Model& model) { return detail::BranchAndBound(model).run(); }

}  // namespace softcp
