#pragma once

// Soft global cardinality aggregator: a soft_gcc posted over the cost
// variables of other soft constraints.

#include <stdexcept>
#include <vector>

#include "softcp/engine.hpp"
#include "softcp/soft_gcc.hpp"

namespace softcp {

struct SgcaSpec {
  std::vector<VarId> cost_vars;
  GccBounds bounds;
  ViolationMeasure measure;
  VarId aggregate;
};

inline void validate(const Model& model, const SgcaSpec& spec) {
  if (spec.cost_vars.empty()) throw std::invalid_argument("sgca needs at least one cost variable");
  model.check_var(spec.aggregate);
  std::vector<Domain> doms;
  for (VarId z : spec.cost_vars) {
    model.check_var(z);
    if (model.var(z).domain.min() < 0)
      throw std::invalid_argument("cost variable '" + model.var(z).name + "' has negative values");
    doms.push_back(model.var(z).domain);
  }
  if (model.var(spec.aggregate).domain.min() < 0)
    throw std::invalid_argument("aggregate cost variable has negative values");
  std::vector<Value> universe = union_of(doms);
  for (const auto& [d, o] : spec.bounds.entries())
    if (!std::binary_search(universe.begin(), universe.end(), d))
      throw std::invalid_argument("sgca bounds mention value " + std::to_string(d) +
                                  " outside the cost variables' domains");
}

// Installs soft_gcc[measure](Z, l, u, z_agg); returns the constraint index.
inline int post_sgca(Model& model, const SgcaSpec& spec) {
  validate(model, spec);
  return model.post_soft_gcc(spec.cost_vars, spec.bounds, spec.measure, spec.aggregate);
}

// Overflow-only value measure: violation(Z) = sum_d overflow(Z, d).
inline ViolationMeasure overflow_only_measure() {
  return ViolationMeasure::weighted(WeightFunction::constant(1), WeightFunction::constant(0));
}

// violation(Z) = sum_d d * overflow(Z, d).
inline ViolationMeasure proportional_overflow_measure() {
  return ViolationMeasure::weighted(WeightFunction::identity(), WeightFunction::constant(0));
}

// Max-CSP over binary cost variables: value 1 may not occur, so z_agg counts
// the violated constraints.
inline SgcaSpec max_csp_spec(std::vector<VarId> cost_vars, VarId aggregate) {
  GccBounds bounds;
  bounds.set(1, 0, 0);
  return {std::move(cost_vars), std::move(bounds), overflow_only_measure(), aggregate};
}

// Posts the sgca with F_over(d) = d and no underflow penalty. Every lower
// bound must be zero; the engine then uses the SCC fast path.
inline int weighted_violation_encoding(Model& model, SgcaSpec spec) {
  for (const auto& [d, o] : spec.bounds.entries())
    if (o.lower != 0)
      throw std::invalid_argument("weighted violation encoding requires zero lower bounds");
  spec.measure = proportional_overflow_measure();
  return post_sgca(model, spec);
}

}  // namespace softcp
