#include <gtest/gtest.h>

#include "softcp/aggregator.hpp"
#include "softcp/engine.hpp"
#include "softcp/oracle.hpp"
#include "support.hpp"

namespace {

using namespace softcp;

Model example_model(GccBounds bounds, ViolationMeasure m, Domain z) {
  Model model;
  std::vector<VarId> xs;
  xs.push_back(model.add_variable("x1", Domain{1, 2}));
  xs.push_back(model.add_variable("x2", Domain{1}));
  xs.push_back(model.add_variable("x3", Domain{1, 2}));
  xs.push_back(model.add_variable("x4", Domain{1}));
  VarId zv = model.add_variable("z", std::move(z));
  model.post_soft_gcc(xs, std::move(bounds), std::move(m), zv);
  model.minimize(zv);
  return model;
}

GccBounds example2_bounds() { return {{1, {1, 2}}, {2, {3, 5}}}; }
GccBounds example3_bounds() { return {{1, {1, 3}}, {2, {2, 2}}}; }

TEST(Model, Validation) {
  Model m;
  EXPECT_THROW(m.add_variable("x", Domain{}), std::invalid_argument);
  VarId x = m.add_variable("x", Domain{1});
  EXPECT_THROW(m.add_variable("x", Domain{2}), std::invalid_argument);
  VarId z = m.add_variable("z", Domain{0});
  EXPECT_THROW(m.post_soft_gcc({x, x}, {}, ViolationMeasure::val(), z), std::invalid_argument);
  EXPECT_THROW(m.post_soft_gcc({x, z}, {}, ViolationMeasure::val(), z), std::invalid_argument);
  EXPECT_THROW(m.post_soft_gcc({}, {}, ViolationMeasure::val(), z), std::invalid_argument);
  EXPECT_THROW(m.minimize(7), std::invalid_argument);
  auto dfa = std::make_shared<Dfa>(Dfa::anonymous(1, 1));
  EXPECT_THROW(m.post_soft_regular({x}, dfa, RegularMeasure::kVar, {}, z, {5}), std::invalid_argument);
  EXPECT_THROW(m.post_soft_regular({x}, dfa, RegularMeasure::kVar, {}, z, {1, 2}), std::invalid_argument);
  EXPECT_NO_THROW(m.post_soft_regular({x}, dfa, RegularMeasure::kVar, {}, z, {1}));
  EXPECT_EQ(m.find("x"), x);
  EXPECT_FALSE(m.find("y"));
}

TEST(Engine, ExampleTwoFixpoint) {
  Model m = example_model(example2_bounds(), ViolationMeasure::var(), Domain{0, 1});
  auto store = propagate_fixpoint(m);
  ASSERT_TRUE(store);
  EXPECT_EQ((*store)[0], Domain{2});
  EXPECT_EQ((*store)[2], Domain{2});
  EXPECT_EQ((*store)[4], Domain{1});
}

TEST(Engine, WorkedObjectives) {
  SearchResult two = solve_min(example_model(example2_bounds(), ViolationMeasure::var(), Domain::range(0, 4)));
  EXPECT_EQ(two.status, SearchStatus::kOptimal);
  EXPECT_EQ(two.objective, 1);
  SearchResult three = solve_min(example_model(example3_bounds(), ViolationMeasure::val(), Domain::range(0, 5)));
  EXPECT_EQ(three.status, SearchStatus::kOptimal);
  EXPECT_EQ(three.objective, 0);
  EXPECT_EQ(three.assignment, (std::vector<Value>{2, 1, 2, 1, 0}));
}

TEST(Engine, Infeasible) {
  SearchResult r = solve_min(example_model(example2_bounds(), ViolationMeasure::var(), Domain{0}));
  EXPECT_EQ(r.status, SearchStatus::kInfeasible);
  EXPECT_TRUE(r.assignment.empty());
}

TEST(Engine, UnconstrainedTakesSmallestValues) {
  Model m;
  m.add_variable("a", Domain{3, 1, 2});
  m.add_variable("b", Domain{5, 4});
  VarId z = m.add_variable("z", Domain::range(0, 3));
  m.minimize(z);
  SearchResult r = solve_min(m);
  EXPECT_EQ(r.status, SearchStatus::kOptimal);
  EXPECT_EQ(r.objective, 0);
  EXPECT_EQ(r.assignment, (std::vector<Value>{1, 4, 0}));
  Model sat;
  sat.add_variable("a", Domain{2, 1});
  SearchResult s = solve_min(sat);
  EXPECT_EQ(s.status, SearchStatus::kSatisfiable);
  EXPECT_EQ(s.assignment, (std::vector<Value>{1}));
}

// Soft gcc and soft regular over shared variables, aggregated into their sum.
struct RandomModel {
  Model model;
  std::vector<VarId> xs;
  VarId z1, z2, agg;
  GccBounds bounds;
  ViolationMeasure gcc_measure;
  std::shared_ptr<const Dfa> dfa;
  RegularMeasure regular_measure;
  EditWeights weights;
};

RandomModel random_model(support::Rng& rng) {
  RandomModel r;
  int n = rng.uniform(1, 4);
  auto dfa = std::make_shared<Dfa>(support::random_dfa(rng, 4, 3));
  int symbols = dfa->num_symbols();
  r.dfa = dfa;
  for (int i = 0; i < n; ++i)
    r.xs.push_back(r.model.add_variable("x" + std::to_string(i),
                                        support::random_domain(rng, 10, 10 + symbols - 1)));
  r.z1 = r.model.add_variable("z1", Domain::range(0, 3));
  r.z2 = r.model.add_variable("z2", Domain::range(0, 3));
  r.agg = r.model.add_variable("agg", Domain::range(0, 6));
  std::vector<Domain> doms;
  for (VarId x : r.xs) doms.push_back(r.model.var(x).domain);
  std::vector<Value> universe = union_of(doms);
  r.gcc_measure = rng.coin() ? ViolationMeasure::var() : ViolationMeasure::val();
  r.bounds = support::random_bounds(rng, universe, n, true);
  r.model.post_soft_gcc(r.xs, r.bounds, r.gcc_measure, r.z1);
  r.regular_measure = rng.coin() ? RegularMeasure::kVar : RegularMeasure::kEdit;
  r.weights = {rng.uniform(1, 2), rng.uniform(1, 2), rng.uniform(1, 2)};
  std::vector<Value> symbol_values;
  for (int s = 0; s < symbols; ++s) symbol_values.push_back(10 + s);
  r.model.post_soft_regular(r.xs, dfa, r.regular_measure, r.weights, r.z2, symbol_values);
  GccBounds sum_bounds;
  for (Value d = 1; d <= 3; ++d) sum_bounds.set(d, 0, 0);
  weighted_violation_encoding(r.model, {{r.z1, r.z2}, sum_bounds, {}, r.agg});
  r.model.minimize(r.agg);
  return r;
}

std::optional<Cost> exhaustive_optimum(const RandomModel& r) {
  std::vector<Domain> doms;
  for (VarId x : r.xs) doms.push_back(r.model.var(x).domain);
  std::vector<Value> universe = union_of(doms);
  std::optional<Cost> best;
  oracle::for_each_tuple(doms, [&](std::span<const Value> t) {
    std::optional<Cost> c1 = r.gcc_measure.kind == MeasureKind::kVar
                                 ? violation_var(t, r.bounds, universe)
                                 : std::optional<Cost>(violation_val(t, r.bounds, universe, r.gcc_measure));
    std::vector<Symbol> word;
    for (Value v : t) word.push_back(static_cast<Symbol>(v - 10));
    std::optional<Cost> c2;
    if (r.regular_measure == RegularMeasure::kVar) {
      if (auto h = hamming_to_language(*r.dfa, word)) c2 = *h * r.weights.substitution;
    } else {
      c2 = edit_to_language(*r.dfa, word, r.weights);
    }
    if (!c1 || !c2 || *c1 > 3 || *c2 > 3 || *c1 + *c2 > 6) return;
    if (!best || *c1 + *c2 < *best) best = *c1 + *c2;
  });
  return best;
}

TEST(Engine, SolveMatchesExhaustiveSearch) {
  support::Rng rng(51);
  int solved = 0;
  for (int trial = 0; trial < 150; ++trial) {
    RandomModel r = random_model(rng);
    auto expected = exhaustive_optimum(r);
    SearchResult got = solve_min(r.model);
    ASSERT_EQ(got.status == SearchStatus::kOptimal, expected.has_value()) << "trial " << trial;
    if (!expected) continue;
    ++solved;
    EXPECT_EQ(got.objective, *expected) << "trial " << trial;
    // The returned assignment is a genuine solution.
    Store fixed;
    for (Value v : got.assignment) fixed.push_back(Domain{v});
    EXPECT_TRUE(propagate_fixpoint(r.model, fixed)) << "trial " << trial;
  }
  EXPECT_GT(solved, 50);
}

TEST(Engine, FixpointIsIdempotent) {
  support::Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    RandomModel r = random_model(rng);
    auto once = propagate_fixpoint(r.model);
    if (!once) continue;
    auto twice = propagate_fixpoint(r.model, *once);
    ASSERT_TRUE(twice);
    EXPECT_EQ(*once, *twice) << "trial " << trial;
    for (const auto& c : r.model.constraints()) {
      auto again = propagate_constraint(c, *once);
      ASSERT_TRUE(std::holds_alternative<Store>(again));
      EXPECT_EQ(std::get<Store>(again), *once);
    }
  }
}

TEST(Engine, Deterministic) {
  support::Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    RandomModel r = random_model(rng);
    SearchResult a = solve_min(r.model);
    SearchResult b = solve_min(r.model);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.stats.nodes, b.stats.nodes);
    EXPECT_EQ(a.stats.propagations, b.stats.propagations);
  }
}

TEST(Engine, FastPathSelectedForZeroLowerBounds) {
  Model m;
  VarId a = m.add_variable("a", Domain{1, 2});
  VarId b = m.add_variable("b", Domain{1, 2});
  VarId z = m.add_variable("z", Domain{0});
  m.post_soft_gcc({a, b}, GccBounds{{1, {0, 0}}}, ViolationMeasure::val(), z);
  auto store = propagate_fixpoint(m);
  ASSERT_TRUE(store);
  EXPECT_EQ((*store)[a], Domain{2});
  EXPECT_EQ((*store)[b], Domain{2});
}

}  // namespace
