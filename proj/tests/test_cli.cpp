#include <gtest/gtest.h>

#include <sstream>

#include "softcp/instance.hpp"
#include "support.hpp"

namespace {

using namespace softcp;
using namespace softcp::cli;

std::string fixture(const std::string& name) { return std::string(SOFTCP_TEST_DATA) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
};

Outcome run(int (*cmd)(const BuiltModel&, std::ostream&), const std::string& file, const Overrides& ov = {}) {
  BuiltModel b = build_model(load_instance(fixture(file)), ov);
  std::ostringstream os;
  int code = cmd(b, os);
  return {code, os.str()};
}

TEST(Cli, PropagateExampleTwoTightBudget) {
  Outcome r = run(cmd_propagate, "example2_z01.inst");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out,
            "domain x1: {2}\n"
            "domain x2: {1}\n"
            "domain x3: {2}\n"
            "domain x4: {1}\n"
            "bounds z: 1..1\n");
}

TEST(Cli, SolveWorkedExamples) {
  Outcome two = run(cmd_solve, "example2.inst");
  EXPECT_EQ(two.code, kExitOk);
  EXPECT_NE(two.out.find("status: optimal\nobjective: 1\n"), std::string::npos) << two.out;
  EXPECT_NE(two.out.find("assign x1: 2\n"), std::string::npos);
  Outcome three = run(cmd_solve, "example3.inst");
  EXPECT_NE(three.out.find("objective: 0\n"), std::string::npos) << three.out;
  EXPECT_NE(three.out.find("assign x3: 2\n"), std::string::npos);
}

TEST(Cli, SymbolicValuesPrintByName) {
  Outcome r = run(cmd_solve, "stretch2.inst");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("objective: 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("assign w1: a\n"), std::string::npos) << r.out;
}

TEST(Cli, MaxCspFixture) {
  Outcome r = run(cmd_solve, "maxcsp.inst");
  EXPECT_NE(r.out.find("objective: 1\n"), std::string::npos) << r.out;
}

TEST(Cli, Infeasible) {
  EXPECT_EQ(run(cmd_propagate, "infeasible.inst").code, kExitFail);
  Outcome s = run(cmd_solve, "infeasible.inst");
  EXPECT_EQ(s.code, kExitFail);
  EXPECT_EQ(s.out, "status: infeasible\n");
}

TEST(Cli, MalformedReportsPosition) {
  try {
    load_instance(fixture("malformed.inst"));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 29);
  }
}

TEST(Cli, ValidationErrors) {
  auto fails = [](const std::string& text) {
    try {
      build_model(parse_instance(text));
    } catch (const ParseError&) {
      return true;
    }
    return false;
  };
  EXPECT_TRUE(fails("var x in {1}\nconstraint soft_gcc vars(y) measure val cost x\n"));
  EXPECT_TRUE(fails("var x in {1}\nvar z in {0}\nconstraint soft_gcc vars(x) bounds(1:2..1) measure val cost z\n"));
  EXPECT_TRUE(fails("var x in {1}\nvar z in {0}\nconstraint soft_gcc vars(x) bounds(7:0..1) measure val cost z\n"));
  EXPECT_TRUE(fails("var x in {1}\nvar z in {a}\nconstraint soft_gcc vars(x) measure val cost z\n"));
  EXPECT_TRUE(fails("var x in {1}\nvar x in {2}\n"));
  EXPECT_TRUE(fails("var x in {}\n"));
  EXPECT_TRUE(fails("var x in {1}\nminimize y\n"));
  EXPECT_TRUE(fails("var x in {1}\nvar z in {0}\nconstraint soft_regular vars(x) dfa m measure var cost z\n"));
  EXPECT_TRUE(fails("var x in {1}\nvar z in {0}\nconstraint soft_gcc vars(x) measure sideways cost z\n"));
  EXPECT_TRUE(fails("var x in {1} $\n"));
  EXPECT_TRUE(fails("dfa m states {p} alphabet {a} initial q accepting {p}\n"));
  EXPECT_FALSE(fails("var x in {1}\nvar z in {0}\nconstraint soft_gcc vars(x) bounds(1:0..inf) measure val cost z\n"));
}

TEST(Cli, RoundTripFixtures) {
  for (const char* f : {"example2.inst", "example2_z01.inst", "example3.inst", "infeasible.inst",
                        "stretch2.inst", "maxcsp.inst"}) {
    Instance a = load_instance(fixture(f));
    std::string text = serialize(a);
    Instance b = parse_instance(text);
    EXPECT_EQ(a, b) << f;
    EXPECT_EQ(serialize(b), text) << f;
  }
}

Instance random_instance(support::Rng& rng) {
  Instance inst;
  int n = rng.uniform(1, 4);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    VarDecl v;
    v.name = "v" + std::to_string(i);
    const int size = rng.uniform(1, 3);
    for (int k = 0; k < size; ++k) v.values.push_back(rng.coin() ? std::to_string(k) : "s" + std::to_string(k));
    names.push_back(v.name);
    inst.vars.push_back(v);
  }
  inst.vars.push_back({"z", {"0", "1", "2"}, {}});
  DfaDecl d{"m", {"p", "q"}, {"a", "b"}, "p", {"q"}, {{"p", "a", "q"}, {"q", "b", "p"}}, {}};
  inst.dfas.push_back(d);
  ConstraintDecl c;
  c.kind = rng.coin() ? ConstraintKind::kSoftGcc : ConstraintKind::kSoftRegular;
  c.vars = names;
  c.cost = "z";
  if (c.kind == ConstraintKind::kSoftGcc) {
    c.measure = rng.coin() ? "var" : "val";
    c.bounds.push_back({"0", rng.uniform(0, 1), rng.coin() ? kUnbounded : 3});
    if (c.measure == "val") c.over.push_back({"s1", rng.uniform(0, 4)});
  } else {
    c.dfa = "m";
    c.measure = rng.coin() ? "var" : "edit";
    if (rng.coin()) c.weights = EditWeights{rng.uniform(1, 3), rng.uniform(1, 3), rng.uniform(1, 3)};
  }
  inst.constraints.push_back(c);
  if (rng.coin()) inst.minimize = "z";
  return inst;
}

TEST(Cli, RoundTripRandom) {
  support::Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    Instance a = random_instance(rng);
    Instance b = parse_instance(serialize(a));
    EXPECT_EQ(a, b) << serialize(a);
  }
}

TEST(Cli, CheckShippedFixtures) {
  for (const char* f : {"example2.inst", "example2_z01.inst", "example3.inst", "infeasible.inst",
                        "stretch2.inst", "maxcsp.inst"}) {
    Outcome r = run([](const BuiltModel& b, std::ostream& os) { return cmd_check(b, os); }, f);
    EXPECT_EQ(r.code, kExitOk) << f << "\n" << r.out;
    EXPECT_EQ(r.out, "MATCH\n") << f;
  }
}

TEST(Cli, CheckCatchesCorruptedPropagator) {
  BuiltModel b = build_model(load_instance(fixture("example2_z01.inst")));
  // Forgets to prune: returns the store unchanged.
  PropagatorFn lazy = [](const Constraint&, const Store& s) -> std::variant<Store, FailReason> { return s; };
  std::ostringstream os;
  EXPECT_EQ(cmd_check(b, os, lazy), kExitFail);
  EXPECT_NE(os.str().find("MISMATCH constraint #0"), std::string::npos) << os.str();
  EXPECT_NE(os.str().find("domain x1: propagator {1,2} oracle {2}"), std::string::npos) << os.str();

  PropagatorFn failing = [](const Constraint&, const Store&) -> std::variant<Store, FailReason> {
    return FailReason::kInfeasible;
  };
  std::ostringstream os2;
  EXPECT_EQ(cmd_check(b, os2, failing), kExitFail);
  EXPECT_NE(os2.str().find("propagator: infeasible"), std::string::npos) << os2.str();
}

TEST(Cli, CheckSizeGuard) {
  std::string text;
  std::string vars;
  for (int i = 0; i < 7; ++i) {
    text += "var x" + std::to_string(i) + " in {0..9}\n";
    vars += (i ? "," : "") + std::string("x") + std::to_string(i);
  }
  text += "var z in {0..3}\nconstraint soft_gcc vars(" + vars + ") measure val cost z\n";
  BuiltModel b = build_model(parse_instance(text));
  std::ostringstream os;
  EXPECT_EQ(cmd_check(b, os), kExitInput);
  EXPECT_NE(os.str().find("size guard"), std::string::npos) << os.str();
}

TEST(Cli, Overrides) {
  Overrides ov;
  ov.measure = "val";
  Outcome r = run(cmd_solve, "example2.inst", ov);
  // Value-based cost of (2,1,2,1): overflow(1) = 0, underflow(2) = 1.
  EXPECT_NE(r.out.find("objective: 1\n"), std::string::npos) << r.out;
  Overrides cap;
  cap.zmax = 1;
  Outcome p = run(cmd_propagate, "example2.inst", cap);
  EXPECT_NE(p.out.find("domain x1: {2}\n"), std::string::npos) << p.out;
  Overrides ew;
  ew.edit_weights = EditWeights{1, 5, 5};
  Outcome s = run(cmd_solve, "stretch2.inst", ew);
  // An odd length forces one insertion or deletion.
  EXPECT_NE(s.out.find("objective: 5\n"), std::string::npos) << s.out;
}

}  // namespace
