#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "tempolearn/model.hpp"
#include "tempolearn/pddl.hpp"
#include "tempolearn/rational.hpp"
#include "tempolearn/sexpr.hpp"

using namespace tempolearn;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const std::string kDataDir = TEMPOLEARN_DATA_DIR;

}  // namespace

// ---------------------------------------------------------------- rational

TEST(Rational, ExactArithmeticAndOrdering) {
  Rational a(1, 2), b(1, 3);
  EXPECT_EQ(a + b, Rational(5, 6));
  EXPECT_EQ(a - b, Rational(1, 6));
  EXPECT_TRUE(b < a);
  EXPECT_TRUE(Rational(2, 4) == Rational(1, 2));
  EXPECT_TRUE(Rational(0) < Rational(1, 10));
  // Times like 2.5 vs 2.6 stay exactly ordered (no float rounding).
  EXPECT_TRUE(Rational(5, 2) < Rational(13, 5));
}

TEST(Rational, ParseAndPrintRoundTrip) {
  EXPECT_EQ(parse_rational("5"), Rational(5));
  EXPECT_EQ(parse_rational("1/2"), Rational(1, 2));
  EXPECT_EQ(parse_rational("2.6"), Rational(13, 5));
  EXPECT_EQ(parse_rational("-0.1"), Rational(-1, 10));
  EXPECT_EQ(to_string(Rational(5)), "5");
  EXPECT_EQ(to_string(Rational(1, 2)), "0.5");   // terminating -> decimal
  EXPECT_EQ(to_string(Rational(13, 5)), "2.6");
  EXPECT_EQ(to_string(Rational(1, 3)), "1/3");   // non-terminating -> fraction
  EXPECT_EQ(parse_rational(to_string(Rational(13, 5))), Rational(13, 5));
  EXPECT_EQ(parse_rational(to_string(Rational(-7, 6))), Rational(-7, 6));
}

TEST(Rational, NormalizesSignAndGcd) {
  EXPECT_EQ(Rational(-4, -8), Rational(1, 2));
  EXPECT_EQ(Rational(3, -6), Rational(-1, 2));
  EXPECT_EQ(Rational(0, 7), Rational(0));
}

// ------------------------------------------------------------------ sexpr

TEST(Sexpr, ParsesNestedLists) {
  SexprReader reader("(define (domain match) (:types match fuse))");
  auto forms = reader.read_all();
  ASSERT_EQ(forms.size(), 1u);
  const Sexpr& top = forms[0];
  ASSERT_TRUE(top.is_list);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top.at(0).symbol, "define");
  EXPECT_EQ(top.at(1).at(1).symbol, "match");
  EXPECT_EQ(top.at(2).head(), ":types");
}

TEST(Sexpr, LowercasesSymbolsAndSkipsComments) {
  SexprReader reader("(Light M1) ; trailing comment\n(next)");
  auto forms = reader.read_all();
  ASSERT_EQ(forms.size(), 2u);
  EXPECT_EQ(forms[0].at(0).symbol, "light");
  EXPECT_EQ(forms[0].at(1).symbol, "m1");
  EXPECT_EQ(forms[1].head(), "next");
}

TEST(Sexpr, ReportsPositionOnUnbalancedParen) {
  SexprReader reader("(a\n  (b c)\n");
  try {
    reader.read_all();
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GE(e.line, 1);
    EXPECT_GE(e.column, 1);
  }
}

TEST(Sexpr, RejectsStrayCloseParen) {
  SexprReader reader(")");
  EXPECT_THROW(reader.read_all(), ParseError);
}

// ------------------------------------------------------------------ model

TEST(Model, ApplyClassicalStartEventExample) {
  // From s = {(light m1), (handfree)}, the start half of mend requires
  // {(handfree), (light m1)} and deletes (handfree), leaving {(light m1)}.
  GroundAction a;
  a.op = "mend-start";
  a.args = {"f1", "m1"};
  a.preconditions = {{{"handfree", {}}, false}, {{"light", {"m1"}}, false}};
  a.del_effects = {{"handfree", {}}};

  State s = {{"light", {"m1"}}, {"handfree", {}}};
  ApplyResult r = apply_classical(s, a);
  ASSERT_TRUE(r.applicable);
  State expect = {{"light", {"m1"}}};
  EXPECT_EQ(r.state, expect);

  State missing = {{"light", {"m1"}}};
  ApplyResult r2 = apply_classical(missing, a);
  EXPECT_FALSE(r2.applicable);
  ASSERT_TRUE(r2.violated.has_value());
  EXPECT_EQ(r2.violated->atom.predicate, "handfree");
}

TEST(Model, NegatedPreconditionUsesAbsence) {
  GroundAction a;
  a.op = "probe";
  a.preconditions = {{{"busy", {}}, true}};
  EXPECT_TRUE(apply_classical(State{}, a).applicable);
  EXPECT_FALSE(apply_classical(State{{"busy", {}}}, a).applicable);
}

TEST(Model, GroundEnumeratesTypeConsistentTuples) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
  std::vector<TypedObject> objects = {{"m1", "match"}, {"f1", "fuse"}};
  auto actions = ground(d, objects);
  // light(m1) and mend(f1 m1): argument types forbid any other tuple.
  ASSERT_EQ(actions.size(), 2u);
  EXPECT_EQ(actions[0].op, "light");
  EXPECT_EQ(actions[0].args, std::vector<std::string>{"m1"});
  EXPECT_EQ(actions[1].op, "mend");
  EXPECT_EQ(actions[1].args, (std::vector<std::string>{"f1", "m1"}));
  EXPECT_EQ(actions[1].duration, Rational(2));
  // Grounded condition slots carry bound arguments.
  ASSERT_EQ(actions[1].pre_overall.size(), 1u);
  EXPECT_EQ(actions[1].pre_overall[0].atom.args, std::vector<std::string>{"m1"});
}

TEST(Model, GroundHonorsArityGrowth) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
  std::vector<TypedObject> objects = {
      {"m1", "match"}, {"m2", "match"}, {"f1", "fuse"}, {"f2", "fuse"}};
  auto actions = ground(d, objects);
  // 2 light instances + 2*2 mend instances.
  EXPECT_EQ(actions.size(), 6u);
}

TEST(Model, LiftedAtomUniversePerOperator) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
  const DurativeOperator* mend = d.find("mend");
  ASSERT_NE(mend, nullptr);
  // Over (?f - fuse, ?m - match): handfree, unused ?m, light ?m, mended ?f.
  auto atoms = lifted_atom_universe(d.predicates, mend->params, d.types);
  EXPECT_EQ(atoms.size(), 4u);
  const DurativeOperator* light = d.find("light");
  ASSERT_NE(light, nullptr);
  // mended needs a fuse parameter light does not have, so only 3 atoms.
  auto light_atoms = lifted_atom_universe(d.predicates, light->params, d.types);
  EXPECT_EQ(light_atoms.size(), 3u);
}

TEST(Model, TypeTreeSubtyping) {
  TypeTree t;
  t.add("vehicle", "object");
  t.add("truck", "vehicle");
  EXPECT_TRUE(t.is_subtype("truck", "object"));
  EXPECT_TRUE(t.is_subtype("truck", "vehicle"));
  EXPECT_TRUE(t.is_subtype("truck", "truck"));
  EXPECT_FALSE(t.is_subtype("vehicle", "truck"));
}

TEST(Model, ObserveFullyMarksComplement) {
  std::vector<Atom> universe = {{"p", {}}, {"q", {}}, {"r", {}}};
  State s = {{"p", {}}};
  ObservedState o = observe_fully(s, universe);
  EXPECT_TRUE(o.observed({"p", {}}));
  EXPECT_TRUE(o.value({"p", {}}));
  EXPECT_TRUE(o.observed({"q", {}}));
  EXPECT_FALSE(o.value({"q", {}}));
  EXPECT_EQ(o.known_false.size(), 2u);
}

// ------------------------------------------------------------------- pddl

TEST(Pddl, ParsesBundledMatchDomain) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
  EXPECT_EQ(d.name, "match");
  EXPECT_EQ(d.predicates.size(), 4u);
  ASSERT_EQ(d.operators.size(), 2u);

  const DurativeOperator* mend = d.find("mend");
  ASSERT_NE(mend, nullptr);
  EXPECT_EQ(mend->duration, Rational(2));
  ASSERT_EQ(mend->params.size(), 2u);
  EXPECT_EQ(mend->params[0].type, "fuse");
  EXPECT_EQ(mend->params[1].type, "match");
  ASSERT_EQ(mend->pre_start.size(), 1u);
  EXPECT_EQ(mend->pre_start[0].atom.predicate, "handfree");
  ASSERT_EQ(mend->pre_overall.size(), 1u);
  EXPECT_EQ(mend->pre_overall[0].atom.predicate, "light");
  EXPECT_TRUE(mend->pre_end.empty());
  ASSERT_EQ(mend->del_start.size(), 1u);
  EXPECT_EQ(mend->del_start[0].predicate, "handfree");
  EXPECT_EQ(mend->add_end.size(), 2u);
  EXPECT_TRUE(mend->add_start.empty());
  EXPECT_TRUE(mend->del_end.empty());

  const DurativeOperator* light = d.find("light");
  ASSERT_NE(light, nullptr);
  EXPECT_EQ(light->duration, Rational(5));
  ASSERT_EQ(light->add_start.size(), 1u);
  EXPECT_EQ(light->add_start[0].predicate, "light");
  ASSERT_EQ(light->del_end.size(), 1u);
  EXPECT_EQ(light->del_end[0].predicate, "light");
}

TEST(Pddl, ParsesProblemObjectsAndInit) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
  Problem p = parse_problem(slurp(kDataDir + "/match_p1.pddl"), d);
  EXPECT_EQ(p.objects.size(), 3u);
  EXPECT_EQ(p.init.size(), 2u);
  EXPECT_EQ(p.init.count({"handfree", {}}), 1u);
  EXPECT_EQ(p.init.count({"unused", {"m1"}}), 1u);
  EXPECT_EQ(p.goal.size(), 2u);
}

TEST(Pddl, EmptyInitIsEmptyState) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/shuttle.pddl"));
  Problem p = parse_problem(
      "(define (problem empty) (:domain shuttle)"
      " (:objects l1 - location) (:init) (:goal (and)))",
      d);
  EXPECT_TRUE(p.init.empty());
}

TEST(Pddl, UnknownInitPredicateNamesIt) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/shuttle.pddl"));
  try {
    parse_problem(
        "(define (problem bad) (:domain shuttle)"
        " (:objects l1 - location) (:init (flying l1)) (:goal (and)))",
        d);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("flying"), std::string::npos);
  }
}

TEST(Pddl, PrintParseRoundTripIsIdentity) {
  for (const char* file : {"/match.pddl", "/shuttle.pddl"}) {
    TemporalDomain d = parse_temporal_domain(slurp(kDataDir + file));
    std::string once = print_temporal_domain(d);
    TemporalDomain d2 = parse_temporal_domain(once);
    EXPECT_EQ(print_temporal_domain(d2), once) << file;
    EXPECT_TRUE(d == d2) << file;
  }
}

TEST(Pddl, ProblemRoundTripKeepsGoalAndInit) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
  Problem p = parse_problem(slurp(kDataDir + "/match_p1.pddl"), d);
  std::string once = print_problem(p, d.name);
  Problem p2 = parse_problem(once, d);
  EXPECT_EQ(print_problem(p2, d.name), once);
  EXPECT_EQ(p2.init, p.init);
  EXPECT_EQ(p2.goal.size(), p.goal.size());
}

TEST(Pddl, RejectsConstructsOutsideTheSubset) {
  // Duration inequalities and numeric fluents are rejected, never dropped.
  std::string ineq =
      "(define (domain bad) (:requirements :durative-actions)"
      " (:predicates (p))"
      " (:durative-action a :parameters ()"
      "  :duration (<= ?duration 5)"
      "  :condition (and) :effect (and (at start (p)))))";
  EXPECT_THROW(parse_temporal_domain(ineq), ParseError);

  std::string fluents =
      "(define (domain bad2) (:requirements :durative-actions :fluents)"
      " (:predicates (p)))";
  EXPECT_THROW(parse_temporal_domain(fluents), ParseError);
}

TEST(Pddl, RejectsDurativeActionWithoutDuration) {
  std::string text =
      "(define (domain bad) (:requirements :durative-actions)"
      " (:predicates (p))"
      " (:durative-action a :parameters ()"
      "  :condition (and) :effect (and (at start (p)))))";
  EXPECT_THROW(parse_temporal_domain(text), ParseError);
}

TEST(Pddl, RejectsOverAllEffect) {
  std::string text =
      "(define (domain bad) (:requirements :durative-actions)"
      " (:predicates (p))"
      " (:durative-action a :parameters ()"
      "  :duration (= ?duration 1)"
      "  :condition (and) :effect (and (over all (p)))))";
  EXPECT_THROW(parse_temporal_domain(text), ParseError);
}

TEST(Pddl, ClassicalDomainRoundTrip) {
  Domain d;
  d.name = "tiny";
  d.types.add("loc", "object");
  PredicateSchema at;
  at.name = "at";
  at.param_names = {"?l"};
  at.param_types = {"loc"};
  d.predicates = {at};
  ClassicalOperator op;
  op.name = "hop-start";
  op.params = {{"?a", "loc"}, {"?b", "loc"}};
  op.preconditions = {{{"at", {"?a"}}, false}};
  op.add_effects = {{"at", {"?b"}}};
  op.del_effects = {{"at", {"?a"}}};
  op.canonicalize();
  d.operators.push_back(op);
  std::string once = print_classical_domain(d);
  Domain d2 = parse_classical_domain(once);
  EXPECT_EQ(print_classical_domain(d2), once);
  ASSERT_EQ(d2.operators.size(), 1u);
  EXPECT_TRUE(d2.operators[0] == d.operators[0]);
}

TEST(Pddl, TypeErrorsInProblemObjectsAreCaught) {
  TemporalDomain d = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
  EXPECT_THROW(parse_problem(
                   "(define (problem bad) (:domain match)"
                   " (:objects x - widget) (:init) (:goal (and)))",
                   d),
               ParseError);
}
