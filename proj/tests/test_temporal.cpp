#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tempolearn/convert.hpp"
#include "tempolearn/dfa.hpp"
#include "tempolearn/induce.hpp"
#include "tempolearn/pddl.hpp"
#include "tempolearn/refine.hpp"
#include "tempolearn/simulate.hpp"
#include "tempolearn/temporal.hpp"

using namespace tempolearn;

namespace {

const std::string kDataDir = TEMPOLEARN_DATA_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Fixture {
  TemporalDomain domain;
  Problem problem;
  std::vector<Atom> universe;
  std::map<std::string, GroundDurative> by_key;

  Fixture() {
    domain = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
    problem = parse_problem(slurp(kDataDir + "/match_p1.pddl"), domain);
    universe =
        ground_atom_universe(domain.predicates, problem.objects, domain.types);
    for (const auto& a : ground(domain, problem.objects)) {
      std::string key = a.op;
      for (const auto& arg : a.args) key += " " + arg;
      by_key[key] = a;
    }
  }

  TemporalTrace trace(const TemporalSequence& seq) {
    return simulate(seq, problem.init, universe);
  }
};

DurativeOperator base_op() {
  DurativeOperator op;
  op.name = "probe";
  op.duration = Rational(1);
  return op;
}

Atom P() { return {"p", {}}; }
Atom Q() { return {"q", {}}; }

bool has_overall(const DurativeOperator& op, const std::string& pred) {
  return std::any_of(op.pre_overall.begin(), op.pre_overall.end(),
                     [&](const Literal& l) { return l.atom.predicate == pred; });
}

}  // namespace

// ------------------------------------------------------------ constraints

TEST(Constraints, TruthDomainsAreWellFormed) {
  for (const char* file : {"/match.pddl", "/shuttle.pddl"}) {
    TemporalDomain d = parse_temporal_domain(slurp(kDataDir + file));
    for (const auto& op : d.operators) EXPECT_TRUE(satisfies_constraints(op)) << op.name;
  }
}

TEST(Constraints, EachViolationIsDetectedAndRepaired) {
  struct Case {
    const char* label;
    void (*build)(DurativeOperator&);
    void (*check_repaired)(const DurativeOperator&);
  };
  const Case cases[] = {
      {"overall condition re-added at start",
       [](DurativeOperator& op) {
         op.pre_overall = {{P(), false}};
         op.add_start = {P()};
       },
       [](const DurativeOperator& op) {
         EXPECT_EQ(op.pre_overall.size(), 1u);
         EXPECT_TRUE(op.add_start.empty());
       }},
      {"overall condition re-added at end",
       [](DurativeOperator& op) {
         op.pre_overall = {{P(), false}};
         op.add_end = {P()};
       },
       [](const DurativeOperator& op) { EXPECT_TRUE(op.add_end.empty()); }},
      {"start condition re-added at start",
       [](DurativeOperator& op) {
         op.pre_start = {{P(), false}};
         op.add_start = {P()};
       },
       [](const DurativeOperator& op) {
         EXPECT_EQ(op.pre_start.size(), 1u);
         EXPECT_TRUE(op.add_start.empty());
       }},
      {"end condition re-added at end",
       [](DurativeOperator& op) {
         op.pre_end = {{P(), false}};
         op.add_end = {P()};
       },
       [](const DurativeOperator& op) { EXPECT_TRUE(op.add_end.empty()); }},
      {"start add and start delete clash",
       [](DurativeOperator& op) {
         op.add_start = {P()};
         op.del_start = {P()};
       },
       [](const DurativeOperator& op) {
         EXPECT_EQ(op.add_start, std::vector<Atom>{P()});
         EXPECT_TRUE(op.del_start.empty());
       }},
      {"end add and end delete clash",
       [](DurativeOperator& op) {
         op.add_end = {P()};
         op.del_end = {P()};
       },
       [](const DurativeOperator& op) {
         EXPECT_EQ(op.add_end, std::vector<Atom>{P()});
         EXPECT_TRUE(op.del_end.empty());
       }},
      {"start delete removes an overall condition",
       [](DurativeOperator& op) {
         op.pre_overall = {{P(), false}};
         op.del_start = {P()};
       },
       [](const DurativeOperator& op) {
         EXPECT_EQ(op.pre_overall.size(), 1u);
         EXPECT_TRUE(op.del_start.empty());
       }},
      {"start delete removes an end condition",
       [](DurativeOperator& op) {
         op.pre_end = {{P(), false}};
         op.del_start = {P()};
       },
       [](const DurativeOperator& op) { EXPECT_TRUE(op.del_start.empty()); }},
      {"same atom added at start and end",
       [](DurativeOperator& op) {
         op.add_start = {P()};
         op.add_end = {P()};
       },
       [](const DurativeOperator& op) {
         // The at-start copy carries the earlier evidence and survives.
         EXPECT_EQ(op.add_start, std::vector<Atom>{P()});
         EXPECT_TRUE(op.add_end.empty());
       }},
      {"same atom deleted at start and end",
       [](DurativeOperator& op) {
         op.del_start = {P()};
         op.del_end = {P()};
       },
       [](const DurativeOperator& op) {
         EXPECT_EQ(op.del_start, std::vector<Atom>{P()});
         EXPECT_TRUE(op.del_end.empty());
       }},
  };
  for (const auto& c : cases) {
    DurativeOperator op = base_op();
    c.build(op);
    op.canonicalize();
    EXPECT_FALSE(satisfies_constraints(op)) << c.label;
    repair_constraints(op);
    EXPECT_TRUE(satisfies_constraints(op)) << c.label;
    c.check_repaired(op);
  }
}

TEST(Constraints, NegatedConditionsDoNotCount) {
  DurativeOperator op = base_op();
  op.pre_overall = {{P(), true}};  // (not (p)) over all
  op.add_start = {P()};
  op.canonicalize();
  EXPECT_TRUE(satisfies_constraints(op));
}

TEST(Constraints, RepairKeepsWellFormedOperatorsIntact) {
  Fixture fx;
  for (const auto& op : fx.domain.operators) {
    DurativeOperator copy = op;
    repair_constraints(copy);
    EXPECT_TRUE(copy == op) << op.name;
  }
}

// ------------------------------------------------------------------ lift

TEST(Lift, SharedPreconditionsBecomeTheOverAllSlot) {
  Domain classical;
  classical.name = "tiny";
  PredicateSchema a{"a", {}, {}}, o{"o", {}, {}}, e{"e", {}, {}}, x{"x", {}, {}},
      y{"y", {}, {}};
  classical.predicates = {a, o, e, x, y};
  ClassicalOperator s;
  s.name = "probe-start";
  s.preconditions = {{{"a", {}}, false}, {{"o", {}}, false}};
  s.add_effects = {{"x", {}}};
  s.canonicalize();
  ClassicalOperator en;
  en.name = "probe-end";
  en.preconditions = {{{"e", {}}, false}, {{"o", {}}, false}};
  en.add_effects = {{"y", {}}};
  en.canonicalize();
  classical.operators = {s, en};

  TemporalDomain vocab;
  vocab.name = "tiny";
  vocab.predicates = classical.predicates;
  DurativeOperator probe = base_op();
  probe.duration = Rational(3);
  vocab.operators = {probe};

  TemporalDomain lifted = lift_to_temporal(classical, vocab);
  ASSERT_EQ(lifted.operators.size(), 1u);
  const DurativeOperator& op = lifted.operators[0];
  EXPECT_EQ(op.duration, Rational(3));
  ASSERT_EQ(op.pre_start.size(), 1u);
  EXPECT_EQ(op.pre_start[0].atom.predicate, "a");
  ASSERT_EQ(op.pre_overall.size(), 1u);
  EXPECT_EQ(op.pre_overall[0].atom.predicate, "o");
  ASSERT_EQ(op.pre_end.size(), 1u);
  EXPECT_EQ(op.pre_end[0].atom.predicate, "e");
  ASSERT_EQ(op.add_start.size(), 1u);
  EXPECT_EQ(op.add_start[0].predicate, "x");
  ASSERT_EQ(op.add_end.size(), 1u);
  EXPECT_EQ(op.add_end[0].predicate, "y");
}

TEST(Lift, SplitThenLiftIsIdentityOnTheTruthDomains) {
  for (const char* file : {"/match.pddl", "/shuttle.pddl"}) {
    TemporalDomain d = parse_temporal_domain(slurp(kDataDir + file));
    TemporalDomain back = lift_to_temporal(split_to_classical(d), d);
    ASSERT_EQ(back.operators.size(), d.operators.size()) << file;
    for (std::size_t i = 0; i < d.operators.size(); ++i)
      EXPECT_TRUE(back.operators[i] == d.operators[i]) << d.operators[i].name;
    EXPECT_EQ(print_temporal_domain(back), print_temporal_domain(d)) << file;
  }
}

TEST(Lift, MissingEndOperatorThrows) {
  Fixture fx;
  Domain classical = split_to_classical(fx.domain);
  classical.operators.pop_back();  // drop mend-end
  EXPECT_THROW(lift_to_temporal(classical, fx.domain), std::invalid_argument);
}

TEST(Lift, EndpointCoincidentAtomLandsInTheOverAllSlot) {
  // Learned from the single fully observed trace, handfree happens to hold
  // both before every light start and before every light end, so the lift
  // places it in light's over-all slot. This is exactly the spurious
  // invariant the temporal refinement stage later has to remove.
  Fixture fx;
  TemporalTrace t = fx.trace(
      {{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(1)}});
  EventSequence image = convert_positive(t);
  PtaResult pta = build_pta({image}, {});
  Labels labels = compute_labels(pta.dfa, {image});
  Domain induced = induce_operators(fx.domain, pta.dfa, labels, false).domain;
  TemporalDomain lifted = lift_to_temporal(induced, fx.domain);

  const DurativeOperator* light = lifted.find("light");
  ASSERT_NE(light, nullptr);
  EXPECT_TRUE(has_overall(*light, "handfree"));
  // The true over-all of mend is recovered from the same data.
  const DurativeOperator* mend = lifted.find("mend");
  ASSERT_NE(mend, nullptr);
  EXPECT_TRUE(has_overall(*mend, "light"));
  ASSERT_EQ(mend->pre_start.size(), 1u);
  EXPECT_EQ(mend->pre_start[0].atom.predicate, "handfree");
  EXPECT_TRUE(mend->pre_end.empty());
}

// ------------------------------------------------------- temporal fitness

TEST(TemporalAccepts, RegroundsUnderTheCandidateDomain) {
  Fixture fx;
  TemporalSequence ok = {{fx.by_key["light m1"], Rational(0)},
                         {fx.by_key["mend f1 m1"], Rational(2)}};
  TemporalSequence late = {{fx.by_key["light m1"], Rational(0)},
                           {fx.by_key["mend f1 m1"], Rational(4)}};
  EXPECT_TRUE(temporal_accepts(fx.domain, ok, fx.problem.init));
  EXPECT_FALSE(temporal_accepts(fx.domain, late, fx.problem.init));

  // A candidate without mend's over-all accepts the late mend as well: the
  // grounding comes from the candidate, not from the recorded actions.
  TemporalDomain no_overall = fx.domain;
  for (auto& op : no_overall.operators)
    if (op.name == "mend") op.pre_overall.clear();
  EXPECT_TRUE(temporal_accepts(no_overall, late, fx.problem.init));
}

TEST(TemporalFitnessJT, ExactFractionsAndEmptyCorpusConvention) {
  Fixture fx;
  TemporalTrace pos = fx.trace(
      {{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(2)}});
  TemporalTrace neg = fx.trace(
      {{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(4)}});
  ASSERT_TRUE(pos.feasible);
  ASSERT_FALSE(neg.feasible);

  TemporalFitness perfect = fitness_JT(fx.domain, {pos}, {neg});
  EXPECT_DOUBLE_EQ(perfect.jt_plus, 1.0);
  EXPECT_DOUBLE_EQ(perfect.jt_minus, 1.0);
  EXPECT_DOUBLE_EQ(perfect.total, 1.0);

  // Without the over-all, the negative replays fine and only jt_minus
  // suffers.
  TemporalDomain no_overall = fx.domain;
  for (auto& op : no_overall.operators)
    if (op.name == "mend") op.pre_overall.clear();
  TemporalFitness weak = fitness_JT(no_overall, {pos}, {neg});
  EXPECT_DOUBLE_EQ(weak.jt_plus, 1.0);
  EXPECT_DOUBLE_EQ(weak.jt_minus, 0.0);
  EXPECT_DOUBLE_EQ(weak.total, 0.5);

  // Empty corpora contribute their component as 1.
  TemporalFitness empty = fitness_JT(fx.domain, {}, {});
  EXPECT_DOUBLE_EQ(empty.jt_plus, 1.0);
  EXPECT_DOUBLE_EQ(empty.jt_minus, 1.0);
  EXPECT_DOUBLE_EQ(empty.total, 1.0);
  TemporalFitness no_negs = fitness_JT(no_overall, {pos}, {});
  EXPECT_DOUBLE_EQ(no_negs.jt_minus, 1.0);
  EXPECT_DOUBLE_EQ(no_negs.total, 1.0);
}

TEST(TemporalFitnessJT, NegativeInexpressibleClassicallyIsCaughtTemporally) {
  // The late mend breaks an interval constraint: its event image replays
  // fine under the split classical operators, so only the temporal replay
  // can reject it.
  Fixture fx;
  TemporalTrace neg = fx.trace(
      {{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(4)}});
  ASSERT_FALSE(neg.feasible);
  EventSequence neg_image = convert_negative(neg);

  Domain classical = split_to_classical(fx.domain);
  FitnessBreakdown f = fitness_J(classical, {}, {neg_image});
  EXPECT_EQ(f.j_minus, 0);  // classically executable prefix

  TemporalFitness jt = fitness_JT(fx.domain, {}, {neg});
  EXPECT_DOUBLE_EQ(jt.jt_minus, 1.0);  // temporally rejected
}

// --------------------------------------------------------- neighborhood

TEST(Neighborhood, AllNeighborsSatisfyTheConstraints) {
  Fixture fx;
  auto neighbors = temporal_neighborhood(fx.domain);
  ASSERT_FALSE(neighbors.empty());
  for (const auto& nd : neighbors)
    for (const auto& op : nd.operators) EXPECT_TRUE(satisfies_constraints(op)) << op.name;
}

TEST(Neighborhood, ExcludesTheKnownViolator) {
  // Adding (over all (light ?m)) to light would re-add its own start
  // effect; no neighbor may contain it.
  Fixture fx;
  auto neighbors = temporal_neighborhood(fx.domain);
  for (const auto& nd : neighbors) {
    const DurativeOperator* light = nd.find("light");
    ASSERT_NE(light, nullptr);
    EXPECT_FALSE(has_overall(*light, "light"));
  }
}

TEST(Neighborhood, ContainsTheOverAllRemovalMove) {
  Fixture fx;
  auto neighbors = temporal_neighborhood(fx.domain);
  bool found = false;
  for (const auto& nd : neighbors) {
    const DurativeOperator* mend = nd.find("mend");
    const DurativeOperator* light = nd.find("light");
    if (mend->pre_overall.empty() && *light == *fx.domain.find("light")) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(Neighborhood, EveryNeighborDiffersInExactlyOneOperator) {
  Fixture fx;
  for (const auto& nd : temporal_neighborhood(fx.domain)) {
    int changed = 0;
    for (const auto& op : nd.operators)
      if (!(op == *fx.domain.find(op.name))) ++changed;
    EXPECT_EQ(changed, 1);
  }
}

// ------------------------------------------------------------------ tabu

TEST(TemporalTabu, PerfectInputReturnsTheInputUnchanged) {
  Fixture fx;
  std::vector<TemporalTrace> pos = {
      fx.trace({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(2)}})};
  std::vector<TemporalTrace> neg = {
      fx.trace({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(4)}})};
  TemporalDomain out = temporal_tabu(fx.domain, pos, neg);
  EXPECT_TRUE(out == fx.domain);
  EXPECT_EQ(print_temporal_domain(out), print_temporal_domain(fx.domain));
}

TEST(TemporalTabu, RemovesASpuriousOverAllInvariant) {
  Fixture fx;
  TemporalDomain junk = fx.domain;
  for (auto& op : junk.operators)
    if (op.name == "light") op.pre_overall.push_back({{"handfree", {}}, false});
  for (auto& op : junk.operators) op.canonicalize();
  ASSERT_TRUE(satisfies_constraints(*junk.find("light")));

  // Positives with a mend inside the light break the junk invariant (the
  // mend start deletes handfree while the light interval is open).
  std::vector<TemporalTrace> pos = {
      fx.trace({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(2)}}),
      fx.trace({{fx.by_key["light m1"], Rational(0)},
                {fx.by_key["mend f1 m1"], Rational(1, 2)},
                {fx.by_key["mend f2 m1"], Rational(13, 5)}})};
  std::vector<TemporalTrace> neg = {
      fx.trace({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(4)}})};
  for (const auto& t : pos) ASSERT_TRUE(t.feasible);

  TemporalFitness before = fitness_JT(junk, pos, neg);
  EXPECT_LT(before.total, 1.0);

  TemporalDomain out = temporal_tabu(junk, pos, neg);
  TemporalFitness after = fitness_JT(out, pos, neg);
  EXPECT_DOUBLE_EQ(after.total, 1.0);
  EXPECT_FALSE(has_overall(*out.find("light"), "handfree"));
  EXPECT_EQ(print_temporal_domain(out), print_temporal_domain(fx.domain));
}

TEST(TemporalTabu, NeverReturnsSomethingWorseThanTheInput) {
  Fixture fx;
  // A corpus only of infeasible traces that the input already rejects:
  // nothing can improve, and the input must come back unchanged.
  std::vector<TemporalTrace> neg = {
      fx.trace({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(4)}}),
      fx.trace({{fx.by_key["mend f1 m1"], Rational(0)}})};
  TemporalDomain out = temporal_tabu(fx.domain, {}, neg);
  EXPECT_TRUE(out == fx.domain);
}

TEST(TemporalTabu, DeterministicAcrossRuns) {
  Fixture fx;
  TemporalDomain junk = fx.domain;
  for (auto& op : junk.operators)
    if (op.name == "light") op.pre_overall.push_back({{"handfree", {}}, false});
  for (auto& op : junk.operators) op.canonicalize();
  std::vector<TemporalTrace> pos = {
      fx.trace({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(2)}})};
  std::vector<TemporalTrace> neg = {
      fx.trace({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(4)}})};
  TemporalDomain a = temporal_tabu(junk, pos, neg);
  TemporalDomain b = temporal_tabu(junk, pos, neg);
  EXPECT_EQ(print_temporal_domain(a), print_temporal_domain(b));
}
