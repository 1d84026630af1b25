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

  explicit Fixture(const std::string& problem_file = "match_p1.pddl") {
    domain = parse_temporal_domain(slurp(kDataDir + "/match.pddl"));
    problem = parse_problem(slurp(kDataDir + "/" + problem_file), domain);
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

  EventSequence image(const TemporalSequence& seq) {
    TemporalTrace t = trace(seq);
    return t.feasible ? convert_positive(t) : convert_negative(t);
  }
};

// The event operators induced from the fully observed single trace
// {(0, light m1), (1, mend f1 m1)}.
struct Induced {
  EventSequence image;
  PtaResult pta;
  Labels labels;
  Domain domain;

  explicit Induced(Fixture& fx) {
    image = fx.image(
        {{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(1)}});
    pta = build_pta({image}, {});
    labels = compute_labels(pta.dfa, {image});
    domain = induce_operators(fx.domain, pta.dfa, labels, false).domain;
  }
};

ClassicalOperator* find_mut(Domain& d, const std::string& name) {
  for (auto& op : d.operators)
    if (op.name == name) return &op;
  return nullptr;
}

}  // namespace

TEST(Fitness, ExactBreakdownOnFullyObservedTrace) {
  Fixture fx;
  Induced ind(fx);
  FitnessBreakdown f = fitness_J(ind.domain, {ind.image}, {});
  // Hand-computed over the 5-atom ground universe and the 4-event image:
  // preconditions match the observed pre-states atom by atom (2+2+1+2),
  // predicted successors match every observed bit (5 per step), and the
  // closed-world replay runs end to end (length 4).
  EXPECT_EQ(f.accept, 7);
  EXPECT_EQ(f.reject, 0);
  EXPECT_EQ(f.equal, 20);
  EXPECT_EQ(f.different, 0);
  EXPECT_EQ(f.j_plus, 4);
  EXPECT_EQ(f.j_minus, 0);
  EXPECT_EQ(f.total(), 31);
}

TEST(Fitness, RejectedNegativeCountsOnce) {
  Fixture fx;
  Induced ind(fx);
  EventSequence neg =
      fx.image({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["light m1"], Rational(1)}});
  ASSERT_FALSE(neg.positive);
  FitnessBreakdown f = fitness_J(ind.domain, {ind.image}, {neg});
  EXPECT_EQ(f.j_minus, 1);
  EXPECT_EQ(f.total(), 32);

  // Dropping the busy-match guard lets the replay run through the negative:
  // exactly that one point is lost, plus the one precondition agreement.
  Domain weak = ind.domain;
  ClassicalOperator* ls = find_mut(weak, "light-start");
  ls->preconditions.erase(
      std::remove_if(ls->preconditions.begin(), ls->preconditions.end(),
                     [](const Literal& l) { return l.atom.predicate == "unused"; }),
      ls->preconditions.end());
  FitnessBreakdown g = fitness_J(weak, {ind.image}, {neg});
  EXPECT_EQ(g.j_minus, 0);
  EXPECT_EQ(g.accept, 6);
  EXPECT_EQ(g.total(), 30);
}

TEST(Fitness, WrongEffectShowsUpAsDifferent) {
  Fixture fx;
  Induced ind(fx);
  Domain wrong = ind.domain;
  // Claim the fuse is already mended when the mend begins: contradicted by
  // the observed successor of start(mend), where (mended f1) is still false.
  find_mut(wrong, "mend-start")->add_effects.push_back({"mended", {"?f"}});
  find_mut(wrong, "mend-start")->canonicalize();
  FitnessBreakdown f = fitness_J(wrong, {ind.image}, {});
  EXPECT_EQ(f.accept, 7);
  // One predicted-true bit (mended f1) lands on an observed-false bit at
  // the successor of the mend start; every later prediction restarts from
  // the observed state, so the remaining steps are untouched.
  EXPECT_EQ(f.different, 1);
  EXPECT_EQ(f.equal, 19);  // the observed-false agreement it displaced
  EXPECT_EQ(f.j_plus, 4);  // replay still runs
  EXPECT_EQ(f.total(), 29);
}

TEST(Fitness, UnsatisfiedPreconditionRejectsAndBreaksReplay) {
  Fixture fx;
  Induced ind(fx);
  // A precondition over an atom never observed in the samples neither
  // accepts nor rejects, but it does break the closed-world replay.
  Domain stranger = ind.domain;
  ClassicalOperator* ms = find_mut(stranger, "mend-start");
  ms->preconditions.push_back({{"mended", {"?f"}}, false});
  ms->canonicalize();
  FitnessBreakdown f = fitness_J(stranger, {ind.image}, {});
  // mended f1 is observed false before the mend start: one rejection.
  EXPECT_EQ(f.reject, 1);
  EXPECT_EQ(f.accept, 7);
  // The replay stops at the mend start: only j_plus is forfeited.
  EXPECT_EQ(f.j_plus, 0);
  EXPECT_EQ(f.total(), 26);
}

// ------------------------------------------------------------------ repair

TEST(RefineEffects, RestoresAnUnobservedAddEffect) {
  Fixture fx;
  // Trace A hides handfree in the state right after its mend ends; trace B
  // (other fuse order) is fully observed. Induction then sees no always-true
  // handfree after a mend end, so the add effect is missing, while both
  // visible pre-states keep handfree as a mend-start precondition.
  TemporalTrace ta = fx.trace(
      {{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(1)}});
  ASSERT_TRUE(ta.feasible);
  ta.states[3].known_true.erase({"handfree", {}});
  EventSequence a = convert_positive(ta);

  EventSequence b = fx.image({{fx.by_key["light m1"], Rational(0)},
                              {fx.by_key["mend f2 m1"], Rational(1, 2)},
                              {fx.by_key["mend f1 m1"], Rational(13, 5)}});
  ASSERT_TRUE(b.positive);

  PtaResult pta = build_pta({a, b}, {});
  Labels labels = compute_labels(pta.dfa, {a, b});
  Domain induced = induce_operators(fx.domain, pta.dfa, labels, false).domain;

  const ClassicalOperator* me = induced.find("mend-end");
  ASSERT_NE(me, nullptr);
  EXPECT_FALSE(std::any_of(me->add_effects.begin(), me->add_effects.end(),
                           [](const Atom& x) { return x.predicate == "handfree"; }));
  const ClassicalOperator* ms = induced.find("mend-start");
  EXPECT_TRUE(std::any_of(ms->preconditions.begin(), ms->preconditions.end(),
                          [](const Literal& l) { return l.atom.predicate == "handfree"; }));

  // The automaton demands a second mend start after a mend end; the repair
  // reinstates handfree as a mend-end add effect.
  Domain repaired = refine_effects(induced, pta.dfa, labels);
  const ClassicalOperator* rme = repaired.find("mend-end");
  EXPECT_TRUE(std::any_of(rme->add_effects.begin(), rme->add_effects.end(),
                          [](const Atom& x) { return x.predicate == "handfree"; }));
  // Nothing is ever removed by the repair.
  for (const auto& op : induced.operators) {
    const ClassicalOperator* rop = repaired.find(op.name);
    for (const auto& l : op.preconditions)
      EXPECT_TRUE(std::find(rop->preconditions.begin(), rop->preconditions.end(), l) !=
                  rop->preconditions.end());
    for (const auto& x : op.add_effects)
      EXPECT_TRUE(std::find(rop->add_effects.begin(), rop->add_effects.end(), x) !=
                  rop->add_effects.end());
    for (const auto& x : op.del_effects)
      EXPECT_TRUE(std::find(rop->del_effects.begin(), rop->del_effects.end(), x) !=
                  rop->del_effects.end());
  }
}

TEST(RefineEffects, NoOpWhenEverythingExecutes) {
  Fixture fx;
  Induced ind(fx);
  Domain repaired = refine_effects(ind.domain, ind.pta.dfa, ind.labels);
  EXPECT_EQ(print_classical_domain(repaired), print_classical_domain(ind.domain));
}

TEST(RefineEffects, ObservedFalseBlocksTheRepair) {
  Fixture fx;
  // Same setup as the restore case, but trace A *shows* handfree false
  // after the mend end instead of hiding it. The repair must refuse to add
  // an effect contradicted by an observation.
  TemporalTrace ta = fx.trace(
      {{fx.by_key["light m1"], Rational(0)}, {fx.by_key["mend f1 m1"], Rational(1)}});
  ASSERT_TRUE(ta.feasible);
  ta.states[3].known_true.erase({"handfree", {}});
  ta.states[3].known_false.insert({"handfree", {}});
  EventSequence a = convert_positive(ta);
  EventSequence b = fx.image({{fx.by_key["light m1"], Rational(0)},
                              {fx.by_key["mend f2 m1"], Rational(1, 2)},
                              {fx.by_key["mend f1 m1"], Rational(13, 5)}});

  PtaResult pta = build_pta({a, b}, {});
  Labels labels = compute_labels(pta.dfa, {a, b});
  Domain induced = induce_operators(fx.domain, pta.dfa, labels, false).domain;
  Domain repaired = refine_effects(induced, pta.dfa, labels);
  const ClassicalOperator* rme = repaired.find("mend-end");
  EXPECT_FALSE(std::any_of(rme->add_effects.begin(), rme->add_effects.end(),
                           [](const Atom& x) { return x.predicate == "handfree"; }));
}

TEST(RefinePreconditions, DeleteImpliesPositivePrecondition) {
  Domain d;
  d.name = "tiny";
  PredicateSchema p;
  p.name = "p";
  PredicateSchema q;
  q.name = "q";
  d.predicates = {p, q};
  ClassicalOperator op;
  op.name = "wipe-start";
  op.del_effects = {{"p", {}}};
  op.add_effects = {{"q", {}}};
  op.canonicalize();
  d.operators.push_back(op);

  Domain out = refine_preconditions(d);
  const ClassicalOperator* r = out.find("wipe-start");
  ASSERT_EQ(r->preconditions.size(), 1u);
  EXPECT_EQ(r->preconditions[0].atom.predicate, "p");
  EXPECT_FALSE(r->preconditions[0].negated);
  // Idempotent: running it again changes nothing.
  Domain again = refine_preconditions(out);
  EXPECT_EQ(print_classical_domain(again), print_classical_domain(out));
}

// ------------------------------------------------------------------- tabu

TEST(Tabu, NeverWorsensAndStaysDeterministic) {
  Fixture fx;
  Induced ind(fx);
  std::vector<EventSequence> pos = {
      ind.image, fx.image({{fx.by_key["light m1"], Rational(0)},
                           {fx.by_key["mend f2 m1"], Rational(1, 2)},
                           {fx.by_key["mend f1 m1"], Rational(13, 5)}})};
  std::vector<EventSequence> neg = {
      fx.image({{fx.by_key["light m1"], Rational(0)}, {fx.by_key["light m1"], Rational(1)}}),
      fx.image({{fx.by_key["mend f1 m1"], Rational(0)}})};
  for (const auto& n : neg) ASSERT_FALSE(n.positive);

  TabuConfig cfg;
  cfg.iterations = 40;
  Domain out1 = tabu_search_classical(ind.domain, pos, neg, cfg);
  Domain out2 = tabu_search_classical(ind.domain, pos, neg, cfg);
  EXPECT_EQ(print_classical_domain(out1), print_classical_domain(out2));
  EXPECT_GE(fitness_J(out1, pos, neg).total(), fitness_J(ind.domain, pos, neg).total());
}

TEST(Tabu, RepairsAPlantedMissingEffect) {
  Fixture fx;
  Induced ind(fx);
  // Corpus where two mends follow each other: losing mend-end's handfree
  // add effect breaks the replay of the longer positive.
  std::vector<EventSequence> pos = {
      ind.image, fx.image({{fx.by_key["light m1"], Rational(0)},
                           {fx.by_key["mend f1 m1"], Rational(1, 2)},
                           {fx.by_key["mend f2 m1"], Rational(13, 5)}})};
  std::vector<EventSequence> neg;

  Domain broken = ind.domain;
  ClassicalOperator* me = find_mut(broken, "mend-end");
  me->add_effects.erase(
      std::remove_if(me->add_effects.begin(), me->add_effects.end(),
                     [](const Atom& a) { return a.predicate == "handfree"; }),
      me->add_effects.end());
  const long long before = fitness_J(broken, pos, neg).total();
  const long long target = fitness_J(ind.domain, pos, neg).total();
  ASSERT_LT(before, target);

  TabuConfig cfg;
  cfg.iterations = 60;
  Domain fixed = tabu_search_classical(broken, pos, neg, cfg);
  EXPECT_GE(fitness_J(fixed, pos, neg).total(), target);
  const ClassicalOperator* fme = fixed.find("mend-end");
  EXPECT_TRUE(std::any_of(fme->add_effects.begin(), fme->add_effects.end(),
                          [](const Atom& a) { return a.predicate == "handfree"; }));
}

TEST(Tabu, ZeroIterationsReturnsTheInput) {
  Fixture fx;
  Induced ind(fx);
  TabuConfig cfg;
  cfg.iterations = 0;
  Domain out = tabu_search_classical(ind.domain, {ind.image}, {}, cfg);
  EXPECT_EQ(print_classical_domain(out), print_classical_domain(ind.domain));
}
