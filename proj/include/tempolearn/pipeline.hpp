#pragma once

#include <chrono>
#include <climits>
#include <string>
#include <utility>
#include <vector>

#include "tempolearn/convert.hpp"
#include "tempolearn/metrics.hpp"
#include "tempolearn/pddl.hpp"

namespace tempolearn {

// The learner's input vocabulary: operator names, parameter signatures and
// durations, plus the type/predicate declarations — never the ground truth's
// conditions or effects.
inline TemporalDomain strip_to_vocabulary(const TemporalDomain& d) {
  TemporalDomain v;
  v.name = d.name;
  v.types = d.types;
  v.predicates = d.predicates;
  v.constants = d.constants;
  v.negative_preconditions = d.negative_preconditions;
  for (const auto& op : d.operators) {
    DurativeOperator stripped;
    stripped.name = op.name;
    stripped.params = op.params;
    stripped.duration = op.duration;
    v.operators.push_back(std::move(stripped));
  }
  return v;
}

struct LearnOptions {
  bool temporal_refinement = true;
  bool negative_preconditions = false;
  TabuConfig classical_tabu{10, 200};
  TabuConfig temporal_tabu_cfg{10, 500};
  int max_outer_rounds = 8;  // refine+search rounds without improvement stop earlier
};

struct LearnResult {
  Domain classical;            // event operators after the classical stage
  TemporalDomain lifted;       // converted domain, before temporal refinement
  TemporalDomain domain;       // final result
  FitnessBreakdown classical_fitness;
  TemporalFitness train_fitness;
  Dfa dfa;                     // merged automaton (inspectable via to_dot)
  int dfa_nodes = 0;
  int dfa_conflicts = 0;       // negatives that collided with positive prefixes
  int repeated_object_instances = 0;
};

// Classical stage: induce operators from the automaton labels, then
// alternate the two refinement operators with the tabu search until the
// fitness stops improving. The best-scoring domain seen is kept.
inline Domain learn_classical(const TemporalDomain& vocabulary, const Dfa& dfa,
                              const Labels& labels, const std::vector<EventSequence>& pos,
                              const std::vector<EventSequence>& neg,
                              const LearnOptions& opt, LearnResult* diag = nullptr) {
  InductionResult induced =
      induce_operators(vocabulary, dfa, labels, opt.negative_preconditions);
  if (diag != nullptr) diag->repeated_object_instances = induced.repeated_object_instances;
  Domain d = induced.domain;
  Domain best = d;
  long long best_f = LLONG_MIN;
  for (int round = 0; round < opt.max_outer_rounds; ++round) {
    for (int k = 0; k < 10; ++k) {
      Domain d2 = refine_preconditions(refine_effects(d, dfa, labels));
      if (print_classical_domain(d2) == print_classical_domain(d)) break;
      d = std::move(d2);
    }
    d = tabu_search_classical(d, pos, neg, opt.classical_tabu);
    const long long f = fitness_J(d, pos, neg).total();
    if (f > best_f) {
      best_f = f;
      best = d;
    } else {
      break;
    }
  }
  return best;
}

// End-to-end learning from temporal samples:
//   temporal traces -> event sequences -> prefix-tree automaton -> merged
//   automaton -> induced event operators -> classical refinement -> durative
//   conversion -> (optional) temporal refinement.
inline LearnResult learn_domain(const TemporalDomain& vocabulary, const SampleSet& train,
                                const LearnOptions& opt = {}) {
  LearnResult result;

  std::vector<EventSequence> pos, neg_all;
  for (const auto& t : train.positives) pos.push_back(convert_positive(t));
  for (const auto& t : train.negatives) neg_all.push_back(convert_negative(t));

  PtaResult pta = build_pta(pos, neg_all);
  const Dfa& dfa = result.dfa = induce_dfa(pta.dfa);
  result.dfa_nodes = static_cast<int>(dfa.next.size());
  result.dfa_conflicts = pta.dfa.n_conflicts;

  // Negatives that are prefixes of positives carry no usable classical
  // rejection signal; they stay in the temporal corpora only.
  std::vector<EventSequence> neg_fit;
  for (std::size_t i = 0; i < neg_all.size(); ++i)
    if (!pta.conflicted[i]) neg_fit.push_back(neg_all[i]);

  Labels labels = compute_labels(dfa, pos);
  result.classical =
      learn_classical(vocabulary, dfa, labels, pos, neg_fit, opt, &result);
  result.classical_fitness = fitness_J(result.classical, pos, neg_fit);

  result.lifted = lift_to_temporal(result.classical, vocabulary);
  if (opt.temporal_refinement)
    result.domain =
        temporal_tabu(result.lifted, train.positives, train.negatives, opt.temporal_tabu_cfg);
  else
    result.domain = result.lifted;
  result.train_fitness = fitness_JT(result.domain, train.positives, train.negatives);
  return result;
}

// ---------------------------------------------------------------------------
// Experiment harness (shared by the CLI and the test suite)

struct RunConfig {
  std::uint64_t seed = 1;
  double observability = 1.0;
  bool temporal_refinement = true;
  GeneratorConfig train_gen{30, 5, 15};
  GeneratorConfig test_gen{50, 1, 30};
  LearnOptions learn;
};

struct RunResult {
  SampleSet train, test;
  LearnResult learned;
  MetricsReport metrics;
};

// Derived deterministic streams so the test corpus and the observation mask
// never reuse the training generator's draws.
inline std::uint64_t test_stream_seed(std::uint64_t seed) { return seed * 2 + 1000003; }
inline std::uint64_t mask_stream_seed(std::uint64_t seed) { return seed * 2 + 777001; }

inline RunResult run_experiment(const TemporalDomain& truth, const Problem& problem,
                                const RunConfig& cfg) {
  RunResult out;
  out.train = generate_samples(truth, problem, cfg.seed, cfg.train_gen);
  out.test = generate_samples(truth, problem, test_stream_seed(cfg.seed), cfg.test_gen);
  mask_observations(out.train, cfg.observability, mask_stream_seed(cfg.seed));

  const TemporalDomain vocabulary = strip_to_vocabulary(truth);
  LearnOptions opt = cfg.learn;
  opt.temporal_refinement = cfg.temporal_refinement;

  const auto t0 = std::chrono::steady_clock::now();
  out.learned = learn_domain(vocabulary, out.train, opt);
  const auto t1 = std::chrono::steady_clock::now();
  out.metrics.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();

  out.metrics.syntax = syntactic_error(out.learned.domain, truth);
  std::vector<EventSequence> test_pos, test_neg;
  for (const auto& t : out.test.positives) test_pos.push_back(convert_positive(t));
  for (const auto& t : out.test.negatives) test_neg.push_back(convert_negative(t));
  out.metrics.classical =
      fscore_classical(split_to_classical(out.learned.domain), test_pos, test_neg);
  out.metrics.temporal =
      fscore_temporal(out.learned.domain, out.test.positives, out.test.negatives);
  return out;
}

}  // namespace tempolearn
