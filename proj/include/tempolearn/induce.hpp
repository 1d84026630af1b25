#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tempolearn/dfa.hpp"

namespace tempolearn {

// Observation labels per automaton transition, rebuilt from the positive
// sequences alone: mu_A folds the states observed just before taking the
// event at the state, mu_P the states just after. An atom is always-true at
// a transition if it was observed true at least once and never false;
// always-false symmetrically; anything else is mixed/unobserved.
struct Labels {
  AtomIndex atoms;
  std::map<std::pair<int, int>, EdgeStats> at;  // (node, symbol) -> fold
  Bits root_state;                              // initial state (fully observed)
  bool has_root_state = false;
};

inline Labels compute_labels(const Dfa& dfa, const std::vector<EventSequence>& positives) {
  Labels labels;
  labels.atoms = dfa.atom_index;
  for (const auto& seq : positives) {
    if (!seq.positive) throw std::invalid_argument("negative sequence among positives");
    if (!labels.has_root_state && !seq.states.empty()) {
      for (const auto& a : seq.states[0].known_true)
        labels.root_state.set(labels.atoms.intern(a));
      labels.has_root_state = true;
    }
    int node = dfa.root();
    for (std::size_t i = 0; i < seq.events.size(); ++i) {
      const int sym = dfa.symbol(seq.events[i]);
      if (sym < 0)
        throw std::invalid_argument("positive sequence uses an unknown event " +
                                    to_string(seq.events[i]));
      auto it = dfa.next[node].find(sym);
      if (it == dfa.next[node].end())
        throw std::invalid_argument("positive sequence rejected by the automaton");
      EdgeStats& st = labels.at[{node, sym}];
      dfa_detail::fold_state(seq.states[i], labels.atoms, st.a_true, st.a_false);
      if (i + 1 < seq.states.size())
        dfa_detail::fold_state(seq.states[i + 1], labels.atoms, st.p_true, st.p_false);
      node = it->second;
    }
  }
  return labels;
}

struct InductionResult {
  Domain domain;  // classical event operators (<op>-start / <op>-end)
  int repeated_object_instances = 0;  // instances binding one object twice
};

// Builds the event operators from the labels. An atom (lifted through each
// instance's argument binding) becomes:
//   - a precondition if always-true before every instance,
//   - a negative precondition if always-false before every instance (only
//     when negative preconditions are enabled),
//   - a delete effect if always-true before and always-false after,
//   - an add effect if always-false before and always-true after.
// Operators never observed in the samples stay empty. Only atoms over the
// operator's own parameters exist at this level; ground atoms involving
// other objects are not liftable and are discarded.
inline InductionResult induce_operators(const TemporalDomain& vocabulary, const Dfa& dfa,
                                        const Labels& labels,
                                        bool negative_preconditions) {
  InductionResult result;
  result.domain.name = vocabulary.name;
  result.domain.types = vocabulary.types;
  result.domain.predicates = vocabulary.predicates;
  result.domain.constants = vocabulary.constants;
  result.domain.negative_preconditions = negative_preconditions;

  for (const auto& base : vocabulary.operators) {
    const std::vector<Atom> universe =
        lifted_atom_universe(vocabulary.predicates, base.params, vocabulary.types);
    for (const EventKind kind : {EventKind::Start, EventKind::End}) {
      ClassicalOperator op;
      op.name = event_operator_name(base.name, kind);
      op.params = base.params;

      // Instances: transitions labeled with this event operator.
      struct Instance {
        const EdgeStats* stats;
        const std::vector<std::string>* args;
      };
      std::vector<Instance> instances;
      for (const auto& [key, stats] : labels.at) {
        const EventAction& e = dfa.alphabet[key.second];
        if (e.op == base.name && e.kind == kind)
          instances.push_back({&stats, &e.args});
      }
      std::map<const std::vector<std::string>*, bool> repeated_seen;
      for (const auto& inst : instances) {
        std::set<std::string> uniq(inst.args->begin(), inst.args->end());
        if (uniq.size() < inst.args->size() && !repeated_seen[inst.args])
          repeated_seen[inst.args] = true;
      }
      for (const auto& [args, rep] : repeated_seen)
        if (rep) ++result.repeated_object_instances;

      if (!instances.empty()) {
        for (const Atom& lifted : universe) {
          bool all_true_before = true, all_false_before = true;
          bool all_false_after = true, all_true_after = true;
          for (const auto& inst : instances) {
            Binding b = detail::make_binding(base.params, *inst.args);
            const int id = labels.atoms.find(ground_atom(lifted, b));
            const bool at = id >= 0 && inst.stats->a_true.test(id);
            const bool af = id >= 0 && inst.stats->a_false.test(id);
            const bool pt = id >= 0 && inst.stats->p_true.test(id);
            const bool pf = id >= 0 && inst.stats->p_false.test(id);
            all_true_before &= (at && !af);
            all_false_before &= (af && !at);
            all_true_after &= (pt && !pf);
            all_false_after &= (pf && !pt);
          }
          if (all_true_before) op.preconditions.push_back({lifted, false});
          if (all_false_before && negative_preconditions)
            op.preconditions.push_back({lifted, true});
          if (all_true_before && all_false_after) op.del_effects.push_back(lifted);
          if (all_false_before && all_true_after) op.add_effects.push_back(lifted);
        }
      }
      op.canonicalize();
      result.domain.operators.push_back(std::move(op));
    }
  }
  return result;
}

}  // namespace tempolearn
