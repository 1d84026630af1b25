#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tempolearn/temporal.hpp"

namespace tempolearn {

// ---------------------------------------------------------------------------
// Syntactic error
//
// Per operator: the symmetric differences of the seven condition/effect slots
// against the reference, summed and divided by 7 x (number of atoms formable
// over the operator's parameters). An operator present in only one domain
// counts as all-slots-different (error 1). The domain-level error is the mean
// over operators.

struct OperatorError {
  bool matched = false;
  int differences = 0;    // summed over the seven slots
  int universe_size = 0;  // atoms formable over the signature
  double error = 1.0;
};

struct SyntacticError {
  double e_sigma = 0;
  std::map<std::string, OperatorError> per_operator;
};

namespace metrics_detail {

template <typename T>
inline int symdiff_size(std::vector<T> a, std::vector<T> b) {
  detail::sort_unique(a);
  detail::sort_unique(b);
  std::vector<T> d;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d));
  return static_cast<int>(d.size());
}

inline bool same_signature(const DurativeOperator& a, const DurativeOperator& b) {
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].type != b.params[i].type) return false;
  return true;
}

}  // namespace metrics_detail

inline SyntacticError syntactic_error(const TemporalDomain& learned,
                                      const TemporalDomain& truth) {
  using metrics_detail::symdiff_size;
  SyntacticError out;
  std::vector<std::string> names;
  for (const auto& op : truth.operators) names.push_back(op.name);
  for (const auto& op : learned.operators) names.push_back(op.name);
  detail::sort_unique(names);

  double sum = 0;
  for (const auto& name : names) {
    OperatorError oe;
    const DurativeOperator* l = learned.find(name);
    const DurativeOperator* t = truth.find(name);
    if (l != nullptr && t != nullptr && metrics_detail::same_signature(*l, *t)) {
      oe.matched = true;
      oe.universe_size =
          static_cast<int>(lifted_atom_universe(truth.predicates, t->params, truth.types).size());
      oe.differences = symdiff_size(l->pre_start, t->pre_start) +
                       symdiff_size(l->pre_overall, t->pre_overall) +
                       symdiff_size(l->pre_end, t->pre_end) +
                       symdiff_size(l->add_start, t->add_start) +
                       symdiff_size(l->del_start, t->del_start) +
                       symdiff_size(l->add_end, t->add_end) +
                       symdiff_size(l->del_end, t->del_end);
      if (oe.universe_size == 0)
        oe.error = oe.differences > 0 ? 1.0 : 0.0;
      else
        oe.error = std::min(1.0, static_cast<double>(oe.differences) /
                                     (7.0 * static_cast<double>(oe.universe_size)));
    }
    sum += oe.error;
    out.per_operator.emplace(name, oe);
  }
  out.e_sigma = names.empty() ? 0.0 : sum / static_cast<double>(names.size());
  return out;
}

// ---------------------------------------------------------------------------
// FScore
//
//   recall    R = accepted positives / |E+|
//   precision P = accepted positives / (accepted positives + accepted negatives)
//   FScore      = 2PR / (P + R), or 0 when P + R = 0.

struct FScoreResult {
  double fscore = 0, precision = 0, recall = 0;
  int accepted_pos = 0, accepted_neg = 0;
  int total_pos = 0, total_neg = 0;
  bool empty_positives = false;  // recall reported as 1 by convention
};

namespace metrics_detail {

inline FScoreResult combine(int acc_pos, int acc_neg, int n_pos, int n_neg) {
  FScoreResult r;
  r.accepted_pos = acc_pos;
  r.accepted_neg = acc_neg;
  r.total_pos = n_pos;
  r.total_neg = n_neg;
  r.empty_positives = n_pos == 0;
  r.recall = n_pos == 0 ? 1.0 : static_cast<double>(acc_pos) / n_pos;
  r.precision = acc_pos + acc_neg == 0 ? 1.0 : static_cast<double>(acc_pos) / (acc_pos + acc_neg);
  const double pr = r.precision + r.recall;
  r.fscore = pr > 0 ? 2 * r.precision * r.recall / pr : 0.0;
  return r;
}

// Full replay of an event sequence from its own (fully observed) initial
// state under the candidate event operators.
inline bool replays(const Domain& d, const EventSequence& seq) {
  if (seq.states.empty()) throw std::invalid_argument("sequence lacks an initial state");
  State state(seq.states[0].known_true.begin(), seq.states[0].known_true.end());
  for (const auto& e : seq.events) {
    const ClassicalOperator* op = d.find(event_operator_name(e.op, e.kind));
    if (op == nullptr) return false;
    const Binding b = detail::make_binding(op->params, e.args);
    for (const auto& lit : op->preconditions)
      if (!holds(ground_literal(lit, b), state)) return false;
    for (const auto& a : op->del_effects) state.erase(ground_atom(a, b));
    for (const auto& a : op->add_effects) state.insert(ground_atom(a, b));
  }
  return true;
}

}  // namespace metrics_detail

inline FScoreResult fscore_classical(const Domain& d, const std::vector<EventSequence>& pos,
                                     const std::vector<EventSequence>& neg) {
  int acc_pos = 0, acc_neg = 0;
  for (const auto& s : pos) acc_pos += metrics_detail::replays(d, s) ? 1 : 0;
  for (const auto& s : neg) acc_neg += metrics_detail::replays(d, s) ? 1 : 0;
  return metrics_detail::combine(acc_pos, acc_neg, static_cast<int>(pos.size()),
                                 static_cast<int>(neg.size()));
}

inline FScoreResult fscore_temporal(const TemporalDomain& d,
                                    const std::vector<TemporalTrace>& pos,
                                    const std::vector<TemporalTrace>& neg) {
  auto accepts = [&](const TemporalTrace& t) {
    if (t.states.empty()) throw std::invalid_argument("trace lacks an initial state");
    const State init(t.states[0].known_true.begin(), t.states[0].known_true.end());
    return temporal_accepts(d, t.actions, init);
  };
  int acc_pos = 0, acc_neg = 0;
  for (const auto& t : pos) acc_pos += accepts(t) ? 1 : 0;
  for (const auto& t : neg) acc_neg += accepts(t) ? 1 : 0;
  return metrics_detail::combine(acc_pos, acc_neg, static_cast<int>(pos.size()),
                                 static_cast<int>(neg.size()));
}

// ---------------------------------------------------------------------------
// Reports

struct MetricsReport {
  SyntacticError syntax;
  FScoreResult classical;
  FScoreResult temporal;
  double runtime_seconds = 0;
};

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  std::string s = os.str();
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s.empty() ? "0" : s;
}

inline void write_csv_header(std::ostream& os) {
  os << "domain,problem,variant,seed,observability,e_sigma,fscore_classical,"
        "fscore_temporal,runtime_seconds\n";
}

inline void write_csv_row(std::ostream& os, const std::string& domain, const std::string& problem,
                          const std::string& variant, std::uint64_t seed, double observability,
                          const MetricsReport& m) {
  os << domain << ',' << problem << ',' << variant << ',' << seed << ','
     << csv_number(observability) << ',' << csv_number(m.syntax.e_sigma) << ','
     << csv_number(m.classical.fscore) << ',' << csv_number(m.temporal.fscore) << ','
     << csv_number(m.runtime_seconds) << '\n';
}

}  // namespace tempolearn
