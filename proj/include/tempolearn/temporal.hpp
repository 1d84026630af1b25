#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tempolearn/refine.hpp"
#include "tempolearn/simulate.hpp"

namespace tempolearn {

// ---------------------------------------------------------------------------
// Syntactic constraints on durative operators
//
// A well-formed durative operator satisfies eight disjointness constraints
// between its condition and effect slots:
//   1. overall conditions are never re-added at start or end
//   2. start conditions are never re-added at start
//   3. end conditions are never re-added at end
//   4. start adds and start deletes are disjoint
//   5. end adds and end deletes are disjoint
//   6. start deletes never remove an overall or end condition
//   7. start and end never add the same proposition
//   8. start and end never delete the same proposition
// The search neighborhood excludes any edit that would violate one of them.

namespace temporal_detail {

inline std::vector<Atom> positive_atoms(const std::vector<Literal>& lits) {
  std::vector<Atom> out;
  for (const auto& l : lits)
    if (!l.negated) out.push_back(l.atom);
  return out;  // canonical operators keep literals sorted, so this is sorted
}

inline bool disjoint(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return false;
  }
  return true;
}

inline std::vector<Atom> atom_union(std::vector<Atom> a, const std::vector<Atom>& b) {
  a.insert(a.end(), b.begin(), b.end());
  detail::sort_unique(a);
  return a;
}

inline void erase_atoms(std::vector<Atom>& from, const std::vector<Atom>& drop) {
  from.erase(std::remove_if(from.begin(), from.end(),
                            [&](const Atom& a) {
                              return std::binary_search(drop.begin(), drop.end(), a);
                            }),
             from.end());
}

}  // namespace temporal_detail

inline bool satisfies_constraints(const DurativeOperator& op) {
  using namespace temporal_detail;
  const std::vector<Atom> ps = positive_atoms(op.pre_start);
  const std::vector<Atom> po = positive_atoms(op.pre_overall);
  const std::vector<Atom> pe = positive_atoms(op.pre_end);
  return disjoint(po, atom_union(op.add_start, op.add_end)) &&  // 1
         disjoint(ps, op.add_start) &&                          // 2
         disjoint(pe, op.add_end) &&                            // 3
         disjoint(op.add_start, op.del_start) &&                // 4
         disjoint(op.add_end, op.del_end) &&                    // 5
         disjoint(op.del_start, atom_union(po, pe)) &&          // 6
         disjoint(op.add_start, op.add_end) &&                  // 7
         disjoint(op.del_start, op.del_end);                    // 8
}

// Deterministic repair used on freshly converted domains: conditions are the
// better-evidenced side, so violations are resolved by dropping effect atoms.
// For duplicated start/end effects the at-end copy is dropped (the at-start
// evidence is temporally earlier). Erasures only — the repair terminates in
// one pass.
inline void repair_constraints(DurativeOperator& op) {
  using namespace temporal_detail;
  const std::vector<Atom> ps = positive_atoms(op.pre_start);
  const std::vector<Atom> po = positive_atoms(op.pre_overall);
  const std::vector<Atom> pe = positive_atoms(op.pre_end);
  erase_atoms(op.add_start, po);                          // 1
  erase_atoms(op.add_end, po);                            // 1
  erase_atoms(op.add_start, ps);                          // 2
  erase_atoms(op.add_end, pe);                            // 3
  erase_atoms(op.del_start, op.add_start);                // 4
  erase_atoms(op.del_end, op.add_end);                    // 5
  erase_atoms(op.del_start, atom_union(po, pe));          // 6
  erase_atoms(op.add_end, op.add_start);                  // 7
  erase_atoms(op.del_end, op.del_start);                  // 8
  op.canonicalize();
}

// ---------------------------------------------------------------------------
// Classical <-> temporal conversion

// Reassembles durative operators from their <op>-start / <op>-end images:
//   pre_start'  = pre of <op>-start minus pre of <op>-end
//   pre_end'    = pre of <op>-end minus pre of <op>-start
//   pre_overall = intersection of the two
// with effects copied endpoint-wise and the duration taken from the
// vocabulary. The result is repaired to satisfy the syntactic constraints.
inline TemporalDomain lift_to_temporal(const Domain& classical,
                                       const TemporalDomain& vocabulary) {
  TemporalDomain out;
  out.name = vocabulary.name;
  out.types = vocabulary.types;
  out.predicates = vocabulary.predicates;
  out.constants = vocabulary.constants;
  out.negative_preconditions = classical.negative_preconditions;
  for (const auto& base : vocabulary.operators) {
    const ClassicalOperator* s = classical.find(event_operator_name(base.name, EventKind::Start));
    const ClassicalOperator* e = classical.find(event_operator_name(base.name, EventKind::End));
    if (s == nullptr || e == nullptr)
      throw std::invalid_argument("operator " + base.name + " is missing a start/end pair");
    auto signature = [](const std::vector<Parameter>& ps) {
      std::vector<std::pair<std::string, std::string>> sig;
      for (const auto& p : ps) sig.emplace_back(p.name, p.type);
      return sig;
    };
    if (signature(s->params) != signature(e->params) ||
        signature(s->params) != signature(base.params))
      throw std::invalid_argument("operator " + base.name + " has mismatched parameters");

    ClassicalOperator sc = *s, ec = *e;
    sc.canonicalize();
    ec.canonicalize();
    DurativeOperator op;
    op.name = base.name;
    op.params = base.params;
    op.duration = base.duration;
    std::set_difference(sc.preconditions.begin(), sc.preconditions.end(),
                        ec.preconditions.begin(), ec.preconditions.end(),
                        std::back_inserter(op.pre_start));
    std::set_difference(ec.preconditions.begin(), ec.preconditions.end(),
                        sc.preconditions.begin(), sc.preconditions.end(),
                        std::back_inserter(op.pre_end));
    std::set_intersection(sc.preconditions.begin(), sc.preconditions.end(),
                          ec.preconditions.begin(), ec.preconditions.end(),
                          std::back_inserter(op.pre_overall));
    op.add_start = sc.add_effects;
    op.del_start = sc.del_effects;
    op.add_end = ec.add_effects;
    op.del_end = ec.del_effects;
    op.canonicalize();
    repair_constraints(op);
    out.operators.push_back(std::move(op));
  }
  return out;
}

// Inverse direction: each durative operator splits into its start/end event
// operators, with the overall condition folded into both precondition sets.
inline Domain split_to_classical(const TemporalDomain& temporal) {
  Domain out;
  out.name = temporal.name;
  out.types = temporal.types;
  out.predicates = temporal.predicates;
  out.constants = temporal.constants;
  out.negative_preconditions = temporal.negative_preconditions;
  for (const auto& op : temporal.operators) {
    ClassicalOperator s;
    s.name = event_operator_name(op.name, EventKind::Start);
    s.params = op.params;
    s.preconditions = op.pre_start;
    s.preconditions.insert(s.preconditions.end(), op.pre_overall.begin(), op.pre_overall.end());
    s.add_effects = op.add_start;
    s.del_effects = op.del_start;
    s.canonicalize();
    ClassicalOperator e;
    e.name = event_operator_name(op.name, EventKind::End);
    e.params = op.params;
    e.preconditions = op.pre_end;
    e.preconditions.insert(e.preconditions.end(), op.pre_overall.begin(), op.pre_overall.end());
    e.add_effects = op.add_end;
    e.del_effects = op.del_end;
    e.canonicalize();
    out.operators.push_back(std::move(s));
    out.operators.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Temporal acceptance and fitness

// Regrounds the sequence's actions under the candidate domain (the recorded
// ground slots belong to whichever domain produced the trace) and replays it.
inline bool temporal_accepts(const TemporalDomain& domain, const TemporalSequence& sequence,
                             const State& init) {
  TemporalSequence rebound;
  for (const auto& ta : sequence) {
    const DurativeOperator* op = domain.find(ta.action.op);
    if (op == nullptr) throw std::invalid_argument("unknown operator " + ta.action.op);
    const Binding b = detail::make_binding(op->params, ta.action.args);
    GroundDurative g;
    g.op = op->name;
    g.args = ta.action.args;
    g.duration = op->duration;
    for (const auto& l : op->pre_start) g.pre_start.push_back(ground_literal(l, b));
    for (const auto& l : op->pre_overall) g.pre_overall.push_back(ground_literal(l, b));
    for (const auto& l : op->pre_end) g.pre_end.push_back(ground_literal(l, b));
    for (const auto& a : op->add_start) g.add_start.push_back(ground_atom(a, b));
    for (const auto& a : op->del_start) g.del_start.push_back(ground_atom(a, b));
    for (const auto& a : op->add_end) g.add_end.push_back(ground_atom(a, b));
    for (const auto& a : op->del_end) g.del_end.push_back(ground_atom(a, b));
    rebound.push_back({std::move(g), ta.start});
  }
  static const std::vector<Atom> kNoUniverse;
  return simulate(rebound, init, kNoUniverse).feasible;
}

struct TemporalFitness {
  double jt_plus = 0;   // fraction of temporal positives accepted
  double jt_minus = 0;  // fraction of temporal negatives rejected
  double total = 0;     // (jt_plus + jt_minus) / 2
};

namespace temporal_detail {

// Interned evaluation context for the temporal search: ground instances get
// dense ids, and replays run on bitsets over interned atoms.
struct TCtx {
  const TemporalDomain* proto = nullptr;
  bool negative_preconditions = false;

  std::vector<std::string> op_names;  // input order; move enumeration order
  std::vector<std::vector<Parameter>> op_params;
  std::vector<Rational> op_duration;
  std::vector<std::vector<Atom>> universe;
  std::vector<std::map<Atom, int>> universe_ids;
  std::map<std::string, int> op_ids;

  AtomIndex atoms;
  std::map<std::pair<std::string, std::vector<std::string>>, int> inst_ids;
  std::vector<int> inst_op;
  std::vector<std::vector<int>> inst_lift;  // universe idx -> ground atom id

  struct Ev {
    int pos = 0;  // index into the trace's action list
    bool start = true;
  };
  struct Trace {
    std::vector<int> insts;
    std::vector<Ev> events;
    Bits init;
  };
  std::vector<Trace> pos, neg;

  int intern_instance(const GroundDurative& g) {
    const auto key = std::make_pair(g.op, g.args);
    auto it = inst_ids.find(key);
    if (it != inst_ids.end()) return it->second;
    auto oit = op_ids.find(g.op);
    if (oit == op_ids.end()) throw std::invalid_argument("unknown operator " + g.op);
    const int op = oit->second;
    const int id = static_cast<int>(inst_op.size());
    inst_ids.emplace(key, id);
    inst_op.push_back(op);
    Binding b = detail::make_binding(op_params[op], g.args);
    std::vector<int> lift;
    for (const auto& a : universe[op]) lift.push_back(atoms.intern(ground_atom(a, b)));
    inst_lift.push_back(std::move(lift));
    return id;
  }

  Trace intern_trace(const TemporalTrace& t) {
    Trace out;
    for (const auto& ta : t.actions) out.insts.push_back(intern_instance(ta.action));
    for (const auto& ev : t.events)
      out.events.push_back({ev.pair_index, ev.kind == EventKind::Start});
    if (t.states.empty()) throw std::invalid_argument("trace lacks an initial state");
    for (const auto& a : t.states[0].known_true) out.init.set(atoms.intern(a));
    return out;
  }
};

inline TCtx make_tctx(const TemporalDomain& d, const std::vector<TemporalTrace>& pos,
                      const std::vector<TemporalTrace>& neg) {
  TCtx ctx;
  ctx.proto = &d;
  ctx.negative_preconditions = d.negative_preconditions;
  for (const auto& op : d.operators) ctx.op_names.push_back(op.name);
  for (std::size_t i = 0; i < ctx.op_names.size(); ++i) {
    const DurativeOperator* op = d.find(ctx.op_names[i]);
    ctx.op_ids.emplace(op->name, static_cast<int>(i));
    ctx.op_params.push_back(op->params);
    ctx.op_duration.push_back(op->duration);
    ctx.universe.push_back(lifted_atom_universe(d.predicates, op->params, d.types));
    std::map<Atom, int> ids;
    for (std::size_t u = 0; u < ctx.universe.back().size(); ++u)
      ids.emplace(ctx.universe.back()[u], static_cast<int>(u));
    ctx.universe_ids.push_back(std::move(ids));
  }
  for (const auto& t : pos) ctx.pos.push_back(ctx.intern_trace(t));
  for (const auto& t : neg) ctx.neg.push_back(ctx.intern_trace(t));
  return ctx;
}

// Candidate slots, one entry per operator in ctx order. Precondition slots
// encode universe_index * 2 + (negated ? 1 : 0); effect slots hold universe
// indices. All sorted.
struct TSlots {
  std::vector<int> pre[3];  // start, overall, end
  std::vector<int> add_s, del_s, add_e, del_e;
};
using TCand = std::vector<TSlots>;

inline std::vector<int> positive_part(const std::vector<int>& encoded) {
  std::vector<int> out;
  for (int enc : encoded)
    if (enc % 2 == 0) out.push_back(enc / 2);
  return out;
}

inline bool disjoint_ids(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return false;
  }
  return true;
}

inline std::vector<int> union_ids(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

inline bool tslots_ok(const TSlots& s) {
  const std::vector<int> ps = positive_part(s.pre[0]);
  const std::vector<int> po = positive_part(s.pre[1]);
  const std::vector<int> pe = positive_part(s.pre[2]);
  return disjoint_ids(po, union_ids(s.add_s, s.add_e)) && disjoint_ids(ps, s.add_s) &&
         disjoint_ids(pe, s.add_e) && disjoint_ids(s.add_s, s.del_s) &&
         disjoint_ids(s.add_e, s.del_e) && disjoint_ids(s.del_s, union_ids(po, pe)) &&
         disjoint_ids(s.add_s, s.add_e) && disjoint_ids(s.del_s, s.del_e);
}

inline TCand tcand_from_domain(const TCtx& ctx, const TemporalDomain& d) {
  TCand cand(ctx.op_names.size());
  for (std::size_t i = 0; i < ctx.op_names.size(); ++i) {
    const DurativeOperator* op = d.find(ctx.op_names[i]);
    if (op == nullptr) throw std::invalid_argument("missing operator " + ctx.op_names[i]);
    const auto& ids = ctx.universe_ids[i];
    auto universe_id = [&](const Atom& a) {
      auto it = ids.find(a);
      if (it == ids.end())
        throw std::invalid_argument("atom " + to_string(a) + " is not expressible over " +
                                    op->name + " parameters");
      return it->second;
    };
    auto enc_all = [&](const std::vector<Literal>& lits, std::vector<int>& out) {
      for (const auto& l : lits)
        refine_detail::slot_insert(out, universe_id(l.atom) * 2 + (l.negated ? 1 : 0));
    };
    enc_all(op->pre_start, cand[i].pre[0]);
    enc_all(op->pre_overall, cand[i].pre[1]);
    enc_all(op->pre_end, cand[i].pre[2]);
    for (const auto& a : op->add_start) refine_detail::slot_insert(cand[i].add_s, universe_id(a));
    for (const auto& a : op->del_start) refine_detail::slot_insert(cand[i].del_s, universe_id(a));
    for (const auto& a : op->add_end) refine_detail::slot_insert(cand[i].add_e, universe_id(a));
    for (const auto& a : op->del_end) refine_detail::slot_insert(cand[i].del_e, universe_id(a));
  }
  return cand;
}

inline TemporalDomain tcand_to_domain(const TCtx& ctx, const TCand& cand) {
  TemporalDomain d;
  d.name = ctx.proto->name;
  d.types = ctx.proto->types;
  d.predicates = ctx.proto->predicates;
  d.constants = ctx.proto->constants;
  d.negative_preconditions = ctx.proto->negative_preconditions;
  // Emit operators in the prototype's order for stable printing.
  for (const auto& proto_op : ctx.proto->operators) {
    const int i = ctx.op_ids.at(proto_op.name);
    DurativeOperator op;
    op.name = ctx.op_names[i];
    op.params = ctx.op_params[i];
    op.duration = ctx.op_duration[i];
    auto dec_all = [&](const std::vector<int>& encs, std::vector<Literal>& out) {
      for (int enc : encs) out.push_back({ctx.universe[i][enc / 2], enc % 2 == 1});
    };
    dec_all(cand[i].pre[0], op.pre_start);
    dec_all(cand[i].pre[1], op.pre_overall);
    dec_all(cand[i].pre[2], op.pre_end);
    for (int u : cand[i].add_s) op.add_start.push_back(ctx.universe[i][u]);
    for (int u : cand[i].del_s) op.del_start.push_back(ctx.universe[i][u]);
    for (int u : cand[i].add_e) op.add_end.push_back(ctx.universe[i][u]);
    for (int u : cand[i].del_e) op.del_end.push_back(ctx.universe[i][u]);
    op.canonicalize();
    d.operators.push_back(std::move(op));
  }
  return d;
}

// Per-instance ground masks for a candidate.
struct TGround {
  std::vector<Bits> pre_pos[3], pre_neg[3], add_s, del_s, add_e, del_e;

  void reground_all(const TCtx& ctx, const TCand& cand) {
    for (int k = 0; k < 3; ++k) {
      pre_pos[k].assign(ctx.inst_op.size(), {});
      pre_neg[k].assign(ctx.inst_op.size(), {});
    }
    add_s.assign(ctx.inst_op.size(), {});
    del_s.assign(ctx.inst_op.size(), {});
    add_e.assign(ctx.inst_op.size(), {});
    del_e.assign(ctx.inst_op.size(), {});
    for (std::size_t i = 0; i < ctx.inst_op.size(); ++i)
      reground_instance(ctx, cand, static_cast<int>(i));
  }
  void reground_op(const TCtx& ctx, const TCand& cand, int op) {
    for (std::size_t i = 0; i < ctx.inst_op.size(); ++i)
      if (ctx.inst_op[i] == op) reground_instance(ctx, cand, static_cast<int>(i));
  }
  void reground_instance(const TCtx& ctx, const TCand& cand, int i) {
    const int op = ctx.inst_op[i];
    const auto& lift = ctx.inst_lift[i];
    for (int k = 0; k < 3; ++k) {
      pre_pos[k][i] = pre_neg[k][i] = Bits{};
      for (int enc : cand[op].pre[k])
        (enc % 2 == 1 ? pre_neg : pre_pos)[k][i].set(lift[enc / 2]);
    }
    add_s[i] = del_s[i] = add_e[i] = del_e[i] = Bits{};
    for (int u : cand[op].add_s) add_s[i].set(lift[u]);
    for (int u : cand[op].del_s) del_s[i].set(lift[u]);
    for (int u : cand[op].add_e) add_e[i].set(lift[u]);
    for (int u : cand[op].del_e) del_e[i].set(lift[u]);
  }
};

inline bool t_accepts(const TCtx& ctx, const TGround& g, const TCtx::Trace& trace) {
  Bits state = trace.init;
  std::vector<int> active;  // open action indices within the trace
  auto sat = [&](const Bits& pos, const Bits& neg) {
    return is_subset(pos, state) && !intersects(neg, state);
  };
  for (const auto& ev : trace.events) {
    const int inst = trace.insts[ev.pos];
    if (ev.start) {
      if (!sat(g.pre_pos[0][inst], g.pre_neg[0][inst])) return false;
      state.andnot(g.del_s[inst]);
      state |= g.add_s[inst];
      active.push_back(ev.pos);
    } else {
      active.erase(std::find(active.begin(), active.end(), ev.pos));
      if (!sat(g.pre_pos[2][inst], g.pre_neg[2][inst])) return false;
      state.andnot(g.del_e[inst]);
      state |= g.add_e[inst];
    }
    for (int open : active) {
      const int oi = trace.insts[open];
      if (!sat(g.pre_pos[1][oi], g.pre_neg[1][oi])) return false;
    }
  }
  return true;
}

// Integer fitness: acc * |neg| + rej * |pos| over a common denominator, so
// comparisons during the search are exact. An empty corpus contributes its
// component as constant 1.
struct TScore {
  long long score = 0, denom = 1;  // total = score / denom
  friend bool operator>(const TScore& a, const TScore& b) {
    return a.score * b.denom > b.score * a.denom;
  }
  friend bool operator==(const TScore& a, const TScore& b) {
    return a.score * b.denom == b.score * a.denom;
  }
  bool perfect() const { return score == denom; }
};

inline TScore t_evaluate(const TCtx& ctx, const TGround& g) {
  const long long np = ctx.pos.empty() ? 1 : static_cast<long long>(ctx.pos.size());
  const long long nn = ctx.neg.empty() ? 1 : static_cast<long long>(ctx.neg.size());
  long long acc = ctx.pos.empty() ? 1 : 0;
  long long rej = ctx.neg.empty() ? 1 : 0;
  for (const auto& t : ctx.pos) acc += t_accepts(ctx, g, t) ? 1 : 0;
  for (const auto& t : ctx.neg) rej += t_accepts(ctx, g, t) ? 0 : 1;
  TScore s;
  s.score = acc * nn + rej * np;
  s.denom = 2 * np * nn;
  return s;
}

}  // namespace temporal_detail

inline TemporalFitness fitness_JT(const TemporalDomain& d, const std::vector<TemporalTrace>& pos,
                                  const std::vector<TemporalTrace>& neg) {
  using namespace temporal_detail;
  TCtx ctx = make_tctx(d, pos, neg);
  TGround g;
  TCand cand = tcand_from_domain(ctx, d);
  g.reground_all(ctx, cand);
  long long acc = 0, rej = 0;
  for (const auto& t : ctx.pos) acc += t_accepts(ctx, g, t) ? 1 : 0;
  for (const auto& t : ctx.neg) rej += t_accepts(ctx, g, t) ? 0 : 1;
  TemporalFitness f;
  f.jt_plus = pos.empty() ? 1.0 : static_cast<double>(acc) / static_cast<double>(pos.size());
  f.jt_minus = neg.empty() ? 1.0 : static_cast<double>(rej) / static_cast<double>(neg.size());
  f.total = (f.jt_plus + f.jt_minus) / 2;
  return f;
}

// All single-literal edits of the domain that respect the syntactic
// constraints. Used directly by the property tests; the tabu search
// enumerates the same move set internally.
inline std::vector<TemporalDomain> temporal_neighborhood(const TemporalDomain& d) {
  std::vector<TemporalDomain> out;
  for (std::size_t oi = 0; oi < d.operators.size(); ++oi) {
    const std::vector<Atom> universe =
        lifted_atom_universe(d.predicates, d.operators[oi].params, d.types);
    auto emit = [&](DurativeOperator edited) {
      // Sort the slots before the check: the disjointness tests walk the
      // slot vectors as ordered sequences.
      edited.canonicalize();
      if (!satisfies_constraints(edited)) return;
      TemporalDomain nd = d;
      nd.operators[oi] = std::move(edited);
      out.push_back(std::move(nd));
    };
    auto toggle_pre = [&](std::vector<Literal> DurativeOperator::* slot) {
      for (const auto& atom : universe)
        for (int pol = 0; pol < (d.negative_preconditions ? 2 : 1); ++pol) {
          DurativeOperator edited = d.operators[oi];
          const Literal lit{atom, pol == 1};
          auto& lits = edited.*slot;
          auto it = std::find(lits.begin(), lits.end(), lit);
          if (it == lits.end())
            lits.push_back(lit);
          else
            lits.erase(it);
          emit(edited);
        }
    };
    auto toggle_eff = [&](std::vector<Atom> DurativeOperator::* slot) {
      for (const auto& atom : universe) {
        DurativeOperator edited = d.operators[oi];
        auto& atoms = edited.*slot;
        auto it = std::find(atoms.begin(), atoms.end(), atom);
        if (it == atoms.end())
          atoms.push_back(atom);
        else
          atoms.erase(it);
        emit(edited);
      }
    };
    toggle_pre(&DurativeOperator::pre_start);
    toggle_pre(&DurativeOperator::pre_overall);
    toggle_pre(&DurativeOperator::pre_end);
    toggle_eff(&DurativeOperator::add_start);
    toggle_eff(&DurativeOperator::del_start);
    toggle_eff(&DurativeOperator::add_end);
    toggle_eff(&DurativeOperator::del_end);
  }
  return out;
}

// Best-improvement tabu search over the constrained temporal neighborhood,
// maximizing the temporal fitness. Mirrors the classical search: attribute
// tabu with aspiration on the global best, deterministic enumeration order
// (operator name, slot, atom), early exit once the corpora are perfectly
// classified. Returns the best domain found — the input itself (unchanged)
// when nothing beats it.
inline TemporalDomain temporal_tabu(const TemporalDomain& d0,
                                    const std::vector<TemporalTrace>& pos,
                                    const std::vector<TemporalTrace>& neg,
                                    const TabuConfig& cfg = {10, 500},
                                    std::mt19937_64* rng = nullptr) {
  using namespace temporal_detail;
  (void)rng;  // the neighborhood walk is fully deterministic
  TCtx ctx = make_tctx(d0, pos, neg);
  TCand cur = tcand_from_domain(ctx, d0);
  TGround g;
  g.reground_all(ctx, cur);
  const TScore input_f = t_evaluate(ctx, g);
  TScore cur_f = input_f;
  TCand best = cur;
  TScore best_f = cur_f;
  if (best_f.perfect()) return d0;

  struct Move {
    int op, slot, enc;
    bool insert;
  };
  std::map<std::tuple<int, int, int>, int> tabu_until;
  auto slot_of = [](TSlots& s, int slot) -> std::vector<int>& {
    switch (slot) {
      case 0:
      case 1:
      case 2:
        return s.pre[slot];
      case 3:
        return s.add_s;
      case 4:
        return s.del_s;
      case 5:
        return s.add_e;
      default:
        return s.del_e;
    }
  };

  for (int iter = 0; iter < cfg.iterations && !best_f.perfect(); ++iter) {
    bool have = false;
    Move chosen{};
    TScore chosen_f;
    for (int op = 0; op < static_cast<int>(ctx.op_names.size()); ++op) {
      const int n_univ = static_cast<int>(ctx.universe[op].size());
      auto consider = [&](int slot, int enc) {
        auto& vec = slot_of(cur[op], slot);
        const bool insert = !refine_detail::slot_contains(vec, enc);
        if (insert)
          refine_detail::slot_insert(vec, enc);
        else
          refine_detail::slot_erase(vec, enc);
        const bool ok = tslots_ok(cur[op]);
        TScore f;
        if (ok) {
          g.reground_op(ctx, cur, op);
          f = t_evaluate(ctx, g);
        }
        if (insert)
          refine_detail::slot_erase(vec, enc);
        else
          refine_detail::slot_insert(vec, enc);
        if (ok) g.reground_op(ctx, cur, op);
        if (!ok) return;
        auto it = tabu_until.find({op, slot, enc});
        const bool is_tabu = it != tabu_until.end() && it->second > iter;
        if (is_tabu && !(f > best_f)) return;  // aspiration only
        if (!have || f > chosen_f) {
          have = true;
          chosen = {op, slot, enc, insert};
          chosen_f = f;
        }
      };
      for (int slot = 0; slot < 3; ++slot)
        for (int u = 0; u < n_univ; ++u)
          for (int pol = 0; pol < (ctx.negative_preconditions ? 2 : 1); ++pol)
            consider(slot, u * 2 + pol);
      for (int slot = 3; slot < 7; ++slot)
        for (int u = 0; u < n_univ; ++u) consider(slot, u);
    }
    if (!have) break;
    auto& vec = slot_of(cur[chosen.op], chosen.slot);
    if (chosen.insert)
      refine_detail::slot_insert(vec, chosen.enc);
    else
      refine_detail::slot_erase(vec, chosen.enc);
    g.reground_op(ctx, cur, chosen.op);
    cur_f = chosen_f;
    tabu_until[{chosen.op, chosen.slot, chosen.enc}] = iter + cfg.tenure;
    if (cur_f > best_f) {
      best_f = cur_f;
      best = cur;
    }
  }
  if (best_f > input_f) return tcand_to_domain(ctx, best);
  return d0;
}

}  // namespace tempolearn
