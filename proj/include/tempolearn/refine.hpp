#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tempolearn/induce.hpp"

namespace tempolearn {

// Fitness of a classical candidate against the converted samples:
//   J = (Accept - Reject) + (Equal - Different) + J+ + J-
// where Accept/Reject count precondition literals satisfied/contradicted by
// the observed pre-states of the positive sequences, Equal/Different compare
// the predicted successor of each observed pre-state with the observed
// post-state, J+ sums the lengths of positive sequences replayed end to end,
// and J- counts negative sequences whose replay fails at some step.
struct FitnessBreakdown {
  long long accept = 0, reject = 0;      // precondition agreement
  long long equal = 0, different = 0;    // effect prediction agreement
  long long j_plus = 0;                  // length-weighted accepted positives
  long long j_minus = 0;                 // rejected negatives
  long long total() const {
    return (accept - reject) + (equal - different) + j_plus + j_minus;
  }
};

struct TabuConfig {
  int tenure = 10;
  int iterations = 200;
};

namespace refine_detail {

// Interned view of a classical event domain plus its sample sequences. All
// hot-loop work (fitness, tabu moves, executability repairs) runs on dense
// atom ids and bitsets; the public API converts from/to the model types at
// the boundary.
struct Ctx {
  const Domain* proto = nullptr;
  bool negative_preconditions = false;

  std::vector<std::string> op_names;  // input order; move enumeration order
  std::vector<std::vector<Parameter>> op_params;
  std::vector<std::vector<Atom>> universe;          // candidate atoms per op
  std::vector<std::map<Atom, int>> universe_ids;
  std::map<std::string, int> op_ids;

  AtomIndex atoms;
  std::vector<EventAction> alphabet;
  std::map<EventAction, int> sym_ids;
  std::vector<int> sym_op;
  std::vector<std::vector<int>> sym_lift;       // universe idx -> ground id
  std::vector<std::map<int, int>> sym_unlift;   // ground id -> universe idx

  struct Seq {
    std::vector<int> syms;
    std::vector<Bits> st, sf;  // observed true/false per recorded state
  };
  std::vector<Seq> pos, neg;

  int op_index(const std::string& name) const {
    auto it = op_ids.find(name);
    if (it == op_ids.end()) throw std::invalid_argument("unknown operator " + name);
    return it->second;
  }

  int intern_symbol(const EventAction& e) {
    auto it = sym_ids.find(e);
    if (it != sym_ids.end()) return it->second;
    const int s = static_cast<int>(alphabet.size());
    const int op = op_index(event_operator_name(e.op, e.kind));
    alphabet.push_back(e);
    sym_ids.emplace(e, s);
    sym_op.push_back(op);
    Binding b = detail::make_binding(op_params[op], e.args);
    std::vector<int> lift;
    std::map<int, int> unlift;
    for (std::size_t u = 0; u < universe[op].size(); ++u) {
      const int id = atoms.intern(ground_atom(universe[op][u], b));
      lift.push_back(id);
      unlift.emplace(id, static_cast<int>(u));
    }
    sym_lift.push_back(std::move(lift));
    sym_unlift.push_back(std::move(unlift));
    return s;
  }
};

inline void init_ops(Ctx& ctx, const Domain& d) {
  ctx.proto = &d;
  ctx.negative_preconditions = d.negative_preconditions;
  for (const auto& op : d.operators) ctx.op_names.push_back(op.name);
  for (std::size_t i = 0; i < ctx.op_names.size(); ++i) {
    const ClassicalOperator* op = d.find(ctx.op_names[i]);
    ctx.op_ids.emplace(op->name, static_cast<int>(i));
    ctx.op_params.push_back(op->params);
    ctx.universe.push_back(lifted_atom_universe(d.predicates, op->params, d.types));
    std::map<Atom, int> ids;
    for (std::size_t u = 0; u < ctx.universe.back().size(); ++u)
      ids.emplace(ctx.universe.back()[u], static_cast<int>(u));
    ctx.universe_ids.push_back(std::move(ids));
  }
}

inline Ctx::Seq intern_sequence(Ctx& ctx, const EventSequence& seq) {
  Ctx::Seq out;
  for (const auto& e : seq.events) out.syms.push_back(ctx.intern_symbol(e));
  for (const auto& st : seq.states) {
    Bits t, f;
    for (const auto& a : st.known_true) t.set(ctx.atoms.intern(a));
    for (const auto& a : st.known_false) f.set(ctx.atoms.intern(a));
    out.st.push_back(std::move(t));
    out.sf.push_back(std::move(f));
  }
  return out;
}

inline Ctx make_ctx(const Domain& d, const std::vector<EventSequence>& pos,
                    const std::vector<EventSequence>& neg) {
  Ctx ctx;
  init_ops(ctx, d);
  for (const auto& s : pos) ctx.pos.push_back(intern_sequence(ctx, s));
  for (const auto& s : neg) ctx.neg.push_back(intern_sequence(ctx, s));
  return ctx;
}

// Candidate representation: per operator, sorted id vectors. Precondition
// literals are encoded as universe_index * 2 + (negated ? 1 : 0); effects as
// plain universe indices.
struct Slots {
  std::vector<int> pre, add, del;
};
using Candidate = std::vector<Slots>;

inline bool slot_contains(const std::vector<int>& v, int x) {
  return std::binary_search(v.begin(), v.end(), x);
}
inline void slot_insert(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}
inline void slot_erase(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

inline Candidate from_domain(const Ctx& ctx, const Domain& d) {
  Candidate cand(ctx.op_names.size());
  for (std::size_t i = 0; i < ctx.op_names.size(); ++i) {
    const ClassicalOperator* op = d.find(ctx.op_names[i]);
    if (op == nullptr) throw std::invalid_argument("missing operator " + ctx.op_names[i]);
    const auto& ids = ctx.universe_ids[i];
    auto universe_id = [&](const Atom& a) {
      auto it = ids.find(a);
      if (it == ids.end())
        throw std::invalid_argument("atom " + to_string(a) + " is not expressible over " +
                                    op->name + " parameters");
      return it->second;
    };
    for (const auto& lit : op->preconditions)
      slot_insert(cand[i].pre, universe_id(lit.atom) * 2 + (lit.negated ? 1 : 0));
    for (const auto& a : op->add_effects) slot_insert(cand[i].add, universe_id(a));
    for (const auto& a : op->del_effects) slot_insert(cand[i].del, universe_id(a));
  }
  return cand;
}

inline Domain to_domain(const Ctx& ctx, const Candidate& cand) {
  Domain d;
  d.name = ctx.proto->name;
  d.types = ctx.proto->types;
  d.predicates = ctx.proto->predicates;
  d.constants = ctx.proto->constants;
  d.negative_preconditions = ctx.proto->negative_preconditions;
  for (std::size_t i = 0; i < ctx.op_names.size(); ++i) {
    ClassicalOperator op;
    op.name = ctx.op_names[i];
    op.params = ctx.op_params[i];
    for (int enc : cand[i].pre)
      op.preconditions.push_back({ctx.universe[i][enc / 2], enc % 2 == 1});
    for (int u : cand[i].add) op.add_effects.push_back(ctx.universe[i][u]);
    for (int u : cand[i].del) op.del_effects.push_back(ctx.universe[i][u]);
    op.canonicalize();
    d.operators.push_back(std::move(op));
  }
  return d;
}

// Ground per-symbol bit masks for one candidate; the unit of incremental
// re-grounding during the tabu search is one operator.
struct Grounding {
  std::vector<Bits> pre_pos, pre_neg, add, del;

  void reground_all(const Ctx& ctx, const Candidate& cand) {
    pre_pos.assign(ctx.alphabet.size(), {});
    pre_neg.assign(ctx.alphabet.size(), {});
    add.assign(ctx.alphabet.size(), {});
    del.assign(ctx.alphabet.size(), {});
    for (std::size_t s = 0; s < ctx.alphabet.size(); ++s) reground_symbol(ctx, cand, static_cast<int>(s));
  }
  void reground_op(const Ctx& ctx, const Candidate& cand, int op) {
    for (std::size_t s = 0; s < ctx.alphabet.size(); ++s)
      if (ctx.sym_op[s] == op) reground_symbol(ctx, cand, static_cast<int>(s));
  }
  void reground_symbol(const Ctx& ctx, const Candidate& cand, int s) {
    const int op = ctx.sym_op[s];
    pre_pos[s] = pre_neg[s] = add[s] = del[s] = Bits{};
    for (int enc : cand[op].pre)
      (enc % 2 == 1 ? pre_neg : pre_pos)[s].set(ctx.sym_lift[s][enc / 2]);
    for (int u : cand[op].add) add[s].set(ctx.sym_lift[s][u]);
    for (int u : cand[op].del) del[s].set(ctx.sym_lift[s][u]);
  }
};

inline FitnessBreakdown evaluate(const Ctx& ctx, const Grounding& g) {
  FitnessBreakdown f;
  Bits pred_t, pred_f, state;
  for (const auto& seq : ctx.pos) {
    bool runs = true;
    state = seq.st[0];
    for (std::size_t i = 0; i < seq.syms.size(); ++i) {
      const int s = seq.syms[i];
      f.accept += and_popcount(g.pre_pos[s], seq.st[i]) + and_popcount(g.pre_neg[s], seq.sf[i]);
      f.reject += and_popcount(g.pre_pos[s], seq.sf[i]) + and_popcount(g.pre_neg[s], seq.st[i]);
      pred_t = seq.st[i];
      pred_t.andnot(g.del[s]);
      pred_t |= g.add[s];
      pred_f = seq.sf[i];
      pred_f.andnot(g.add[s]);
      pred_f |= g.del[s];
      f.equal += and_popcount(pred_t, seq.st[i + 1]) + and_popcount(pred_f, seq.sf[i + 1]);
      f.different += and_popcount(pred_t, seq.sf[i + 1]) + and_popcount(pred_f, seq.st[i + 1]);
      if (runs) {
        if (!is_subset(g.pre_pos[s], state) || intersects(g.pre_neg[s], state)) {
          runs = false;
        } else {
          state.andnot(g.del[s]);
          state |= g.add[s];
        }
      }
    }
    if (runs) f.j_plus += static_cast<long long>(seq.syms.size());
  }
  for (const auto& seq : ctx.neg) {
    bool runs = true;
    state = seq.st[0];
    for (std::size_t i = 0; i < seq.syms.size() && runs; ++i) {
      const int s = seq.syms[i];
      if (!is_subset(g.pre_pos[s], state) || intersects(g.pre_neg[s], state)) {
        runs = false;
      } else {
        state.andnot(g.del[s]);
        state |= g.add[s];
      }
    }
    if (!runs) f.j_minus += 1;
  }
  return f;
}

}  // namespace refine_detail

inline FitnessBreakdown fitness_J(const Domain& d, const std::vector<EventSequence>& positives,
                                  const std::vector<EventSequence>& negatives) {
  refine_detail::Ctx ctx = refine_detail::make_ctx(d, positives, negatives);
  refine_detail::Candidate cand = refine_detail::from_domain(ctx, d);
  refine_detail::Grounding g;
  g.reground_all(ctx, cand);
  return refine_detail::evaluate(ctx, g);
}

// Executability repair: replays the automaton symbolically from the initial
// state, joining states that meet at a node by intersection, and whenever an
// edge's precondition atom is not guaranteed at its source node, adds the
// atom as an (add) effect of an operator on an incoming edge — unless the
// labels show it observed false after that operator somewhere, or the
// operator already deletes it. With negative preconditions enabled the dual
// repair adds delete effects. Atoms are only added, never removed.
inline Domain refine_effects(const Domain& d, const Dfa& dfa, const Labels& labels) {
  using namespace refine_detail;
  Ctx ctx;
  init_ops(ctx, d);
  ctx.atoms = labels.atoms;
  std::vector<int> syms;  // dfa symbol id -> ctx symbol id
  for (const auto& e : dfa.alphabet) syms.push_back(ctx.intern_symbol(e));
  Candidate cand = from_domain(ctx, d);

  const int n_nodes = static_cast<int>(dfa.next.size());
  std::vector<std::vector<std::pair<int, int>>> rev(n_nodes);  // node -> (pred, dfa sym)
  for (int n = 0; n < n_nodes; ++n)
    for (const auto& [a, n2] : dfa.next[n]) rev[n2].push_back({n, a});
  for (auto& v : rev) std::sort(v.begin(), v.end());

  // Is `u` (an atom of operator `op`) ever observed false / true just after
  // an instance of `op`? Lifted additions must not contradict any instance.
  auto observed_after = [&](int op, int u, bool want_false) {
    for (const auto& [key, st] : labels.at) {
      const int s = syms[key.second];
      if (ctx.sym_op[s] != op) continue;
      const int id = ctx.sym_lift[s][u];
      if (want_false ? st.p_false.test(id) : st.p_true.test(id)) return true;
    }
    return false;
  };

  for (int round = 0; round < 50; ++round) {
    // Propagate reachable symbolic states (intersection join).
    std::vector<std::optional<Bits>> reach(n_nodes);
    reach[dfa.root()] = labels.root_state;
    std::vector<int> queue{dfa.root()};
    while (!queue.empty()) {
      const int n = queue.back();
      queue.pop_back();
      for (const auto& [a, n2] : dfa.next[n]) {
        const int s = syms[a];
        Bits out = *reach[n];
        for (int u : cand[ctx.sym_op[s]].del) out.reset(ctx.sym_lift[s][u]);
        for (int u : cand[ctx.sym_op[s]].add) out.set(ctx.sym_lift[s][u]);
        if (!reach[n2].has_value()) {
          reach[n2] = std::move(out);
          queue.push_back(n2);
        } else {
          Bits joined = *reach[n2];
          joined &= out;
          if (!(joined == *reach[n2])) {
            reach[n2] = std::move(joined);
            queue.push_back(n2);
          }
        }
      }
    }

    // Scan for unmet preconditions and collect repairs.
    std::set<std::pair<int, int>> new_adds, new_dels;  // (op, universe idx)
    for (int n = 0; n < n_nodes; ++n) {
      if (!reach[n].has_value()) continue;
      for (const auto& [a, n2] : dfa.next[n]) {
        (void)n2;
        const int s = syms[a];
        const int op = ctx.sym_op[s];
        for (int enc : cand[op].pre) {
          const int id = ctx.sym_lift[s][enc / 2];
          if (enc % 2 == 0 && !reach[n]->test(id)) {
            for (const auto& [m, ain] : rev[n]) {
              (void)m;
              const int sin = syms[ain];
              const int iop = ctx.sym_op[sin];
              auto it = ctx.sym_unlift[sin].find(id);
              if (it == ctx.sym_unlift[sin].end()) continue;
              const int u = it->second;
              if (slot_contains(cand[iop].add, u) || slot_contains(cand[iop].del, u)) continue;
              if (observed_after(iop, u, /*want_false=*/true)) continue;
              new_adds.insert({iop, u});
            }
          } else if (enc % 2 == 1 && reach[n]->test(id)) {
            for (const auto& [m, ain] : rev[n]) {
              (void)m;
              const int sin = syms[ain];
              const int iop = ctx.sym_op[sin];
              auto it = ctx.sym_unlift[sin].find(id);
              if (it == ctx.sym_unlift[sin].end()) continue;
              const int u = it->second;
              if (slot_contains(cand[iop].del, u) || slot_contains(cand[iop].add, u)) continue;
              if (observed_after(iop, u, /*want_false=*/false)) continue;
              new_dels.insert({iop, u});
            }
          }
        }
      }
    }
    if (new_adds.empty() && new_dels.empty()) break;
    for (const auto& [op, u] : new_adds) slot_insert(cand[op].add, u);
    for (const auto& [op, u] : new_dels) slot_insert(cand[op].del, u);
  }
  return to_domain(ctx, cand);
}

// Every delete effect presupposes the atom held before the event; surface
// that as an explicit positive precondition.
inline Domain refine_preconditions(const Domain& d) {
  Domain out = d;
  for (auto& op : out.operators) {
    for (const auto& a : op.del_effects) {
      const Literal lit{a, false};
      if (std::find(op.preconditions.begin(), op.preconditions.end(), lit) ==
          op.preconditions.end())
        op.preconditions.push_back(lit);
    }
    op.canonicalize();
  }
  return out;
}

// Best-improvement tabu search over single-literal edits of the event
// operators. Attributes (operator, slot, atom) are tabu for `tenure`
// iterations after being toggled, with aspiration on the global best; the
// search returns the best candidate seen, so the result never scores below
// the input. Ties are broken by enumeration order: operator name, then slot
// (preconditions, adds, deletes), then atom.
inline Domain tabu_search_classical(const Domain& d0, const std::vector<EventSequence>& positives,
                                    const std::vector<EventSequence>& negatives,
                                    const TabuConfig& cfg = {}) {
  using namespace refine_detail;
  Ctx ctx = make_ctx(d0, positives, negatives);
  Candidate cur = from_domain(ctx, d0);
  Grounding g;
  g.reground_all(ctx, cur);
  long long cur_f = evaluate(ctx, g).total();
  Candidate best = cur;
  long long best_f = cur_f;

  enum Slot { kPre = 0, kAdd = 1, kDel = 2 };
  struct Move {
    int op, slot, enc;
    bool insert;
  };
  std::map<std::tuple<int, int, int>, int> tabu_until;

  auto apply = [&](const Move& m, Candidate& c) {
    auto& slot = m.slot == kPre ? c[m.op].pre : m.slot == kAdd ? c[m.op].add : c[m.op].del;
    if (m.insert)
      slot_insert(slot, m.enc);
    else
      slot_erase(slot, m.enc);
  };

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    bool have = false;
    Move chosen{};
    long long chosen_f = 0;
    for (int op = 0; op < static_cast<int>(ctx.op_names.size()); ++op) {
      const int n_univ = static_cast<int>(ctx.universe[op].size());
      auto consider = [&](int slot, int enc, bool insert) {
        const Move m{op, slot, enc, insert};
        apply(m, cur);
        g.reground_op(ctx, cur, op);
        const long long f = evaluate(ctx, g).total();
        apply({op, slot, enc, !insert}, cur);
        g.reground_op(ctx, cur, op);
        auto it = tabu_until.find({op, slot, enc});
        const bool is_tabu = it != tabu_until.end() && it->second > iter;
        if (is_tabu && f <= best_f) return;  // aspiration only
        if (!have || f > chosen_f) {
          have = true;
          chosen = m;
          chosen_f = f;
        }
      };
      for (int u = 0; u < n_univ; ++u)
        for (int pol = 0; pol < (ctx.negative_preconditions ? 2 : 1); ++pol) {
          const int enc = u * 2 + pol;
          consider(kPre, enc, !slot_contains(cur[op].pre, enc));
        }
      for (int u = 0; u < n_univ; ++u) {
        if (slot_contains(cur[op].add, u))
          consider(kAdd, u, false);
        else if (!slot_contains(cur[op].del, u))
          consider(kAdd, u, true);
      }
      for (int u = 0; u < n_univ; ++u) {
        if (slot_contains(cur[op].del, u))
          consider(kDel, u, false);
        else if (!slot_contains(cur[op].add, u))
          consider(kDel, u, true);
      }
    }
    if (!have) break;
    apply(chosen, cur);
    g.reground_op(ctx, cur, chosen.op);
    cur_f = chosen_f;
    tabu_until[{chosen.op, chosen.slot, chosen.enc}] = iter + cfg.tenure;
    if (cur_f > best_f) {
      best_f = cur_f;
      best = cur;
    }
  }
  return to_domain(ctx, best);
}

}  // namespace tempolearn
