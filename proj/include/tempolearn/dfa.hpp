#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempolearn/bits.hpp"
#include "tempolearn/convert.hpp"

namespace tempolearn {

// Per-transition observation fold: which atoms were ever observed true/false
// in the states just before (a_*) and just after (p_*) taking the event.
struct EdgeStats {
  Bits a_true, a_false, p_true, p_false;

  void merge(const EdgeStats& o) {
    a_true |= o.a_true;
    a_false |= o.a_false;
    p_true |= o.p_true;
    p_false |= o.p_false;
  }
};

// Deterministic automaton over ground event actions. Every state is
// accepting (the language is prefix-closed); a missing transition rejects.
// reject_marks record (state, event) pairs that must never become
// transitions: they come from infeasible continuations in the samples.
struct Dfa {
  std::vector<EventAction> alphabet;
  std::map<EventAction, int> symbols;
  std::vector<std::map<int, int>> next;
  std::vector<std::map<int, EdgeStats>> stats;
  std::set<std::pair<int, int>> reject_marks;
  AtomIndex atom_index;
  int n_conflicts = 0;  // negatives that coincided with a positive prefix

  int root() const { return 0; }
  std::size_t size() const { return next.size(); }

  int symbol(const EventAction& e) const {
    auto it = symbols.find(e);
    return it == symbols.end() ? -1 : it->second;
  }
  int intern_symbol(const EventAction& e) {
    auto it = symbols.find(e);
    if (it != symbols.end()) return it->second;
    const int id = static_cast<int>(alphabet.size());
    alphabet.push_back(e);
    symbols.emplace(e, id);
    return id;
  }
  int add_node() {
    next.emplace_back();
    stats.emplace_back();
    return static_cast<int>(next.size()) - 1;
  }

  bool accepts(const std::vector<EventAction>& events) const {
    int node = root();
    for (const auto& e : events) {
      const int sym = symbol(e);
      if (sym < 0) return false;
      auto it = next[node].find(sym);
      if (it == next[node].end()) return false;
      node = it->second;
    }
    return true;
  }
};

namespace dfa_detail {

inline void fold_state(const ObservedState& st, AtomIndex& atoms, Bits& seen_true,
                       Bits& seen_false) {
  for (const auto& a : st.known_true) seen_true.set(atoms.intern(a));
  for (const auto& a : st.known_false) seen_false.set(atoms.intern(a));
}

}  // namespace dfa_detail

struct PtaResult {
  Dfa dfa;
  // conflicted[i]: negatives[i] coincides with a positive prefix; its reject
  // mark was dropped and it must not count against classical rejection.
  std::vector<bool> conflicted;
};

// Prefix-tree acceptor over the positive sequences, with negative prefixes
// inserted and their final events recorded as reject marks. A negative whose
// final event already continues some positive prefix is a conflict: the
// positive evidence wins and the mark is dropped.
inline PtaResult build_pta(const std::vector<EventSequence>& positives,
                           const std::vector<EventSequence>& negatives) {
  PtaResult result;
  Dfa& dfa = result.dfa;
  dfa.add_node();

  const auto insert_path = [&](const EventSequence& seq, std::size_t count) -> int {
    int node = dfa.root();
    for (std::size_t i = 0; i < count; ++i) {
      const int sym = dfa.intern_symbol(seq.events[i]);
      EdgeStats& st = dfa.stats[node][sym];
      dfa_detail::fold_state(seq.states[i], dfa.atom_index, st.a_true, st.a_false);
      if (i + 1 < seq.states.size())
        dfa_detail::fold_state(seq.states[i + 1], dfa.atom_index, st.p_true, st.p_false);
      auto it = dfa.next[node].find(sym);
      if (it == dfa.next[node].end()) {
        const int child = dfa.add_node();
        dfa.next[node][sym] = child;
        node = child;
      } else {
        node = it->second;
      }
    }
    return node;
  };

  for (const auto& seq : positives) {
    if (!seq.positive) throw std::invalid_argument("negative sequence among positives");
    insert_path(seq, seq.events.size());
  }
  result.conflicted.assign(negatives.size(), false);
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    const EventSequence& seq = negatives[i];
    if (seq.positive) throw std::invalid_argument("positive sequence among negatives");
    if (seq.events.empty()) throw std::invalid_argument("empty negative sequence");
    const int node = insert_path(seq, seq.events.size() - 1);
    const int sym = dfa.intern_symbol(seq.events.back());
    if (dfa.next[node].count(sym) > 0) {
      // Also a positive prefix: keep the transition, drop the mark.
      result.conflicted[i] = true;
      ++dfa.n_conflicts;
    } else {
      dfa.reject_marks.insert({node, sym});
    }
  }
  return result;
}

namespace dfa_detail {

// Union-find over DFA nodes during state merging.
struct Partition {
  std::vector<int> parent;
  explicit Partition(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

struct MergeAttempt {
  const Dfa& base;
  Partition part;  // copy of the committed partition
  // Overlays for nodes whose outgoing maps changed during this attempt.
  std::map<int, std::map<int, int>> children;
  std::map<int, std::map<int, EdgeStats>> stats;

  const std::map<int, int>& children_of(int rep) const {
    auto it = children.find(rep);
    return it != children.end() ? it->second : base.next[rep];
  }
  const std::map<int, EdgeStats>& stats_of(int rep) const {
    auto it = stats.find(rep);
    return it != stats.end() ? it->second : base.stats[rep];
  }

  // Folds y's group into x's. Returns false on an observation contradiction:
  // an atom observed true before an event at one state and false before the
  // same event at the other cannot describe one automaton state.
  bool unify(int x, int y) {
    x = part.find(x);
    y = part.find(y);
    if (x == y) return true;
    const std::map<int, EdgeStats> sx = stats_of(x);
    const std::map<int, EdgeStats> sy = stats_of(y);
    for (const auto& [sym, st] : sy) {
      auto it = sx.find(sym);
      if (it == sx.end()) continue;
      if (intersects(it->second.a_true, st.a_false) ||
          intersects(it->second.a_false, st.a_true))
        return false;
    }
    const std::map<int, int> cx = children_of(x);
    const std::map<int, int> cy = children_of(y);
    part.parent[y] = x;
    std::map<int, int> merged_children = cx;
    std::map<int, EdgeStats> merged_stats = sx;
    for (const auto& [sym, st] : sy) merged_stats[sym].merge(st);
    stats[x] = std::move(merged_stats);
    std::vector<std::pair<int, int>> todo;
    for (const auto& [sym, child] : cy) {
      auto it = merged_children.find(sym);
      if (it == merged_children.end())
        merged_children[sym] = child;
      else
        todo.emplace_back(it->second, child);
    }
    children[x] = std::move(merged_children);
    for (const auto& [a, b] : todo)
      if (!unify(a, b)) return false;
    return true;
  }

  bool marks_respected() {
    for (const auto& [node, sym] : base.reject_marks) {
      const int rep = part.find(node);
      if (children_of(rep).count(sym) > 0) return false;
    }
    return true;
  }
};

}  // namespace dfa_detail

// RPNI-style state merging. Nodes are considered in breadth-first
// lexicographic order; a merge is kept only if every reject mark stays a
// non-transition and no observation contradiction arises.
inline Dfa induce_dfa(const Dfa& pta) {
  using dfa_detail::MergeAttempt;
  using dfa_detail::Partition;

  // Working copy whose node slots hold group-level maps for representatives.
  Dfa work = pta;
  Partition part(work.size());

  // Breadth-first lexicographic rank of the original tree nodes.
  std::vector<int> rank(work.size(), 0);
  {
    std::vector<int> order;
    order.push_back(work.root());
    for (std::size_t i = 0; i < order.size(); ++i)
      for (const auto& [sym, child] : work.next[order[i]]) order.push_back(child);
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  }

  const auto try_merge = [&](int red, int blue) -> bool {
    MergeAttempt attempt{work, part, {}, {}};
    if (!attempt.unify(red, blue)) return false;
    if (!attempt.marks_respected()) return false;
    // Commit: move merged maps into representative slots.
    part = attempt.part;
    for (auto& [rep, m] : attempt.children) work.next[rep] = std::move(m);
    for (auto& [rep, m] : attempt.stats) work.stats[rep] = std::move(m);
    return true;
  };

  std::vector<int> reds = {work.root()};
  while (true) {
    // Cascaded merges can fold one red group into another, so normalize the
    // red list to distinct representatives first.
    std::set<int> red_set;
    std::vector<int> red_reps;
    for (const int r : reds) {
      const int rep = part.find(r);
      if (red_set.insert(rep).second) red_reps.push_back(rep);
    }
    std::sort(red_reps.begin(), red_reps.end(),
              [&](int a, int b) { return rank[a] < rank[b]; });
    reds = red_reps;

    // Blue: lowest-ranked unmerged child of a red representative.
    int blue = -1;
    for (const int r : reds) {
      for (const auto& [sym, child] : work.next[r]) {
        const int rep = part.find(child);
        if (red_set.count(rep) > 0) continue;
        if (blue < 0 || rank[rep] < rank[blue]) blue = rep;
      }
    }
    if (blue < 0) break;
    bool merged = false;
    for (const int r : reds) {
      if (try_merge(part.find(r), blue)) {
        merged = true;
        break;
      }
    }
    if (!merged) reds.push_back(blue);
  }

  // Compact the partition into a fresh automaton, breadth-first.
  Dfa out;
  out.alphabet = work.alphabet;
  out.symbols = work.symbols;
  out.atom_index = work.atom_index;
  out.n_conflicts = work.n_conflicts;
  std::map<int, int> new_id;
  std::vector<int> order;
  const int root_rep = part.find(work.root());
  new_id[root_rep] = out.add_node();
  order.push_back(root_rep);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int rep = order[i];
    for (const auto& [sym, child] : work.next[rep]) {
      const int crep = part.find(child);
      if (new_id.count(crep) == 0) {
        new_id[crep] = out.add_node();
        order.push_back(crep);
      }
      out.next[new_id[rep]][sym] = new_id[crep];
    }
    out.stats[new_id[rep]] = work.stats[rep];
  }
  for (const auto& [node, sym] : work.reject_marks) {
    const int rep = part.find(node);
    if (new_id.count(rep) > 0) out.reject_marks.insert({new_id[rep], sym});
  }
  return out;
}

inline std::string to_dot(const Dfa& dfa) {
  std::ostringstream out;
  out << "digraph dfa {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (std::size_t n = 0; n < dfa.size(); ++n)
    for (const auto& [sym, child] : dfa.next[n])
      out << "  q" << n << " -> q" << child << " [label=\""
          << to_string(dfa.alphabet[sym]) << "\"];\n";
  for (const auto& [node, sym] : dfa.reject_marks)
    out << "  q" << node << " -> reject [label=\"" << to_string(dfa.alphabet[sym])
        << "\", style=dashed];\n";
  out << "}\n";
  return out.str();
}

}  // namespace tempolearn
