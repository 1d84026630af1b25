#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "tempolearn/rational.hpp"

namespace tempolearn {

// A grounded or lifted proposition. Lifted arguments start with '?'.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.predicate == b.predicate && a.args == b.args;
  }
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
  friend bool operator<(const Atom& a, const Atom& b) {
    return std::tie(a.predicate, a.args) < std::tie(b.predicate, b.args);
  }
};

inline std::string to_string(const Atom& a) {
  std::string out = "(" + a.predicate;
  for (const auto& arg : a.args) out += " " + arg;
  return out + ")";
}

struct Literal {
  Atom atom;
  bool negated = false;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.atom == b.atom && a.negated == b.negated;
  }
  friend bool operator!=(const Literal& a, const Literal& b) { return !(a == b); }
  friend bool operator<(const Literal& a, const Literal& b) {
    return std::tie(a.atom, a.negated) < std::tie(b.atom, b.negated);
  }
};

inline std::string to_string(const Literal& l) {
  return l.negated ? "(not " + to_string(l.atom) + ")" : to_string(l.atom);
}

struct PredicateSchema {
  std::string name;
  std::vector<std::string> param_names;  // "?x" style, for printing
  std::vector<std::string> param_types;

  friend bool operator==(const PredicateSchema& a, const PredicateSchema& b) {
    return a.name == b.name && a.param_types == b.param_types;
  }
};

struct Parameter {
  std::string name;  // "?x"
  std::string type;

  friend bool operator==(const Parameter& a, const Parameter& b) {
    return a.name == b.name && a.type == b.type;
  }
};

struct TypedObject {
  std::string name;
  std::string type;

  friend bool operator==(const TypedObject& a, const TypedObject& b) {
    return a.name == b.name && a.type == b.type;
  }
  friend bool operator<(const TypedObject& a, const TypedObject& b) {
    return std::tie(a.name, a.type) < std::tie(b.name, b.type);
  }
};

// Single-inheritance type tree rooted at "object".
struct TypeTree {
  std::map<std::string, std::string> parent;  // type -> supertype; "object" absent

  void add(const std::string& type, const std::string& super) {
    if (type == "object") return;
    parent[type] = super;
  }
  bool known(const std::string& type) const {
    return type == "object" || parent.count(type) > 0;
  }
  bool is_subtype(const std::string& sub, const std::string& super) const {
    std::string t = sub;
    while (true) {
      if (t == super) return true;
      if (t == "object") return false;
      auto it = parent.find(t);
      if (it == parent.end()) return false;
      t = it->second;
    }
  }
};

// States are sets of ground atoms (closed-world at the model level).
using State = std::set<Atom>;

// A partially observed state: atoms known true, atoms known false, the rest
// unknown. Fully observed states have false = universe \ true.
struct ObservedState {
  std::set<Atom> known_true;
  std::set<Atom> known_false;

  bool observed(const Atom& a) const {
    return known_true.count(a) > 0 || known_false.count(a) > 0;
  }
  bool value(const Atom& a) const { return known_true.count(a) > 0; }
};

inline ObservedState observe_fully(const State& s, const std::vector<Atom>& universe) {
  ObservedState o;
  o.known_true = s;
  for (const auto& a : universe)
    if (s.count(a) == 0) o.known_false.insert(a);
  return o;
}

namespace detail {
template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}
}  // namespace detail

// Classical (event-level) operator: preconditions, adds, deletes.
struct ClassicalOperator {
  std::string name;
  std::vector<Parameter> params;
  std::vector<Literal> preconditions;
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;

  void canonicalize() {
    detail::sort_unique(preconditions);
    detail::sort_unique(add_effects);
    detail::sort_unique(del_effects);
  }

  friend bool operator==(const ClassicalOperator& a, const ClassicalOperator& b) {
    return a.name == b.name && a.params == b.params &&
           a.preconditions == b.preconditions && a.add_effects == b.add_effects &&
           a.del_effects == b.del_effects;
  }
};

// Durative operator with the seven PDDL 2.1 condition/effect slots.
struct DurativeOperator {
  std::string name;
  std::vector<Parameter> params;
  Rational duration{1};
  std::vector<Literal> pre_start;
  std::vector<Literal> pre_overall;
  std::vector<Literal> pre_end;
  std::vector<Atom> add_start;
  std::vector<Atom> del_start;
  std::vector<Atom> add_end;
  std::vector<Atom> del_end;

  void canonicalize() {
    detail::sort_unique(pre_start);
    detail::sort_unique(pre_overall);
    detail::sort_unique(pre_end);
    detail::sort_unique(add_start);
    detail::sort_unique(del_start);
    detail::sort_unique(add_end);
    detail::sort_unique(del_end);
  }

  friend bool operator==(const DurativeOperator& a, const DurativeOperator& b) {
    return a.name == b.name && a.params == b.params && a.duration == b.duration &&
           a.pre_start == b.pre_start && a.pre_overall == b.pre_overall &&
           a.pre_end == b.pre_end && a.add_start == b.add_start &&
           a.del_start == b.del_start && a.add_end == b.add_end &&
           a.del_end == b.del_end;
  }
  friend bool operator!=(const DurativeOperator& a, const DurativeOperator& b) {
    return !(a == b);
  }
};

struct Domain {
  std::string name;
  TypeTree types;
  std::vector<PredicateSchema> predicates;
  std::vector<TypedObject> constants;
  std::vector<ClassicalOperator> operators;
  bool negative_preconditions = false;

  const ClassicalOperator* find(const std::string& op) const {
    for (const auto& o : operators)
      if (o.name == op) return &o;
    return nullptr;
  }
};

struct TemporalDomain {
  std::string name;
  TypeTree types;
  std::vector<PredicateSchema> predicates;
  std::vector<TypedObject> constants;
  std::vector<DurativeOperator> operators;
  bool negative_preconditions = false;

  const DurativeOperator* find(const std::string& op) const {
    for (const auto& o : operators)
      if (o.name == op) return &o;
    return nullptr;
  }

  friend bool operator==(const TemporalDomain& a, const TemporalDomain& b) {
    return a.name == b.name && a.predicates.size() == b.predicates.size() &&
           a.operators == b.operators;
  }
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedObject> objects;
  State init;
  std::vector<Literal> goal;
};

// ---------------------------------------------------------------------------
// Grounding

struct Binding {
  // Parameter name -> object name.
  std::map<std::string, std::string> map;

  std::string resolve(const std::string& term) const {
    if (!term.empty() && term[0] == '?') {
      auto it = map.find(term);
      if (it == map.end())
        throw std::invalid_argument("unbound variable " + term + " in grounding");
      return it->second;
    }
    return term;
  }
};

inline Atom ground_atom(const Atom& a, const Binding& b) {
  Atom out;
  out.predicate = a.predicate;
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(b.resolve(t));
  return out;
}

inline Literal ground_literal(const Literal& l, const Binding& b) {
  return Literal{ground_atom(l.atom, b), l.negated};
}

// A grounded classical action: operator name plus bound arguments.
struct GroundAction {
  std::string op;
  std::vector<std::string> args;
  std::vector<Literal> preconditions;
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;

  friend bool operator==(const GroundAction& a, const GroundAction& b) {
    return a.op == b.op && a.args == b.args;
  }
  friend bool operator<(const GroundAction& a, const GroundAction& b) {
    return std::tie(a.op, a.args) < std::tie(b.op, b.args);
  }
};

struct GroundDurative {
  std::string op;
  std::vector<std::string> args;
  Rational duration{1};
  std::vector<Literal> pre_start, pre_overall, pre_end;
  std::vector<Atom> add_start, del_start, add_end, del_end;

  friend bool operator==(const GroundDurative& a, const GroundDurative& b) {
    return a.op == b.op && a.args == b.args;
  }
  friend bool operator<(const GroundDurative& a, const GroundDurative& b) {
    return std::tie(a.op, a.args) < std::tie(b.op, b.args);
  }
};

inline std::string to_string(const GroundAction& a) {
  std::string out = "(" + a.op;
  for (const auto& arg : a.args) out += " " + arg;
  return out + ")";
}

inline std::string to_string(const GroundDurative& a) {
  std::string out = "(" + a.op;
  for (const auto& arg : a.args) out += " " + arg;
  return out + ")";
}

namespace detail {

// Enumerates all type-consistent argument tuples in lexicographic object order.
inline void enumerate_bindings(const std::vector<Parameter>& params,
                               const std::vector<TypedObject>& objects,
                               const TypeTree& types,
                               std::vector<std::vector<std::string>>& out) {
  std::vector<std::vector<std::string>> candidates(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (const auto& obj : objects)
      if (types.is_subtype(obj.type, params[i].type))
        candidates[i].push_back(obj.name);
    std::sort(candidates[i].begin(), candidates[i].end());
  }
  std::vector<std::string> tuple(params.size());
  const auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == params.size()) {
      out.push_back(tuple);
      return;
    }
    for (const auto& c : candidates[i]) {
      tuple[i] = c;
      self(self, i + 1);
    }
  };
  recurse(recurse, 0);
}

inline Binding make_binding(const std::vector<Parameter>& params,
                            const std::vector<std::string>& args) {
  if (params.size() != args.size())
    throw std::invalid_argument("arity mismatch in binding");
  Binding b;
  for (std::size_t i = 0; i < params.size(); ++i) b.map[params[i].name] = args[i];
  return b;
}

}  // namespace detail

// All ground instances of all operators, ordered by (operator name, args).
inline std::vector<GroundAction> ground(const Domain& domain,
                                        const std::vector<TypedObject>& objects) {
  std::vector<TypedObject> all = objects;
  all.insert(all.end(), domain.constants.begin(), domain.constants.end());
  std::vector<GroundAction> out;
  std::vector<const ClassicalOperator*> ops;
  for (const auto& o : domain.operators) ops.push_back(&o);
  std::sort(ops.begin(), ops.end(),
            [](const auto* a, const auto* b) { return a->name < b->name; });
  for (const auto* o : ops) {
    std::vector<std::vector<std::string>> tuples;
    detail::enumerate_bindings(o->params, all, domain.types, tuples);
    for (const auto& t : tuples) {
      const Binding b = detail::make_binding(o->params, t);
      GroundAction g;
      g.op = o->name;
      g.args = t;
      for (const auto& l : o->preconditions) g.preconditions.push_back(ground_literal(l, b));
      for (const auto& a : o->add_effects) g.add_effects.push_back(ground_atom(a, b));
      for (const auto& a : o->del_effects) g.del_effects.push_back(ground_atom(a, b));
      out.push_back(std::move(g));
    }
  }
  return out;
}

inline std::vector<GroundDurative> ground(const TemporalDomain& domain,
                                          const std::vector<TypedObject>& objects) {
  std::vector<TypedObject> all = objects;
  all.insert(all.end(), domain.constants.begin(), domain.constants.end());
  std::vector<GroundDurative> out;
  std::vector<const DurativeOperator*> ops;
  for (const auto& o : domain.operators) ops.push_back(&o);
  std::sort(ops.begin(), ops.end(),
            [](const auto* a, const auto* b) { return a->name < b->name; });
  for (const auto* o : ops) {
    std::vector<std::vector<std::string>> tuples;
    detail::enumerate_bindings(o->params, all, domain.types, tuples);
    for (const auto& t : tuples) {
      const Binding b = detail::make_binding(o->params, t);
      GroundDurative g;
      g.op = o->name;
      g.args = t;
      g.duration = o->duration;
      for (const auto& l : o->pre_start) g.pre_start.push_back(ground_literal(l, b));
      for (const auto& l : o->pre_overall) g.pre_overall.push_back(ground_literal(l, b));
      for (const auto& l : o->pre_end) g.pre_end.push_back(ground_literal(l, b));
      for (const auto& a : o->add_start) g.add_start.push_back(ground_atom(a, b));
      for (const auto& a : o->del_start) g.del_start.push_back(ground_atom(a, b));
      for (const auto& a : o->add_end) g.add_end.push_back(ground_atom(a, b));
      for (const auto& a : o->del_end) g.del_end.push_back(ground_atom(a, b));
      out.push_back(std::move(g));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classical transition function

inline bool holds(const Literal& l, const State& s) {
  const bool present = s.count(l.atom) > 0;
  return l.negated ? !present : present;
}

struct ApplyResult {
  bool applicable = false;
  State state;                      // successor when applicable
  std::optional<Literal> violated;  // first violated precondition otherwise
};

// gamma(s, a): successor (s + adds) - dels, applicable iff preconditions hold.
inline ApplyResult apply_classical(const State& s, const GroundAction& a) {
  ApplyResult r;
  std::vector<Literal> pre = a.preconditions;
  std::sort(pre.begin(), pre.end());
  for (const auto& l : pre) {
    if (!holds(l, s)) {
      r.violated = l;
      return r;
    }
  }
  r.applicable = true;
  r.state = s;
  for (const auto& atom : a.add_effects) r.state.insert(atom);
  for (const auto& atom : a.del_effects) r.state.erase(atom);
  return r;
}

// ---------------------------------------------------------------------------
// Lifted atom universe

// All atoms formable over an operator's parameters: one entry per predicate
// and type-consistent tuple of parameters (repeats allowed). This is the
// candidate-atom universe for induction, search neighborhoods, and the
// syntactic-error denominator. Atoms that would need objects outside the
// parameter list do not exist at this level.
inline std::vector<Atom> lifted_atom_universe(const std::vector<PredicateSchema>& predicates,
                                              const std::vector<Parameter>& params,
                                              const TypeTree& types) {
  std::vector<Atom> out;
  for (const auto& p : predicates) {
    std::vector<std::vector<std::string>> candidates(p.param_types.size());
    for (std::size_t i = 0; i < p.param_types.size(); ++i)
      for (const auto& param : params)
        if (types.is_subtype(param.type, p.param_types[i]))
          candidates[i].push_back(param.name);
    std::vector<std::string> tuple(p.param_types.size());
    const auto recurse = [&](auto&& self, std::size_t i) -> void {
      if (i == p.param_types.size()) {
        out.push_back(Atom{p.name, tuple});
        return;
      }
      for (const auto& c : candidates[i]) {
        tuple[i] = c;
        self(self, i + 1);
      }
    };
    recurse(recurse, 0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tempolearn
