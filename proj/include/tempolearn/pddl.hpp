#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tempolearn/model.hpp"
#include "tempolearn/sexpr.hpp"

namespace tempolearn {

// PDDL reader/writer for the fragment the learner works in: STRIPS with
// typing, durative actions, and optional negative preconditions. Anything
// outside the fragment is rejected with an error naming the construct.

namespace pddl_detail {

struct TypedNames {
  std::vector<TypedObject> entries;
};

// Parses "a b - t c d - t2 e": names followed by optional "- type" groups.
// Untyped trailing names default to "object".
inline TypedNames parse_typed_list(const Sexpr& list, std::size_t begin = 0) {
  TypedNames out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < list.size(); ++i) {
    const Sexpr& item = list.at(i);
    if (item.is_list) {
      if (item.head() == "either")
        throw ParseError("either types are not supported", item.line, item.column);
      throw ParseError("unexpected list in typed list", item.line, item.column);
    }
    if (item.symbol == "-") {
      if (i + 1 >= list.size())
        throw ParseError("missing type after '-'", item.line, item.column);
      const Sexpr& type = list.at(i + 1);
      if (type.is_list) {
        if (type.head() == "either")
          throw ParseError("either types are not supported", type.line, type.column);
        throw ParseError("expected type name", type.line, type.column);
      }
      for (const auto& n : pending) out.entries.push_back({n, type.symbol});
      pending.clear();
      ++i;
    } else {
      pending.push_back(item.symbol);
    }
  }
  for (const auto& n : pending) out.entries.push_back({n, "object"});
  return out;
}

struct SymbolTable {
  const TypeTree* types = nullptr;
  std::map<std::string, PredicateSchema> predicates;
  std::map<std::string, std::string> var_types;    // bound parameters
  std::map<std::string, std::string> const_types;  // domain constants / objects

  std::string term_type(const Sexpr& term) const {
    if (term.symbol.empty() || term.is_list)
      throw ParseError("expected atom argument", term.line, term.column);
    if (term.symbol[0] == '?') {
      auto it = var_types.find(term.symbol);
      if (it == var_types.end())
        throw ParseError("unbound variable " + term.symbol, term.line, term.column);
      return it->second;
    }
    auto it = const_types.find(term.symbol);
    if (it == const_types.end())
      throw ParseError("unknown object " + term.symbol, term.line, term.column);
    return it->second;
  }
};

inline Atom parse_atom(const Sexpr& s, const SymbolTable& table) {
  if (!s.is_list || s.items.empty() || s.items[0].is_list)
    throw ParseError("expected atom", s.line, s.column);
  const std::string& pred = s.items[0].symbol;
  auto it = table.predicates.find(pred);
  if (it == table.predicates.end())
    throw ParseError("unknown predicate " + pred, s.line, s.column);
  const PredicateSchema& schema = it->second;
  if (s.size() - 1 != schema.param_types.size())
    throw ParseError("predicate " + pred + " expects " +
                         std::to_string(schema.param_types.size()) + " arguments, got " +
                         std::to_string(s.size() - 1),
                     s.line, s.column);
  Atom atom;
  atom.predicate = pred;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const Sexpr& term = s.at(i);
    const std::string type = table.term_type(term);
    if (!table.types->is_subtype(type, schema.param_types[i - 1]))
      throw ParseError("argument " + term.symbol + " of " + pred + " has type " + type +
                           ", expected " + schema.param_types[i - 1],
                       term.line, term.column);
    atom.args.push_back(term.symbol);
  }
  return atom;
}

inline Literal parse_literal(const Sexpr& s, const SymbolTable& table,
                             bool allow_negative) {
  if (s.is_list && s.head() == "not") {
    if (!allow_negative)
      throw ParseError("negative literal not allowed here", s.line, s.column);
    if (s.size() != 2) throw ParseError("malformed (not ...)", s.line, s.column);
    return Literal{parse_atom(s.at(1), table), true};
  }
  return Literal{parse_atom(s, table), false};
}

inline void parse_condition_body(const Sexpr& s, const SymbolTable& table,
                                 bool allow_negative, std::vector<Literal>& out) {
  if (s.is_list && s.head() == "and") {
    for (std::size_t i = 1; i < s.size(); ++i)
      parse_condition_body(s.at(i), table, allow_negative, out);
    return;
  }
  out.push_back(parse_literal(s, table, allow_negative));
}

inline void parse_effect_body(const Sexpr& s, const SymbolTable& table,
                              std::vector<Atom>& adds, std::vector<Atom>& dels) {
  if (s.is_list && s.head() == "and") {
    for (std::size_t i = 1; i < s.size(); ++i)
      parse_effect_body(s.at(i), table, adds, dels);
    return;
  }
  if (s.is_list && s.head() == "not") {
    if (s.size() != 2) throw ParseError("malformed (not ...)", s.line, s.column);
    dels.push_back(parse_atom(s.at(1), table));
    return;
  }
  if (s.is_list && (s.head() == "increase" || s.head() == "decrease" ||
                    s.head() == "assign" || s.head() == "when" || s.head() == "forall"))
    throw ParseError("unsupported effect construct " + s.head(), s.line, s.column);
  adds.push_back(parse_atom(s, table));
}

// A :condition is a conjunction of (at start ...) / (over all ...) /
// (at end ...) blocks, each wrapping a literal or a conjunction of literals.
inline void parse_timed_condition(const Sexpr& s, const SymbolTable& table,
                                  bool allow_negative, DurativeOperator& op) {
  if (s.is_list && s.head() == "and") {
    for (std::size_t i = 1; i < s.size(); ++i)
      parse_timed_condition(s.at(i), table, allow_negative, op);
    return;
  }
  if (!s.is_list || s.size() != 3)
    throw ParseError("expected (at start ...), (over all ...) or (at end ...)", s.line,
                     s.column);
  const std::string head = s.head();
  const std::string when = s.at(1).symbol;
  if (head == "at" && when == "start")
    parse_condition_body(s.at(2), table, allow_negative, op.pre_start);
  else if (head == "at" && when == "end")
    parse_condition_body(s.at(2), table, allow_negative, op.pre_end);
  else if (head == "over" && when == "all")
    parse_condition_body(s.at(2), table, allow_negative, op.pre_overall);
  else
    throw ParseError("unknown temporal qualifier (" + head + " " + when + ")", s.line,
                     s.column);
}

inline void parse_timed_effect(const Sexpr& s, const SymbolTable& table,
                               DurativeOperator& op) {
  if (s.is_list && s.head() == "and") {
    for (std::size_t i = 1; i < s.size(); ++i) parse_timed_effect(s.at(i), table, op);
    return;
  }
  if (!s.is_list || s.size() != 3)
    throw ParseError("expected (at start ...) or (at end ...) effect", s.line, s.column);
  const std::string head = s.head();
  const std::string when = s.at(1).symbol;
  if (head == "over" && when == "all")
    throw ParseError("over all effects are not part of the language", s.line, s.column);
  if (head != "at" || (when != "start" && when != "end"))
    throw ParseError("unknown temporal qualifier (" + head + " " + when + ")", s.line,
                     s.column);
  if (when == "start")
    parse_effect_body(s.at(2), table, op.add_start, op.del_start);
  else
    parse_effect_body(s.at(2), table, op.add_end, op.del_end);
}

inline Rational parse_duration(const Sexpr& s) {
  // (= ?duration <rational>)
  if (!s.is_list || s.size() != 3 || s.head() != "=" || s.at(1).symbol != "?duration")
    throw ParseError("expected (= ?duration <number>)", s.line, s.column);
  const Sexpr& value = s.at(2);
  if (value.is_list) throw ParseError("expected numeric duration", value.line, value.column);
  try {
    return parse_rational(value.symbol);
  } catch (const std::exception&) {
    throw ParseError("malformed duration " + value.symbol, value.line, value.column);
  }
}

static const std::set<std::string> kSupportedRequirements = {
    ":strips", ":typing", ":durative-actions", ":negative-preconditions"};

struct DomainHeader {
  std::string name;
  TypeTree types;
  std::vector<PredicateSchema> predicates;
  std::vector<TypedObject> constants;
  bool negative_preconditions = false;
};

inline std::vector<Parameter> parse_parameters(const Sexpr& list, const TypeTree& types) {
  TypedNames names = parse_typed_list(list);
  std::vector<Parameter> params;
  for (const auto& e : names.entries) {
    if (e.name.empty() || e.name[0] != '?')
      throw ParseError("parameter " + e.name + " must start with '?'", list.line,
                       list.column);
    if (!types.known(e.type))
      throw ParseError("unknown type " + e.type, list.line, list.column);
    params.push_back({e.name, e.type});
  }
  return params;
}

inline DomainHeader parse_domain_header(const Sexpr& top, bool expect_durative) {
  if (!top.is_list || top.head() != "define")
    throw ParseError("expected (define (domain ...))", top.line, top.column);
  DomainHeader h;
  if (top.size() < 2 || top.at(1).head() != "domain" || top.at(1).size() != 2)
    throw ParseError("expected (domain <name>)", top.line, top.column);
  h.name = top.at(1).at(1).symbol;
  for (std::size_t i = 2; i < top.size(); ++i) {
    const Sexpr& section = top.at(i);
    const std::string head = section.head();
    if (head == ":requirements") {
      for (std::size_t j = 1; j < section.size(); ++j) {
        const std::string& req = section.at(j).symbol;
        if (kSupportedRequirements.count(req) == 0)
          throw ParseError("unsupported requirement " + req, section.at(j).line,
                           section.at(j).column);
        if (req == ":negative-preconditions") h.negative_preconditions = true;
        if (req == ":durative-actions" && !expect_durative)
          throw ParseError("durative actions in a classical domain", section.at(j).line,
                           section.at(j).column);
      }
    } else if (head == ":types") {
      TypedNames names = parse_typed_list(section, 1);
      for (const auto& e : names.entries) h.types.add(e.name, e.type);
      for (const auto& e : names.entries)
        if (e.type != "object" && !h.types.known(e.type))
          throw ParseError("unknown supertype " + e.type, section.line, section.column);
    } else if (head == ":constants") {
      TypedNames names = parse_typed_list(section, 1);
      for (const auto& e : names.entries) {
        if (!h.types.known(e.type))
          throw ParseError("unknown type " + e.type, section.line, section.column);
        h.constants.push_back(e);
      }
    } else if (head == ":predicates") {
      for (std::size_t j = 1; j < section.size(); ++j) {
        const Sexpr& p = section.at(j);
        if (!p.is_list || p.items.empty())
          throw ParseError("malformed predicate declaration", p.line, p.column);
        PredicateSchema schema;
        schema.name = p.items[0].symbol;
        TypedNames names = parse_typed_list(p, 1);
        for (const auto& e : names.entries) {
          if (!h.types.known(e.type))
            throw ParseError("unknown type " + e.type, p.line, p.column);
          schema.param_names.push_back(e.name);
          schema.param_types.push_back(e.type);
        }
        h.predicates.push_back(schema);
      }
    }
  }
  return h;
}

inline SymbolTable make_table(const DomainHeader& h) {
  SymbolTable table;
  table.types = nullptr;  // set by caller once the header is stored
  for (const auto& p : h.predicates) table.predicates[p.name] = p;
  for (const auto& c : h.constants) table.const_types[c.name] = c.type;
  return table;
}

}  // namespace pddl_detail

inline TemporalDomain parse_temporal_domain(const std::string& text) {
  SexprReader reader(text);
  const auto forms = reader.read_all();
  if (forms.empty()) throw ParseError("empty domain file", 1, 1);
  const Sexpr& top = forms[0];
  pddl_detail::DomainHeader h = pddl_detail::parse_domain_header(top, true);

  TemporalDomain domain;
  domain.name = h.name;
  domain.types = h.types;
  domain.predicates = h.predicates;
  domain.constants = h.constants;
  domain.negative_preconditions = h.negative_preconditions;

  pddl_detail::SymbolTable table = pddl_detail::make_table(h);
  table.types = &domain.types;

  for (std::size_t i = 2; i < top.size(); ++i) {
    const Sexpr& section = top.at(i);
    const std::string head = section.head();
    if (head == ":action")
      throw ParseError("classical action in a durative domain", section.line,
                       section.column);
    if (head != ":durative-action") continue;
    if (section.size() < 2 || section.at(1).is_list)
      throw ParseError("missing action name", section.line, section.column);
    DurativeOperator op;
    op.name = section.at(1).symbol;
    bool saw_duration = false;
    table.var_types.clear();
    for (std::size_t j = 2; j + 1 < section.size(); j += 2) {
      const std::string& key = section.at(j).symbol;
      const Sexpr& value = section.at(j + 1);
      if (key == ":parameters") {
        op.params = pddl_detail::parse_parameters(value, domain.types);
        for (const auto& p : op.params) table.var_types[p.name] = p.type;
      } else if (key == ":duration") {
        op.duration = pddl_detail::parse_duration(value);
        saw_duration = true;
      } else if (key == ":condition") {
        if (value.is_list && value.items.empty()) continue;  // ()
        pddl_detail::parse_timed_condition(value, table, h.negative_preconditions, op);
      } else if (key == ":effect") {
        if (value.is_list && value.items.empty()) continue;
        pddl_detail::parse_timed_effect(value, table, op);
      } else {
        throw ParseError("unknown action section " + key, section.at(j).line,
                         section.at(j).column);
      }
    }
    if (!saw_duration)
      throw ParseError("durative action " + op.name + " has no :duration", section.line,
                       section.column);
    op.canonicalize();
    domain.operators.push_back(op);
  }
  return domain;
}

inline Domain parse_classical_domain(const std::string& text) {
  SexprReader reader(text);
  const auto forms = reader.read_all();
  if (forms.empty()) throw ParseError("empty domain file", 1, 1);
  const Sexpr& top = forms[0];
  pddl_detail::DomainHeader h = pddl_detail::parse_domain_header(top, false);

  Domain domain;
  domain.name = h.name;
  domain.types = h.types;
  domain.predicates = h.predicates;
  domain.constants = h.constants;
  domain.negative_preconditions = h.negative_preconditions;

  pddl_detail::SymbolTable table = pddl_detail::make_table(h);
  table.types = &domain.types;

  for (std::size_t i = 2; i < top.size(); ++i) {
    const Sexpr& section = top.at(i);
    const std::string head = section.head();
    if (head == ":durative-action")
      throw ParseError("durative action in a classical domain", section.line,
                       section.column);
    if (head != ":action") continue;
    if (section.size() < 2 || section.at(1).is_list)
      throw ParseError("missing action name", section.line, section.column);
    ClassicalOperator op;
    op.name = section.at(1).symbol;
    table.var_types.clear();
    for (std::size_t j = 2; j + 1 < section.size(); j += 2) {
      const std::string& key = section.at(j).symbol;
      const Sexpr& value = section.at(j + 1);
      if (key == ":parameters") {
        op.params = pddl_detail::parse_parameters(value, domain.types);
        for (const auto& p : op.params) table.var_types[p.name] = p.type;
      } else if (key == ":precondition") {
        if (value.is_list && value.items.empty()) continue;
        pddl_detail::parse_condition_body(value, table, h.negative_preconditions,
                                          op.preconditions);
      } else if (key == ":effect") {
        if (value.is_list && value.items.empty()) continue;
        pddl_detail::parse_effect_body(value, table, op.add_effects, op.del_effects);
      } else {
        throw ParseError("unknown action section " + key, section.at(j).line,
                         section.at(j).column);
      }
    }
    op.canonicalize();
    domain.operators.push_back(op);
  }
  return domain;
}

template <typename DomainT>
inline Problem parse_problem(const std::string& text, const DomainT& domain) {
  SexprReader reader(text);
  const auto forms = reader.read_all();
  if (forms.empty()) throw ParseError("empty problem file", 1, 1);
  const Sexpr& top = forms[0];
  if (!top.is_list || top.head() != "define")
    throw ParseError("expected (define (problem ...))", top.line, top.column);
  Problem problem;
  if (top.size() < 2 || top.at(1).head() != "problem" || top.at(1).size() != 2)
    throw ParseError("expected (problem <name>)", top.line, top.column);
  problem.name = top.at(1).at(1).symbol;

  pddl_detail::SymbolTable table;
  table.types = &domain.types;
  for (const auto& p : domain.predicates) table.predicates[p.name] = p;
  for (const auto& c : domain.constants) table.const_types[c.name] = c.type;

  for (std::size_t i = 2; i < top.size(); ++i) {
    const Sexpr& section = top.at(i);
    const std::string head = section.head();
    if (head == ":domain") {
      problem.domain_name = section.at(1).symbol;
      if (problem.domain_name != domain.name)
        throw ParseError("problem references domain " + problem.domain_name +
                             ", expected " + domain.name,
                         section.line, section.column);
    } else if (head == ":objects") {
      pddl_detail::TypedNames names = pddl_detail::parse_typed_list(section, 1);
      for (const auto& e : names.entries) {
        if (!domain.types.known(e.type))
          throw ParseError("unknown type " + e.type, section.line, section.column);
        problem.objects.push_back(e);
        table.const_types[e.name] = e.type;
      }
    } else if (head == ":init") {
      for (std::size_t j = 1; j < section.size(); ++j)
        problem.init.insert(pddl_detail::parse_atom(section.at(j), table));
    } else if (head == ":goal") {
      if (section.size() == 2)
        pddl_detail::parse_condition_body(section.at(1), table, true, problem.goal);
    } else {
      throw ParseError("unsupported problem section " + head, section.line,
                       section.column);
    }
  }
  return problem;
}

// ---------------------------------------------------------------------------
// Printing

namespace pddl_detail {

inline std::string format_typed(const std::vector<TypedObject>& entries) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += " ";
    out += entries[i].name + " - " + entries[i].type;
  }
  return out;
}

inline std::string format_params(const std::vector<Parameter>& params) {
  std::string out = "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += " ";
    out += params[i].name + " - " + params[i].type;
  }
  return out + ")";
}

inline void print_header(std::ostringstream& out, const std::string& name,
                         const TypeTree& types,
                         const std::vector<PredicateSchema>& predicates,
                         const std::vector<TypedObject>& constants, bool durative,
                         bool negative) {
  out << "(define (domain " << name << ")\n";
  out << "  (:requirements :strips :typing";
  if (durative) out << " :durative-actions";
  if (negative) out << " :negative-preconditions";
  out << ")\n";
  if (!types.parent.empty()) {
    out << "  (:types";
    for (const auto& [type, super] : types.parent) out << " " << type << " - " << super;
    out << ")\n";
  }
  if (!constants.empty()) out << "  (:constants " << format_typed(constants) << ")\n";
  out << "  (:predicates";
  for (const auto& p : predicates) {
    out << " (" << p.name;
    for (std::size_t i = 0; i < p.param_types.size(); ++i) {
      const std::string var =
          i < p.param_names.size() ? p.param_names[i] : "?x" + std::to_string(i);
      out << " " << var << " - " << p.param_types[i];
    }
    out << ")";
  }
  out << ")\n";
}

}  // namespace pddl_detail

inline std::string print_temporal_domain(const TemporalDomain& domain) {
  std::ostringstream out;
  pddl_detail::print_header(out, domain.name, domain.types, domain.predicates,
                            domain.constants, true, domain.negative_preconditions);
  for (DurativeOperator op : domain.operators) {
    op.canonicalize();
    out << "  (:durative-action " << op.name << "\n";
    out << "    :parameters " << pddl_detail::format_params(op.params) << "\n";
    out << "    :duration (= ?duration " << to_string(op.duration) << ")\n";
    out << "    :condition (and";
    for (const auto& l : op.pre_start) out << " (at start " << to_string(l) << ")";
    for (const auto& l : op.pre_overall) out << " (over all " << to_string(l) << ")";
    for (const auto& l : op.pre_end) out << " (at end " << to_string(l) << ")";
    out << ")\n";
    out << "    :effect (and";
    for (const auto& a : op.add_start) out << " (at start " << to_string(a) << ")";
    for (const auto& a : op.del_start) out << " (at start (not " << to_string(a) << "))";
    for (const auto& a : op.add_end) out << " (at end " << to_string(a) << ")";
    for (const auto& a : op.del_end) out << " (at end (not " << to_string(a) << "))";
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

inline std::string print_classical_domain(const Domain& domain) {
  std::ostringstream out;
  pddl_detail::print_header(out, domain.name, domain.types, domain.predicates,
                            domain.constants, false, domain.negative_preconditions);
  for (ClassicalOperator op : domain.operators) {
    op.canonicalize();
    out << "  (:action " << op.name << "\n";
    out << "    :parameters " << pddl_detail::format_params(op.params) << "\n";
    out << "    :precondition (and";
    for (const auto& l : op.preconditions) out << " " << to_string(l);
    out << ")\n";
    out << "    :effect (and";
    for (const auto& a : op.add_effects) out << " " << to_string(a);
    for (const auto& a : op.del_effects) out << " (not " << to_string(a) << ")";
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

inline std::string print_problem(const Problem& problem, const std::string& domain_name) {
  std::ostringstream out;
  out << "(define (problem " << problem.name << ")\n";
  out << "  (:domain " << domain_name << ")\n";
  out << "  (:objects " << pddl_detail::format_typed(problem.objects) << ")\n";
  out << "  (:init";
  for (const auto& a : problem.init) out << " " << to_string(a);
  out << ")\n";
  out << "  (:goal (and";
  for (const auto& l : problem.goal) out << " " << to_string(l);
  out << "))\n)\n";
  return out.str();
}

}  // namespace tempolearn
