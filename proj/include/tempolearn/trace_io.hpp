#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempolearn/simulate.hpp"

namespace tempolearn {

// Plain-text trace format, one record per sequence:
//
//   seq positive seed=42
//   state
//   +(handfree)
//   -(light m1)
//   state
//   ...
//   act t=0 dur=5 (light m1)
//   act t=0.5 dur=2 (mend f1 m1)
//
// Records are separated by blank lines. State blocks appear in transition
// order (one per reached state); unknown atoms are simply omitted. Negative
// records also carry a "fail" line describing the violation.

namespace trace_detail {

inline std::vector<std::string> tokenize_parens(const std::string& text, std::size_t& pos) {
  // Reads "(a b c)" starting at pos, returns tokens, advances pos past ')'.
  while (pos < text.size() && text[pos] == ' ') ++pos;
  if (pos >= text.size() || text[pos] != '(')
    throw std::runtime_error("expected '(' in trace line: " + text);
  ++pos;
  std::vector<std::string> tokens;
  std::string cur;
  while (pos < text.size() && text[pos] != ')') {
    if (text[pos] == ' ') {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur += text[pos];
    }
    ++pos;
  }
  if (pos >= text.size()) throw std::runtime_error("unbalanced '(' in trace line: " + text);
  ++pos;
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

inline Atom parse_trace_atom(const std::string& text, std::size_t& pos) {
  auto tokens = tokenize_parens(text, pos);
  if (tokens.empty()) throw std::runtime_error("empty atom in trace line: " + text);
  Atom a;
  a.predicate = tokens[0];
  a.args.assign(tokens.begin() + 1, tokens.end());
  return a;
}

inline std::string key_value(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0)
    throw std::runtime_error("expected " + key + "=... in trace header, got " + token);
  return token.substr(key.size() + 1);
}

}  // namespace trace_detail

inline void write_traces(std::ostream& out, const std::vector<TemporalTrace>& traces,
                         std::uint64_t seed) {
  for (const auto& trace : traces) {
    out << "seq " << (trace.feasible ? "positive" : "negative") << " seed=" << seed
        << "\n";
    for (const auto& st : trace.states) {
      out << "state\n";
      std::vector<Atom> atoms(st.known_true.begin(), st.known_true.end());
      for (const auto& a : atoms) out << "+" << to_string(a) << "\n";
      atoms.assign(st.known_false.begin(), st.known_false.end());
      for (const auto& a : atoms) out << "-" << to_string(a) << "\n";
    }
    for (const auto& ta : trace.actions) {
      out << "act t=" << to_string(ta.start) << " dur=" << to_string(ta.action.duration)
          << " " << to_string(ta.action) << "\n";
    }
    if (trace.failure) {
      const Violation& v = *trace.failure;
      out << "fail kind=" << to_string(v.kind) << " event=" << v.event_index
          << " action=" << v.pair_index << " "
          << (v.literal.negated ? "(not " + to_string(v.literal.atom) + ")"
                                : to_string(v.literal.atom))
          << "\n";
    }
    out << "\n";
  }
}

inline void write_traces(const std::string& path, const std::vector<TemporalTrace>& traces,
                         std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_traces(out, traces, seed);
}

struct TraceFile {
  std::vector<TemporalTrace> traces;
  std::uint64_t seed = 0;
};

// Reads trace records. Actions are reconstructed name-only; callers that
// need full operator definitions resolve them against a domain.
inline TraceFile read_traces(std::istream& in) {
  TraceFile file;
  TemporalTrace trace;
  bool in_record = false;
  std::string line;

  const auto flush = [&]() {
    if (!in_record) return;
    std::sort(trace.actions.begin(), trace.actions.end(),
              [](const TimedAction& a, const TimedAction& b) { return a.start < b.start; });
    trace.events = event_ordering(trace.actions);
    file.traces.push_back(std::move(trace));
    trace = TemporalTrace{};
    in_record = false;
  };

  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "seq") {
      flush();
      in_record = true;
      std::string label, seed_tok;
      ls >> label >> seed_tok;
      if (label != "positive" && label != "negative")
        throw std::runtime_error("bad sequence label '" + label + "' in trace file");
      trace.feasible = (label == "positive");
      file.seed = std::stoull(trace_detail::key_value(seed_tok, "seed"));
    } else if (word == "state") {
      if (!in_record) throw std::runtime_error("state block outside a sequence record");
      trace.states.emplace_back();
    } else if (word[0] == '+' || word[0] == '-') {
      if (trace.states.empty())
        throw std::runtime_error("atom entry before any state line");
      std::size_t pos = 1;
      Atom atom = trace_detail::parse_trace_atom(line, pos);
      if (word[0] == '+')
        trace.states.back().known_true.insert(atom);
      else
        trace.states.back().known_false.insert(atom);
    } else if (word == "act") {
      std::string t_tok, dur_tok;
      ls >> t_tok >> dur_tok;
      TimedAction ta;
      ta.start = parse_rational(trace_detail::key_value(t_tok, "t"));
      ta.action.duration = parse_rational(trace_detail::key_value(dur_tok, "dur"));
      const std::size_t paren = line.find('(');
      if (paren == std::string::npos)
        throw std::runtime_error("act line without action: " + line);
      std::size_t pos = paren;
      auto tokens = trace_detail::tokenize_parens(line, pos);
      if (tokens.empty()) throw std::runtime_error("empty action in: " + line);
      ta.action.op = tokens[0];
      ta.action.args.assign(tokens.begin() + 1, tokens.end());
      trace.actions.push_back(std::move(ta));
    } else if (word == "fail") {
      std::string kind_tok, event_tok, action_tok;
      ls >> kind_tok >> event_tok >> action_tok;
      Violation v;
      const std::string kind = trace_detail::key_value(kind_tok, "kind");
      if (kind == "at-start")
        v.kind = ViolationKind::AtStart;
      else if (kind == "at-end")
        v.kind = ViolationKind::AtEnd;
      else if (kind == "over-all")
        v.kind = ViolationKind::OverAll;
      else
        throw std::runtime_error("unknown violation kind " + kind);
      v.event_index = std::stoi(trace_detail::key_value(event_tok, "event"));
      v.pair_index = std::stoi(trace_detail::key_value(action_tok, "action"));
      std::size_t pos = line.find('(');
      if (pos == std::string::npos) throw std::runtime_error("fail line without literal");
      auto tokens_pos = pos;
      auto first = trace_detail::tokenize_parens(line, tokens_pos);
      if (!first.empty() && first[0] == "not") {
        v.literal.negated = true;
        std::size_t inner = line.find('(', pos + 1);
        v.literal.atom = trace_detail::parse_trace_atom(line, inner);
      } else {
        std::size_t at = pos;
        v.literal.atom = trace_detail::parse_trace_atom(line, at);
      }
      trace.failure = v;
    } else {
      throw std::runtime_error("unrecognized trace line: " + line);
    }
  }
  flush();
  return file;
}

inline TraceFile read_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_traces(in);
}

// Fills in full durative definitions for file-loaded actions and checks that
// every action and duration matches the domain.
inline void resolve_actions(std::vector<TemporalTrace>& traces,
                            const TemporalDomain& domain,
                            const std::vector<TypedObject>& objects) {
  const std::vector<GroundDurative> grounded = ground(domain, objects);
  const auto find = [&](const GroundDurative& key) -> const GroundDurative& {
    for (const auto& g : grounded)
      if (g.op == key.op && g.args == key.args) return g;
    throw std::runtime_error("trace action " + to_string(key) +
                             " does not exist in the domain grounding");
  };
  for (auto& trace : traces) {
    for (auto& ta : trace.actions) {
      const GroundDurative& g = find(ta.action);
      if (ta.action.duration != g.duration)
        throw std::runtime_error("trace action " + to_string(ta.action) +
                                 " has duration " + to_string(ta.action.duration) +
                                 ", domain says " + to_string(g.duration));
      ta.action = g;
    }
    trace.events = event_ordering(trace.actions);
  }
}

}  // namespace tempolearn
