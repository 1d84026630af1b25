#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tempolearn/simulate.hpp"

namespace tempolearn {

// A classical event action: the start or end half of a durative action.
struct EventAction {
  std::string op;  // durative operator name
  std::vector<std::string> args;
  EventKind kind = EventKind::Start;

  friend bool operator==(const EventAction& a, const EventAction& b) {
    return a.op == b.op && a.args == b.args && a.kind == b.kind;
  }
  friend bool operator!=(const EventAction& a, const EventAction& b) { return !(a == b); }
  friend bool operator<(const EventAction& a, const EventAction& b) {
    return std::tie(a.op, a.args, a.kind) < std::tie(b.op, b.args, b.kind);
  }
};

inline std::string event_operator_name(const std::string& op, EventKind kind) {
  return op + (kind == EventKind::Start ? "-start" : "-end");
}

inline std::string to_string(const EventAction& e) {
  std::string out = "(" + event_operator_name(e.op, e.kind);
  for (const auto& a : e.args) out += " " + a;
  return out + ")";
}

// Classical image of a temporal sequence: the time-ordered start/end events
// with the observed state before each event (and, for feasible sequences,
// the final state). For negatives the last event is the start of the
// infeasible action and carries no successor state.
struct EventSequence {
  std::vector<EventAction> events;
  std::vector<ObservedState> states;
  bool positive = true;
};

inline EventSequence convert_positive(const TemporalTrace& trace) {
  if (!trace.feasible)
    throw std::invalid_argument("convert_positive needs a feasible trace");
  EventSequence seq;
  seq.positive = true;
  for (const auto& ev : trace.events) {
    const TimedAction& ta = trace.actions[ev.pair_index];
    seq.events.push_back({ta.action.op, ta.action.args, ev.kind});
  }
  seq.states = trace.states;
  if (seq.states.size() != seq.events.size() + 1)
    throw std::invalid_argument("feasible trace with truncated state chain");
  return seq;
}

// Keeps every event strictly before the infeasible action's start time, then
// the infeasible start itself. End events of the prefix that would fall
// after that point are dropped: the failing start is the last event.
inline EventSequence convert_negative(const TemporalTrace& trace) {
  if (trace.feasible)
    throw std::invalid_argument("convert_negative needs an infeasible trace");
  if (trace.actions.empty())
    throw std::invalid_argument("convert_negative needs at least one action");
  const int fail_pair = static_cast<int>(trace.actions.size()) - 1;

  EventSequence seq;
  seq.positive = false;
  std::size_t k = 0;
  for (; k < trace.events.size(); ++k) {
    const TimedEvent& ev = trace.events[k];
    const TimedAction& ta = trace.actions[ev.pair_index];
    if (ev.pair_index == fail_pair && ev.kind == EventKind::Start) {
      seq.events.push_back({ta.action.op, ta.action.args, EventKind::Start});
      break;
    }
    seq.events.push_back({ta.action.op, ta.action.args, ev.kind});
  }
  if (k == trace.events.size())
    throw std::invalid_argument("infeasible action start missing from event ordering");
  if (trace.states.size() < seq.events.size())
    throw std::invalid_argument("negative trace states truncated before the failure");
  seq.states.assign(trace.states.begin(), trace.states.begin() + seq.events.size());
  return seq;
}

}  // namespace tempolearn
