#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempolearn/model.hpp"

namespace tempolearn {

// A durative action scheduled at a start time.
struct TimedAction {
  GroundDurative action;
  Rational start;
};

// Sorted by start time; the invariant is checked by simulate().
using TemporalSequence = std::vector<TimedAction>;

enum class EventKind { Start, End };

struct TimedEvent {
  Rational time;
  EventKind kind = EventKind::Start;
  int pair_index = 0;  // index into the TemporalSequence
};

enum class ViolationKind { AtStart, AtEnd, OverAll };

inline std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::AtStart: return "at-start";
    case ViolationKind::AtEnd: return "at-end";
    default: return "over-all";
  }
}

struct Violation {
  int event_index = 0;   // event at which the violation was detected
  Literal literal;       // first violated condition literal
  ViolationKind kind = ViolationKind::AtStart;
  int pair_index = 0;    // violating action; for over-all, the enveloping action
};

// Execution record of a timed action sequence: the induced event ordering,
// one observed state per transition step, and the failure (if any).
struct TemporalTrace {
  TemporalSequence actions;
  std::vector<TimedEvent> events;
  std::vector<ObservedState> states;
  bool feasible = false;
  std::optional<Violation> failure;
  bool from_dead_end = false;  // positive walk stopped early at a dead end
};

// All ground atoms formable from the predicate schemas over the objects.
inline std::vector<Atom> ground_atom_universe(const std::vector<PredicateSchema>& predicates,
                                              const std::vector<TypedObject>& objects,
                                              const TypeTree& types) {
  std::vector<Atom> out;
  for (const auto& p : predicates) {
    std::vector<Parameter> as_params;
    for (std::size_t i = 0; i < p.param_types.size(); ++i)
      as_params.push_back({"?" + std::to_string(i), p.param_types[i]});
    std::vector<std::vector<std::string>> tuples;
    detail::enumerate_bindings(as_params, objects, types, tuples);
    for (const auto& t : tuples) out.push_back(Atom{p.name, t});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<TimedEvent> event_ordering(const TemporalSequence& seq) {
  std::vector<TimedEvent> events;
  events.reserve(seq.size() * 2);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0 && !(seq[i - 1].start < seq[i].start))
      throw std::invalid_argument("timed action sequence is not sorted by start time");
    events.push_back({seq[i].start, EventKind::Start, static_cast<int>(i)});
    events.push_back({seq[i].start + seq[i].action.duration, EventKind::End,
                      static_cast<int>(i)});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const TimedEvent& a, const TimedEvent& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i - 1].time == events[i].time)
      throw std::invalid_argument("two events share timestamp " +
                                  to_string(events[i].time));
  return events;
}

// Runs the temporal transition function. Start events check at-start
// conditions and apply at-start effects; end events check at-end conditions
// and apply at-end effects. After every application, the over-all condition
// of each open interval is re-checked, so an over-all condition must hold
// from just after its start's application to just before its end's
// application (half-open on both sides in effect order).
inline TemporalTrace simulate(const TemporalSequence& seq, const State& init,
                              const std::vector<Atom>& universe) {
  TemporalTrace trace;
  trace.actions = seq;
  trace.events = event_ordering(seq);
  State cur = init;
  trace.states.push_back(observe_fully(cur, universe));
  std::vector<bool> active(seq.size(), false);

  const auto check = [&](const std::vector<Literal>& lits, int event_index,
                         ViolationKind kind, int pair) -> bool {
    std::vector<Literal> sorted = lits;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& l : sorted) {
      if (!holds(l, cur)) {
        trace.failure = Violation{event_index, l, kind, pair};
        return false;
      }
    }
    return true;
  };
  const auto check_open_intervals = [&](int event_index) -> bool {
    for (std::size_t b = 0; b < seq.size(); ++b) {
      if (!active[b]) continue;
      if (!check(seq[b].action.pre_overall, event_index, ViolationKind::OverAll,
                 static_cast<int>(b)))
        return false;
    }
    return true;
  };

  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    const TimedEvent& ev = trace.events[k];
    const GroundDurative& a = seq[ev.pair_index].action;
    if (ev.kind == EventKind::Start) {
      if (!check(a.pre_start, static_cast<int>(k), ViolationKind::AtStart, ev.pair_index))
        return trace;
      for (const auto& atom : a.add_start) cur.insert(atom);
      for (const auto& atom : a.del_start) cur.erase(atom);
      active[ev.pair_index] = true;
    } else {
      active[ev.pair_index] = false;  // its own interval closed before this application
      if (!check(a.pre_end, static_cast<int>(k), ViolationKind::AtEnd, ev.pair_index))
        return trace;
      for (const auto& atom : a.add_end) cur.insert(atom);
      for (const auto& atom : a.del_end) cur.erase(atom);
    }
    trace.states.push_back(observe_fully(cur, universe));
    if (!check_open_intervals(static_cast<int>(k))) return trace;
  }
  trace.feasible = true;
  return trace;
}

// ---------------------------------------------------------------------------
// Sample generation

struct GeneratorConfig {
  int count = 30;    // number of positive walks
  int len_min = 5;   // walk length bounds (number of durative actions)
  int len_max = 15;
};

struct SampleSet {
  std::vector<TemporalTrace> positives;
  std::vector<TemporalTrace> negatives;
  std::uint64_t rng_seed = 0;
  std::vector<Atom> universe;
  State init;
};

namespace detail {

inline std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

inline double rand_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Random walks over the ground actions. Each step draws (action, start time)
// pairs without replacement from the current decision points until one
// extends the schedule feasibly; every infeasible draw attributable to the
// drawn action is recorded as a negative sample. Start-time candidates are
// the walk frontier plus points just before/after each pending end event.
inline SampleSet generate_samples(const TemporalDomain& domain, const Problem& problem,
                                  std::uint64_t seed, const GeneratorConfig& config) {
  static const Rational kDelta(1, 10);  // offset around decision points

  SampleSet samples;
  samples.rng_seed = seed;
  samples.init = problem.init;
  samples.universe =
      ground_atom_universe(domain.predicates, problem.objects, domain.types);
  const std::vector<GroundDurative> actions = ground(domain, problem.objects);
  if (actions.empty()) throw std::invalid_argument("domain grounds to no actions");

  std::mt19937_64 rng(seed);
  for (int walk = 0; walk < config.count; ++walk) {
    const int target = config.len_min +
        static_cast<int>(detail::rand_below(
            rng, static_cast<std::uint64_t>(config.len_max - config.len_min + 1)));
    TemporalSequence schedule;
    std::set<Rational> event_times;
    Rational frontier(0);

    while (static_cast<int>(schedule.size()) < target) {
      // Candidate start times, all strictly past the last scheduled start.
      std::vector<Rational> points;
      if (schedule.empty()) {
        points.push_back(Rational(0));
      } else {
        const Rational last = schedule.back().start;
        points.push_back(frontier);
        for (const auto& ta : schedule) {
          const Rational end = ta.start + ta.action.duration;
          if (end > last) {
            points.push_back(end - kDelta);
            points.push_back(end + kDelta);
          }
        }
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        points.erase(std::remove_if(points.begin(), points.end(),
                                    [&](const Rational& t) {
                                      return !(t > last) || event_times.count(t) > 0;
                                    }),
                     points.end());
        if (points.empty()) {
          Rational t = frontier;
          while (!(t > last) || event_times.count(t) > 0) t = t + kDelta;
          points.push_back(t);
        }
      }

      // Visit (action, time) combos in a random order until one fits.
      std::vector<std::pair<int, int>> combos;
      combos.reserve(actions.size() * points.size());
      for (std::size_t ai = 0; ai < actions.size(); ++ai)
        for (std::size_t ti = 0; ti < points.size(); ++ti)
          combos.emplace_back(static_cast<int>(ai), static_cast<int>(ti));
      for (std::size_t i = combos.size(); i > 1; --i)
        std::swap(combos[i - 1], combos[detail::rand_below(rng, i)]);

      bool extended = false;
      for (const auto& [ai, ti] : combos) {
        const Rational t = points[ti];
        const Rational t_end = t + actions[ai].duration;
        if (event_times.count(t) > 0 || event_times.count(t_end) > 0 || t == t_end)
          continue;  // would collide with an existing event
        TemporalSequence candidate = schedule;
        candidate.push_back({actions[ai], t});
        TemporalTrace trace = simulate(candidate, problem.init, samples.universe);
        if (trace.feasible) {
          schedule = std::move(candidate);
          event_times.insert(t);
          event_times.insert(t_end);
          frontier = t + kDelta;
          extended = true;
          break;
        }
        // Record the failure as a negative sample when the freshly drawn
        // action is the one to blame (an over-all break of an earlier open
        // interval would not fit the "last action infeasible" shape).
        if (trace.failure && trace.failure->pair_index ==
                                 static_cast<int>(candidate.size()) - 1)
          samples.negatives.push_back(std::move(trace));
      }
      if (!extended) break;  // dead end: keep the shorter positive
    }

    TemporalTrace trace = simulate(schedule, problem.init, samples.universe);
    trace.from_dead_end = static_cast<int>(schedule.size()) < target;
    samples.positives.push_back(std::move(trace));
  }
  return samples;
}

// Hides each non-initial state atom independently with probability
// 1 - observability. The initial state stays fully observed; feasibility
// labels and timings are untouched.
inline void mask_observations(TemporalTrace& trace, double observability,
                              std::mt19937_64& rng, const std::vector<Atom>& universe) {
  for (std::size_t i = 1; i < trace.states.size(); ++i) {
    ObservedState& st = trace.states[i];
    for (const auto& atom : universe) {
      if (!st.observed(atom)) continue;
      if (detail::rand_unit(rng) >= observability) {
        st.known_true.erase(atom);
        st.known_false.erase(atom);
      }
    }
  }
}

inline void mask_observations(SampleSet& samples, double observability,
                              std::uint64_t seed) {
  if (observability >= 1.0) return;
  std::mt19937_64 rng(seed);
  for (auto& t : samples.positives)
    mask_observations(t, observability, rng, samples.universe);
  for (auto& t : samples.negatives)
    mask_observations(t, observability, rng, samples.universe);
}

}  // namespace tempolearn
