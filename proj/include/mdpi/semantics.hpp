#pragma once

#include "mdpi/action.hpp"
#include "mdpi/config.hpp"

namespace mdpi {

/* Which transitions the step relation offers:
 *   tau_only  — internal steps only;
 *   standard  — internal steps plus output firings (the system runs, the
 *               environment listens);
 *   open      — additionally, external inputs instantiated over `universe`
 *               (the environment may also send). */
enum class Mode { tau_only, standard, open };

struct ExploreBounds {
  int max_repeat_unfold = 8;  // copies a replication may spin off
  int max_trace_len = 64;     // per-location log cap
  int max_states = 250000;
};

struct StepOptions {
  Mode mode = Mode::standard;
  ExploreBounds bounds;
  NameVec universe;  // external-input payload candidates (open mode)
};

struct Transition {
  Action act;
  Config target;
};

struct StepResult {
  std::vector<Transition> transitions;
  /* True when some behaviour was cut off by a bound (replication budget or
   * log cap); verdicts reached beyond this point are unknown. */
  bool truncated = false;
};

StepResult enabled_transitions(const Config& c, const StepOptions& opt);

/* Com side conditions: same subject and payload, unifiable tags.  Returns
 * the combined tag of the resulting tau. */
std::optional<Tag> match_communication(const Action& out, const Action& in);

/* Free names of the configurations plus one fresh name: the default palette
 * of values an open environment may send. */
NameVec input_universe(const std::vector<Config>& cs);

struct Edge {
  int src;
  Action act;
  int dst;
};

struct LtsGraph {
  std::vector<Config> states;
  std::vector<Edge> edges;
  std::vector<bool> expanded;  // false for frontier states hit by max_states
  int initial = 0;
  bool truncated = false;
};

LtsGraph explore(const Config& init, const StepOptions& opt);

}  // namespace mdpi
