#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mdpi/action.hpp"

namespace mdpi {

/* What remains of an action after a filter removed instrumentation detail.
 * `locs` carries the (from,to) pair when the filter keeps placement. */
struct AbstractAction {
  ActKind kind = ActKind::tau;
  Name subject;
  NameVec payload;
  NameVec extruded;
  std::optional<std::pair<std::optional<Name>, std::optional<Name>>> locs;

  friend bool operator==(const AbstractAction&, const AbstractAction&) = default;
};

std::string abstract_action_text(const AbstractAction& a);

/* A partial map from decorated actions to abstract ones; undefined actions
 * are dropped from the filtered LTS.  Well-formedness (shape preservation:
 * tau stays tau, externals keep kind/subject/payload) is the builder's
 * responsibility and is enforced for the declarative JSON form. */
struct Filter {
  std::string name;
  std::function<std::optional<AbstractAction>(const Action&)> fn;
};

/* Built-ins:
 *   ntg — total: strips every tag;
 *   prc — process view: keeps the location pair on p-tagged externals,
 *         drops m/t-tagged externals, maps every tau to tau;
 *   ltr — local-trace view: taus from reading a LOCAL log entry (t-tag,
 *         from == to) stay, non-local trace reads are dropped, other taus
 *         stay, externals are stripped of tags.
 * ltr-local-m additionally restricts monitor taus to a single location. */
Filter builtin_filter(const std::string& name);

/* Loads a declarative filter from JSON text (see README for the rule
 * schema); throws std::invalid_argument on malformed or shape-violating
 * rules. */
Filter filter_from_json_text(const std::string& text, const std::string& name);

std::optional<AbstractAction> apply_filter(const Filter& f, const Action& a);

struct Config;      // config.hpp
struct StepOptions; // semantics.hpp

/* One filtered step: enabled transitions whose action the filter defines. */
std::vector<std::pair<AbstractAction, Config>> filtered_transitions(
    const Config& c, const Filter& f, const StepOptions& opt);

}  // namespace mdpi
