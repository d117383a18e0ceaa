#pragma once

#include <optional>

#include "mdpi/name.hpp"

namespace mdpi {

/* Action decorations: who acted and where.  p = process, m = monitor,
 * t = trace (logged data being read); an absent location is the
 * indeterminate slot '*' filled in on communication. */
enum class TagKind { p, m, t };

struct Tag {
  TagKind kind = TagKind::p;
  std::optional<Name> from;   // writer location
  std::optional<Name> to;     // reader location
  std::int64_t stamp = -1;    // log index, valid iff kind == t

  friend bool operator==(const Tag&, const Tag&) = default;
};

enum class ActKind { tau, output, input };

struct Action {
  ActKind kind = ActKind::tau;
  Tag tag;
  Name subject;      // ignored for tau
  NameVec payload;   // ignored for tau
  NameVec extruded;  // outputs only: bound names opened by this action

  friend bool operator==(const Action&, const Action&) = default;
};

std::string tag_text(const Tag& t);
std::string action_text(const Action& a);

/* Total order used to keep transition lists and exports deterministic. */
bool action_less(const Action& a, const Action& b);

}  // namespace mdpi
