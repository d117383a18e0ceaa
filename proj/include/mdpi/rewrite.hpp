#pragma once

#include <map>

#include "mdpi/term.hpp"

namespace mdpi {

using NameMap = std::map<Name, Name>;

/* Identifiers occurring free (channels, locations, values); index literals
 * are not names and are never reported. */
NameSet free_names(const TermPtr& t);

/* Every identifier occurring anywhere, bound or free.  Used to pick fresh
 * names that stay readable. */
NameSet all_names(const TermPtr& t);

/* Simultaneous capture-avoiding substitution of free identifiers.  Binders
 * are alpha-renamed (via fresh_name) exactly when they would capture an
 * incoming name. */
TermPtr substitute(const TermPtr& t, const NameMap& subst);

/* Convenience wrapper for positional substitution x̄ := v̄. */
TermPtr substitute(const TermPtr& t, const NameVec& vars, const NameVec& vals);

}  // namespace mdpi
