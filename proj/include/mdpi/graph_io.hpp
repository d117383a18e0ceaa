#pragma once

#include <string>

#include "mdpi/bisim.hpp"
#include "mdpi/semantics.hpp"

namespace mdpi {

/* Serialization of exploration graphs and checker results.  All JSON uses
 * insertion-ordered keys so reruns are byte-identical. */

std::string lts_to_json(const LtsGraph& g);
std::string lts_to_dot(const LtsGraph& g);

std::string lts_to_json(const FilteredLts& g);
std::string lts_to_dot(const FilteredLts& g);

std::string bisim_to_json(const BisimResult& r);

/* One line per state: id, system text, clocks, verdicts. */
std::string state_line(const Config& c);

}  // namespace mdpi
