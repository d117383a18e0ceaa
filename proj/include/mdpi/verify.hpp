#pragma once

#include <map>

#include "mdpi/config.hpp"
#include "mdpi/contract.hpp"

namespace mdpi {

/* Per-location logs reconstructed from a configuration's trace entities,
 * ordered by timestamp. */
std::map<Name, LocatedTrace> located_logs(const Config& c);

/* Soundness side of a flagged violation: is some prefix of some
 * interleaving of the logs (respecting per-location order) matched by the
 * contract?  Exhaustive over interleavings, so only suitable for short
 * logs. */
bool some_prefix_matches(const ContractPtr& e,
                         const std::map<Name, LocatedTrace>& logs);

}  // namespace mdpi
