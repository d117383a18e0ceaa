#pragma once

#include <cstdint>
#include <map>

#include "mdpi/contract.hpp"
#include "mdpi/term.hpp"

namespace mdpi {

/* Location choices for the three monitor-synthesis strategies.  Operator
 * nodes (sequence/star/choice) are numbered in preorder; choreography
 * placements can be overridden per node with keys "<n>.comb" and
 * "<n>.bifurc", otherwise each macro defaults to the location of the
 * leftmost event beneath the node's right operand (star: its body). */
struct Placement {
  Name central;                    // orchestration / migrating home location
  Name start;                      // choreography start-signal location
  std::map<std::string, Name> at;  // per-operator-node overrides
  bool ctx_from_clock = false;     // init block contexts from the clock map
  std::map<Name, std::int64_t> clocks;  // consulted when ctx_from_clock
};

/* Plumbing macros.  arity fixes the tuple width carried on the channels;
 * binder names are drawn fresh against `used`. */
TermPtr build_comb(const Name& f1, const Name& f2, const Name& f, int arity,
                   NameSet& used);
TermPtr build_bifurc(const Name& s, const Name& s1, const Name& s2, int arity,
                     NameSet& used);
/* Replicated trace listener: query c, compare against vals, then report the
 * advanced monitoring context on f. */
TermPtr build_trg(const Name& c, const NameVec& vals, const Name& f,
                  NameSet& used);

/* All three return a closed system term ready to be composed in parallel
 * with the system under scrutiny. */
TermPtr compile_orch(const ContractPtr& e, const Placement& p);
TermPtr compile_chor(const ContractPtr& e, const Placement& p);
/* nested=true supports only sequences of events and emits the single
 * relocating monitor; align inserts a sync after each go so the inherited
 * context is valid at the new location. */
TermPtr compile_mig(const ContractPtr& e, const Placement& p, bool nested,
                    bool align = true);

}  // namespace mdpi
