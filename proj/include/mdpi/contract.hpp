#pragma once

#include <memory>
#include <variant>

#include "mdpi/name.hpp"

namespace mdpi {

/* Regular-expression contracts over located communications.
 * Sum-binders are expanded away at parse time, so the tree only carries the
 * four core constructors. */

struct ContractExpr;
using ContractPtr = std::shared_ptr<const ContractExpr>;

struct CEvent {                      // (c,v̄)@k
  Name chan;
  NameVec values;
  Name loc;
};
struct CSeq {
  ContractPtr left, right;
};
struct CStar {
  ContractPtr body;
};
struct CChoice {
  ContractPtr left, right;
};

struct ContractExpr {
  std::variant<CEvent, CSeq, CStar, CChoice> node;
  explicit ContractExpr(std::variant<CEvent, CSeq, CStar, CChoice> n)
      : node(std::move(n)) {}
};

ContractPtr c_event(Name chan, NameVec values, Name loc);
ContractPtr c_seq(ContractPtr l, ContractPtr r);
ContractPtr c_star(ContractPtr b);
ContractPtr c_choice(ContractPtr l, ContractPtr r);

std::string print_contract(const ContractPtr& c);

/* One observed communication in a located trace. */
struct LocatedEvent {
  Name loc;
  Name chan;
  NameVec values;
  std::int64_t stamp = -1;  // log index when taken from a trace entity
  friend bool operator==(const LocatedEvent& a, const LocatedEvent& b) {
    return a.loc == b.loc && a.chan == b.chan && a.values == b.values;
  }
};
using LocatedTrace = std::vector<LocatedEvent>;

/* Reference matcher, used to cross-check compiled monitors.  A basic event
 * matches any nonempty trace whose final element is that communication
 * (earlier elements are absorbed); sequence, star and choice split the trace
 * in the usual regular-language way. */
bool oracle_match(const ContractPtr& c, const LocatedTrace& trace);

/* All event leaves, left to right (with duplicates). */
std::vector<CEvent> contract_events(const ContractPtr& c);

/* Locations/names mentioned by the contract. */
NameSet contract_names(const ContractPtr& c);

}  // namespace mdpi
