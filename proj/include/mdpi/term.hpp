#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "mdpi/name.hpp"

namespace mdpi {

/* Immutable term trees shared via shared_ptr.  One node type covers all
 * three syntactic sorts (system, process, monitor); parsing and a separate
 * validation pass enforce which constructors may appear where. */

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Stop {};                                       // stop (also the empty system)
struct Output {                                       // c!<v̄>.P
  Name subject;
  NameVec values;
  TermPtr next;
};
struct Input {                                        // c?(x̄).P
  Name subject;
  NameVec binders;
  TermPtr next;
};
struct Query {                                        // c?*(x̄).M   (monitor trace query)
  Name subject;
  NameVec binders;
  TermPtr next;
};
struct NewChan {                                      // new c.P  (one channel per node)
  Name channel;
  TermPtr body;
};
struct Cond {                                         // if u = v then P else Q
  Name lhs, rhs;
  TermPtr then_branch, else_branch;
};
struct Par {                                          // P | Q
  TermPtr left, right;
};
struct Repeat {                                       // !P
  TermPtr body;
};
struct TraceEntity {                                  // trace c<v̄>@n  (logged communication)
  Name subject;
  NameVec values;
  std::int64_t stamp = 0;
};
struct SyncM {                                        // sync l.M
  Name target;
  TermPtr next;
};
struct GetIdx {                                       // getI(x,y).M  (binds x,y)
  Name loc_var, idx_var;
  TermPtr next;
};
struct SetIdx {                                       // setI(l,n).M  (n index literal or variable)
  Name loc, idx;
  TermPtr next;
};
struct GoM {                                          // go l.M
  Name target;
  TermPtr next;
};
struct OkM {};                                        // ok
struct FailM {};                                      // fail

struct MonCtx {                                       // monitoring context @(l,n)
  Name loc;
  std::int64_t idx = 0;
  friend bool operator==(const MonCtx&, const MonCtx&) = default;
  friend auto operator<=>(const MonCtx&, const MonCtx&) = default;
};
struct MonBlock {                                     // [[M]]@(l,n) wrapped under a location
  TermPtr mon;
  MonCtx ctx;
};
struct Located {                                      // l[[P]] or l[[ MonBlock ]]
  Name location;
  TermPtr body;
};

using TermNode =
    std::variant<Stop, Output, Input, Query, NewChan, Cond, Par, Repeat,
                 TraceEntity, SyncM, GetIdx, SetIdx, GoM, OkM, FailM,
                 MonBlock, Located>;

struct Term {
  TermNode node;
  explicit Term(TermNode n) : node(std::move(n)) {}
};

inline TermPtr mk(TermNode n) { return std::make_shared<const Term>(std::move(n)); }

template <class T>
const T* as(const TermPtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}
template <class T>
bool is(const TermPtr& t) {
  return as<T>(t) != nullptr;
}

bool term_eq(const TermPtr& a, const TermPtr& b);

/* Pretty printer emitting the concrete grammar; parse(print(t)) == t for any
 * validated term (the sole exception is the empty system, printed "stop",
 * which the parser also accepts at system level). */
std::string print_term(const TermPtr& t);

/* Convenience constructors used by the compiler and tests. */
TermPtr t_stop();
TermPtr t_out(Name c, NameVec vs, TermPtr next);
TermPtr t_in(Name c, NameVec xs, TermPtr next);
TermPtr t_query(Name c, NameVec xs, TermPtr next);
TermPtr t_new(Name c, TermPtr body);
TermPtr t_news(const NameVec& cs, TermPtr body);  // right-nested chain
TermPtr t_cond(Name u, Name v, TermPtr thenb, TermPtr elseb);
TermPtr t_par(TermPtr l, TermPtr r);
TermPtr t_pars(const std::vector<TermPtr>& ps);   // left-nested; empty -> stop
TermPtr t_rep(TermPtr body);
TermPtr t_trace(Name c, NameVec vs, std::int64_t stamp);
TermPtr t_sync(Name l, TermPtr next);
TermPtr t_geti(Name x, Name y, TermPtr next);
TermPtr t_seti(Name l, Name n, TermPtr next);
TermPtr t_go(Name l, TermPtr next);
TermPtr t_ok();
TermPtr t_fail();
TermPtr t_block(TermPtr mon, MonCtx ctx);
TermPtr t_at(Name loc, TermPtr body);

}  // namespace mdpi
