#include "mdpi/term.hpp"

#include <functional>

namespace mdpi {

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Stop> || std::is_same_v<T, OkM> ||
                      std::is_same_v<T, FailM>) {
          return true;
        } else if constexpr (std::is_same_v<T, Output>) {
          return x.subject == y.subject && x.values == y.values &&
                 term_eq(x.next, y.next);
        } else if constexpr (std::is_same_v<T, Input> ||
                             std::is_same_v<T, Query>) {
          return x.subject == y.subject && x.binders == y.binders &&
                 term_eq(x.next, y.next);
        } else if constexpr (std::is_same_v<T, NewChan>) {
          return x.channel == y.channel && term_eq(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Cond>) {
          return x.lhs == y.lhs && x.rhs == y.rhs &&
                 term_eq(x.then_branch, y.then_branch) &&
                 term_eq(x.else_branch, y.else_branch);
        } else if constexpr (std::is_same_v<T, Par>) {
          return term_eq(x.left, y.left) && term_eq(x.right, y.right);
        } else if constexpr (std::is_same_v<T, Repeat>) {
          return term_eq(x.body, y.body);
        } else if constexpr (std::is_same_v<T, TraceEntity>) {
          return x.subject == y.subject && x.values == y.values &&
                 x.stamp == y.stamp;
        } else if constexpr (std::is_same_v<T, SyncM> ||
                             std::is_same_v<T, GoM>) {
          return x.target == y.target && term_eq(x.next, y.next);
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          return x.loc_var == y.loc_var && x.idx_var == y.idx_var &&
                 term_eq(x.next, y.next);
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          return x.loc == y.loc && x.idx == y.idx && term_eq(x.next, y.next);
        } else if constexpr (std::is_same_v<T, MonBlock>) {
          return x.ctx == y.ctx && term_eq(x.mon, y.mon);
        } else if constexpr (std::is_same_v<T, Located>) {
          return x.location == y.location && term_eq(x.body, y.body);
        } else {
          return false;
        }
      },
      a->node);
}

namespace {

/* Collect the left spine only: "A | B | C" parses left-nested, so just the
 * left chain may print flat; a Par in right position keeps its parentheses
 * or the reparse would re-associate it. */
void flatten_par(const TermPtr& t, std::vector<TermPtr>& out) {
  if (const Par* p = as<Par>(t)) {
    flatten_par(p->left, out);
    out.push_back(p->right);
  } else {
    out.push_back(t);
  }
}

bool contains_located(const TermPtr& t) {
  if (is<Located>(t)) return true;
  if (const Par* p = as<Par>(t))
    return contains_located(p->left) || contains_located(p->right);
  if (const NewChan* n = as<NewChan>(t)) return contains_located(n->body);
  return false;
}

std::string print_proc(const TermPtr& t);

/* A term appearing after "." or as a conditional branch; parallel
 * compositions need grouping there. */
std::string print_cont(const TermPtr& t) {
  if (is<Par>(t)) return "(" + print_proc(t) + ")";
  return print_proc(t);
}

std::string opt_cont(const TermPtr& next) {
  if (is<Stop>(next)) return "";
  return "." + print_cont(next);
}

std::string print_proc(const TermPtr& t) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Stop>) {
          return "stop";
        } else if constexpr (std::is_same_v<T, OkM>) {
          return "ok";
        } else if constexpr (std::is_same_v<T, FailM>) {
          return "fail";
        } else if constexpr (std::is_same_v<T, Output>) {
          return x.subject.str() + "!<" + join_names(x.values) + ">" +
                 opt_cont(x.next);
        } else if constexpr (std::is_same_v<T, Input>) {
          return x.subject.str() + "?(" + join_names(x.binders) + ")" +
                 opt_cont(x.next);
        } else if constexpr (std::is_same_v<T, Query>) {
          return x.subject.str() + "?*(" + join_names(x.binders) + ")" +
                 opt_cont(x.next);
        } else if constexpr (std::is_same_v<T, NewChan>) {
          NameVec chans{x.channel};
          TermPtr body = x.body;
          while (const NewChan* inner = as<NewChan>(body)) {
            chans.push_back(inner->channel);
            body = inner->body;
          }
          return "new " + join_names(chans) + "." + print_cont(body);
        } else if constexpr (std::is_same_v<T, Cond>) {
          return "if " + x.lhs.str() + " = " + x.rhs.str() + " then " +
                 print_cont(x.then_branch) + " else " +
                 print_cont(x.else_branch);
        } else if constexpr (std::is_same_v<T, Par>) {
          std::vector<TermPtr> leaves;
          flatten_par(t, leaves);
          std::string out;
          for (size_t i = 0; i < leaves.size(); ++i) {
            if (i) out += " | ";
            out += is<Par>(leaves[i]) ? print_cont(leaves[i])
                                      : print_proc(leaves[i]);
          }
          return out;
        } else if constexpr (std::is_same_v<T, Repeat>) {
          return "!(" + print_proc(x.body) + ")";
        } else if constexpr (std::is_same_v<T, TraceEntity>) {
          return "trace " + x.subject.str() + "<" + join_names(x.values) +
                 ">@" + std::to_string(x.stamp);
        } else if constexpr (std::is_same_v<T, SyncM>) {
          return "sync " + x.target.str() + opt_cont(x.next);
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          return "getI(" + x.loc_var.str() + "," + x.idx_var.str() + ")" +
                 opt_cont(x.next);
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          return "setI(" + x.loc.str() + "," + x.idx.str() + ")" +
                 opt_cont(x.next);
        } else if constexpr (std::is_same_v<T, GoM>) {
          return "go " + x.target.str() + opt_cont(x.next);
        } else {
          return "<bad-proc>";  // MonBlock/Located never valid below a location
        }
      },
      t->node);
}

std::string print_system(const TermPtr& t) {
  if (is<Par>(t)) {
    std::vector<TermPtr> leaves;
    flatten_par(t, leaves);
    std::string out;
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (i) out += " | ";
      out += is<Par>(leaves[i]) ? "(" + print_system(leaves[i]) + ")"
                                : print_system(leaves[i]);
    }
    return out;
  }
  if (const NewChan* n = as<NewChan>(t)) {
    NameVec chans{n->channel};
    TermPtr body = n->body;
    while (const NewChan* inner = as<NewChan>(body)) {
      chans.push_back(inner->channel);
      body = inner->body;
    }
    return "new " + join_names(chans) + ".(" + print_system(body) + ")";
  }
  if (const Located* l = as<Located>(t)) {
    if (const MonBlock* b = as<MonBlock>(l->body)) {
      return l->location.str() + "[[" + print_proc(b->mon) + "]]@(" +
             b->ctx.loc.str() + "," + std::to_string(b->ctx.idx) + ")";
    }
    return l->location.str() + "[[" + print_proc(l->body) + "]]";
  }
  if (is<Stop>(t)) return "stop";
  return print_proc(t);
}

}  // namespace

std::string print_term(const TermPtr& t) {
  if (!t) return "<null>";
  if (contains_located(t)) return print_system(t);
  return print_proc(t);
}

TermPtr t_stop() {
  static TermPtr s = mk(Stop{});
  return s;
}
TermPtr t_out(Name c, NameVec vs, TermPtr next) {
  return mk(Output{std::move(c), std::move(vs), std::move(next)});
}
TermPtr t_in(Name c, NameVec xs, TermPtr next) {
  return mk(Input{std::move(c), std::move(xs), std::move(next)});
}
TermPtr t_query(Name c, NameVec xs, TermPtr next) {
  return mk(Query{std::move(c), std::move(xs), std::move(next)});
}
TermPtr t_new(Name c, TermPtr body) {
  return mk(NewChan{std::move(c), std::move(body)});
}
TermPtr t_news(const NameVec& cs, TermPtr body) {
  TermPtr out = std::move(body);
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) out = t_new(*it, out);
  return out;
}
TermPtr t_cond(Name u, Name v, TermPtr thenb, TermPtr elseb) {
  return mk(Cond{std::move(u), std::move(v), std::move(thenb), std::move(elseb)});
}
TermPtr t_par(TermPtr l, TermPtr r) { return mk(Par{std::move(l), std::move(r)}); }
TermPtr t_pars(const std::vector<TermPtr>& ps) {
  if (ps.empty()) return t_stop();
  TermPtr out = ps[0];
  for (size_t i = 1; i < ps.size(); ++i) out = t_par(out, ps[i]);
  return out;
}
TermPtr t_rep(TermPtr body) { return mk(Repeat{std::move(body)}); }
TermPtr t_trace(Name c, NameVec vs, std::int64_t stamp) {
  return mk(TraceEntity{std::move(c), std::move(vs), stamp});
}
TermPtr t_sync(Name l, TermPtr next) {
  return mk(SyncM{std::move(l), std::move(next)});
}
TermPtr t_geti(Name x, Name y, TermPtr next) {
  return mk(GetIdx{std::move(x), std::move(y), std::move(next)});
}
TermPtr t_seti(Name l, Name n, TermPtr next) {
  return mk(SetIdx{std::move(l), std::move(n), std::move(next)});
}
TermPtr t_go(Name l, TermPtr next) {
  return mk(GoM{std::move(l), std::move(next)});
}
TermPtr t_ok() {
  static TermPtr s = mk(OkM{});
  return s;
}
TermPtr t_fail() {
  static TermPtr s = mk(FailM{});
  return s;
}
TermPtr t_block(TermPtr mon, MonCtx ctx) {
  return mk(MonBlock{std::move(mon), std::move(ctx)});
}
TermPtr t_at(Name loc, TermPtr body) {
  return mk(Located{std::move(loc), std::move(body)});
}

}  // namespace mdpi
