#include "mdpi/rewrite.hpp"

#include <stdexcept>

namespace mdpi {
namespace {

void add_ident(NameSet& s, const Name& n) {
  if (!n.is_index()) s.insert(n);
}

void collect_free(const TermPtr& t, NameSet& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          add_ident(out, x.subject);
          for (const Name& v : x.values) add_ident(out, v);
          collect_free(x.next, out);
        } else if constexpr (std::is_same_v<T, Input> ||
                             std::is_same_v<T, Query>) {
          add_ident(out, x.subject);
          NameSet inner;
          collect_free(x.next, inner);
          for (const Name& b : x.binders) inner.erase(b);
          out.insert(inner.begin(), inner.end());
        } else if constexpr (std::is_same_v<T, NewChan>) {
          NameSet inner;
          collect_free(x.body, inner);
          inner.erase(x.channel);
          out.insert(inner.begin(), inner.end());
        } else if constexpr (std::is_same_v<T, Cond>) {
          add_ident(out, x.lhs);
          add_ident(out, x.rhs);
          collect_free(x.then_branch, out);
          collect_free(x.else_branch, out);
        } else if constexpr (std::is_same_v<T, Par>) {
          collect_free(x.left, out);
          collect_free(x.right, out);
        } else if constexpr (std::is_same_v<T, Repeat>) {
          collect_free(x.body, out);
        } else if constexpr (std::is_same_v<T, TraceEntity>) {
          add_ident(out, x.subject);
          for (const Name& v : x.values) add_ident(out, v);
        } else if constexpr (std::is_same_v<T, SyncM> ||
                             std::is_same_v<T, GoM>) {
          add_ident(out, x.target);
          collect_free(x.next, out);
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          NameSet inner;
          collect_free(x.next, inner);
          inner.erase(x.loc_var);
          inner.erase(x.idx_var);
          out.insert(inner.begin(), inner.end());
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          add_ident(out, x.loc);
          add_ident(out, x.idx);
          collect_free(x.next, out);
        } else if constexpr (std::is_same_v<T, MonBlock>) {
          add_ident(out, x.ctx.loc);
          collect_free(x.mon, out);
        } else if constexpr (std::is_same_v<T, Located>) {
          add_ident(out, x.location);
          collect_free(x.body, out);
        }
      },
      t->node);
}

void collect_all(const TermPtr& t, NameSet& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          add_ident(out, x.subject);
          for (const Name& v : x.values) add_ident(out, v);
          collect_all(x.next, out);
        } else if constexpr (std::is_same_v<T, Input> ||
                             std::is_same_v<T, Query>) {
          add_ident(out, x.subject);
          for (const Name& b : x.binders) add_ident(out, b);
          collect_all(x.next, out);
        } else if constexpr (std::is_same_v<T, NewChan>) {
          add_ident(out, x.channel);
          collect_all(x.body, out);
        } else if constexpr (std::is_same_v<T, Cond>) {
          add_ident(out, x.lhs);
          add_ident(out, x.rhs);
          collect_all(x.then_branch, out);
          collect_all(x.else_branch, out);
        } else if constexpr (std::is_same_v<T, Par>) {
          collect_all(x.left, out);
          collect_all(x.right, out);
        } else if constexpr (std::is_same_v<T, Repeat>) {
          collect_all(x.body, out);
        } else if constexpr (std::is_same_v<T, TraceEntity>) {
          add_ident(out, x.subject);
          for (const Name& v : x.values) add_ident(out, v);
        } else if constexpr (std::is_same_v<T, SyncM> ||
                             std::is_same_v<T, GoM>) {
          add_ident(out, x.target);
          collect_all(x.next, out);
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          add_ident(out, x.loc_var);
          add_ident(out, x.idx_var);
          collect_all(x.next, out);
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          add_ident(out, x.loc);
          add_ident(out, x.idx);
          collect_all(x.next, out);
        } else if constexpr (std::is_same_v<T, MonBlock>) {
          add_ident(out, x.ctx.loc);
          collect_all(x.mon, out);
        } else if constexpr (std::is_same_v<T, Located>) {
          add_ident(out, x.location);
          collect_all(x.body, out);
        }
      },
      t->node);
}

Name rn(const Name& n, const NameMap& m) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

NameVec rn_all(const NameVec& ns, const NameMap& m) {
  NameVec out;
  out.reserve(ns.size());
  for (const Name& n : ns) out.push_back(rn(n, m));
  return out;
}

TermPtr sub(const TermPtr& t, const NameMap& m);

/* Handles one binder group: drops shadowed entries, renames binders that
 * would capture an incoming name, returns the rewritten continuation. */
std::pair<NameVec, TermPtr> sub_binders(const NameVec& binders,
                                        const TermPtr& body, const NameMap& m) {
  NameMap inner = m;
  for (const Name& b : binders) inner.erase(b);
  if (inner.empty()) return {binders, body};
  NameSet fn;
  collect_free(body, fn);
  NameMap relevant;
  NameSet targets;
  for (const auto& [k, v] : inner)
    if (fn.count(k)) {
      relevant.emplace(k, v);
      add_ident(targets, v);
    }
  if (relevant.empty()) return {binders, body};
  NameVec new_binders = binders;
  bool renamed = false;
  for (Name& b : new_binders) {
    if (!targets.count(b)) continue;
    NameSet used = fn;
    used.insert(targets.begin(), targets.end());
    for (const auto& [k, v] : relevant) used.insert(k);
    for (const Name& nb : new_binders) used.insert(nb);
    Name fresh = fresh_name(b.text, used);
    relevant[b] = fresh;
    b = fresh;
    renamed = true;
  }
  (void)renamed;
  return {new_binders, sub(body, relevant)};
}

TermPtr sub(const TermPtr& t, const NameMap& m) {
  if (m.empty()) return t;
  return std::visit(
      [&](const auto& x) -> TermPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Stop>) {
          return t;
        } else if constexpr (std::is_same_v<T, OkM> ||
                             std::is_same_v<T, FailM>) {
          return t;
        } else if constexpr (std::is_same_v<T, Output>) {
          return t_out(rn(x.subject, m), rn_all(x.values, m), sub(x.next, m));
        } else if constexpr (std::is_same_v<T, Input>) {
          auto [bs, body] = sub_binders(x.binders, x.next, m);
          return t_in(rn(x.subject, m), bs, body);
        } else if constexpr (std::is_same_v<T, Query>) {
          auto [bs, body] = sub_binders(x.binders, x.next, m);
          return t_query(rn(x.subject, m), bs, body);
        } else if constexpr (std::is_same_v<T, NewChan>) {
          auto [bs, body] = sub_binders({x.channel}, x.body, m);
          return t_new(bs[0], body);
        } else if constexpr (std::is_same_v<T, Cond>) {
          return t_cond(rn(x.lhs, m), rn(x.rhs, m), sub(x.then_branch, m),
                        sub(x.else_branch, m));
        } else if constexpr (std::is_same_v<T, Par>) {
          return t_par(sub(x.left, m), sub(x.right, m));
        } else if constexpr (std::is_same_v<T, Repeat>) {
          return t_rep(sub(x.body, m));
        } else if constexpr (std::is_same_v<T, TraceEntity>) {
          return t_trace(rn(x.subject, m), rn_all(x.values, m), x.stamp);
        } else if constexpr (std::is_same_v<T, SyncM>) {
          return t_sync(rn(x.target, m), sub(x.next, m));
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          auto [bs, body] = sub_binders({x.loc_var, x.idx_var}, x.next, m);
          return t_geti(bs[0], bs[1], body);
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          return t_seti(rn(x.loc, m), rn(x.idx, m), sub(x.next, m));
        } else if constexpr (std::is_same_v<T, GoM>) {
          return t_go(rn(x.target, m), sub(x.next, m));
        } else if constexpr (std::is_same_v<T, MonBlock>) {
          return t_block(sub(x.mon, m), MonCtx{rn(x.ctx.loc, m), x.ctx.idx});
        } else if constexpr (std::is_same_v<T, Located>) {
          return t_at(rn(x.location, m), sub(x.body, m));
        } else {
          throw std::logic_error("substitute: unhandled node");
        }
      },
      t->node);
}

}  // namespace

NameSet free_names(const TermPtr& t) {
  NameSet out;
  collect_free(t, out);
  return out;
}

NameSet all_names(const TermPtr& t) {
  NameSet out;
  collect_all(t, out);
  return out;
}

TermPtr substitute(const TermPtr& t, const NameMap& subst) {
  NameMap m;
  for (const auto& [k, v] : subst)
    if (!(k == v) && !k.is_index()) m.emplace(k, v);
  return sub(t, m);
}

TermPtr substitute(const TermPtr& t, const NameVec& vars, const NameVec& vals) {
  if (vars.size() != vals.size())
    throw std::invalid_argument("substitute: arity mismatch");
  NameMap m;
  for (size_t i = 0; i < vars.size(); ++i) m.emplace(vars[i], vals[i]);
  return substitute(t, m);
}

}  // namespace mdpi
