#include "mdpi/normal_form.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

#include "mdpi/rewrite.hpp"

namespace mdpi {
namespace {

/* ---- canonical rendering -------------------------------------------- */

/* Renders an atom body with bound names replaced by positional markers
 * ("$n" for binders local to the atom, `topmap` for the hoisted ones), so
 * that alpha-equivalent atoms render identically.  `on_free` additionally
 * receives every free-name occurrence in traversal order; binder numbering
 * is derived from that. */
struct CanonicalRender {
  const std::map<Name, std::string>* topmap = nullptr;
  std::function<void(const Name&)> on_free;
  std::vector<std::pair<Name, std::string>> env;  // innermost last
  int depth = 0;

  std::string resolve(const Name& n) {
    if (n.is_index()) return n.str();
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == n) return it->second;
    if (on_free) on_free(n);
    if (topmap) {
      auto it = topmap->find(n);
      if (it != topmap->end()) return it->second;
    }
    return n.str();
  }

  std::string bind(const Name& n) {
    std::string marker = "$" + std::to_string(depth++);
    env.emplace_back(n, marker);
    return marker;
  }
  void unbind(size_t count) {
    env.resize(env.size() - count);
  }

  std::string names(const NameVec& ns) {
    std::string out;
    for (size_t i = 0; i < ns.size(); ++i) {
      if (i) out += ",";
      out += resolve(ns[i]);
    }
    return out;
  }

  std::string render(const TermPtr& t) {
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
            std::string s = resolve(x.subject);
            return s + "!<" + names(x.values) + ">." + render(x.next);
          } else if constexpr (std::is_same_v<T, Input> ||
                               std::is_same_v<T, Query>) {
            std::string s = resolve(x.subject);
            std::string bs;
            for (size_t i = 0; i < x.binders.size(); ++i) {
              if (i) bs += ",";
              bs += bind(x.binders[i]);
            }
            std::string body = render(x.next);
            unbind(x.binders.size());
            const char* op = std::is_same_v<T, Query> ? "?*(" : "?(";
            return s + op + bs + ")." + body;
          } else if constexpr (std::is_same_v<T, NewChan>) {
            std::string b = bind(x.channel);
            std::string body = render(x.body);
            unbind(1);
            return "new " + b + "." + body;
          } else if constexpr (std::is_same_v<T, Cond>) {
            return "if " + resolve(x.lhs) + "=" + resolve(x.rhs) + " then " +
                   render(x.then_branch) + " else " + render(x.else_branch);
          } else if constexpr (std::is_same_v<T, Par>) {
            return "(" + render(x.left) + "|" + render(x.right) + ")";
          } else if constexpr (std::is_same_v<T, Repeat>) {
            return "!(" + render(x.body) + ")";
          } else if constexpr (std::is_same_v<T, TraceEntity>) {
            return "trace " + resolve(x.subject) + "<" + names(x.values) +
                   ">@" + std::to_string(x.stamp);
          } else if constexpr (std::is_same_v<T, SyncM>) {
            return "sync " + resolve(x.target) + "." + render(x.next);
          } else if constexpr (std::is_same_v<T, GetIdx>) {
            std::string a = bind(x.loc_var);
            std::string b = bind(x.idx_var);
            std::string body = render(x.next);
            unbind(2);
            return "getI(" + a + "," + b + ")." + body;
          } else if constexpr (std::is_same_v<T, SetIdx>) {
            return "setI(" + resolve(x.loc) + "," + resolve(x.idx) + ")." +
                   render(x.next);
          } else if constexpr (std::is_same_v<T, GoM>) {
            return "go " + resolve(x.target) + "." + render(x.next);
          } else {
            throw std::logic_error("canonical render: system node in atom");
          }
        },
        t->node);
  }
};

std::string render_atom(const Atom& a, const std::map<Name, std::string>& topmap,
                        std::function<void(const Name&)> on_free = nullptr) {
  CanonicalRender r;
  r.topmap = &topmap;
  r.on_free = std::move(on_free);
  std::string out = r.resolve(a.location) + "[[" + r.render(a.body) + "]]";
  if (a.ctx)
    out += "@(" + r.resolve(a.ctx->loc) + "," + std::to_string(a.ctx->idx) + ")";
  if (a.budget >= 0) out += "#" + std::to_string(a.budget);
  return out;
}

/* ---- flattening ------------------------------------------------------ */

struct Builder {
  NameSet used;
  NameVec binders;
  std::vector<Atom> atoms;

  void hoist(const Name& chan, const TermPtr& body,
             const std::function<void(const TermPtr&)>& k) {
    Name b = chan;
    TermPtr inner = body;
    if (used.count(b)) {
      Name fresh = fresh_name(b.text, used);
      inner = substitute(inner, NameVec{b}, NameVec{fresh});
      b = fresh;
    }
    used.insert(b);
    binders.push_back(b);
    k(inner);
  }

  /* Splits one located body into atoms: parallel components separated,
   * top-level restrictions hoisted, stop dropped.  `budget` sticks to the
   * replication it annotates; replications exposed by splitting start fresh
   * (-1 = full allowance). */
  void flatten(const Name& loc, const TermPtr& body,
               const std::optional<MonCtx>& ctx, int budget) {
    if (is<Stop>(body)) return;
    if (const Par* p = as<Par>(body)) {
      flatten(loc, p->left, ctx, -1);
      flatten(loc, p->right, ctx, -1);
      return;
    }
    if (const NewChan* n = as<NewChan>(body)) {
      hoist(n->channel, n->body,
            [&](const TermPtr& inner) { flatten(loc, inner, ctx, budget); });
      return;
    }
    Atom a;
    a.location = loc;
    a.body = body;
    a.ctx = ctx;
    a.budget = is<Repeat>(body) ? budget : -1;
    atoms.push_back(std::move(a));
  }

  void system(const TermPtr& t) {
    if (is<Stop>(t)) return;
    if (const Par* p = as<Par>(t)) {
      system(p->left);
      system(p->right);
      return;
    }
    if (const NewChan* n = as<NewChan>(t)) {
      hoist(n->channel, n->body, [&](const TermPtr& inner) { system(inner); });
      return;
    }
    if (const Located* l = as<Located>(t)) {
      if (const MonBlock* b = as<MonBlock>(l->body)) {
        flatten(l->location, b->mon, b->ctx, -1);
      } else {
        flatten(l->location, l->body, std::nullopt, -1);
      }
      return;
    }
    throw std::logic_error("normal_form: not a system term");
  }
};

/* Does the atom mention the name freely (location, body, or context)? */
bool atom_mentions(const Atom& a, const Name& n) {
  if (a.location == n) return true;
  if (a.ctx && a.ctx->loc == n) return true;
  return free_names(a.body).count(n) > 0;
}

NormalForm canonicalize(NameVec binders, std::vector<Atom> atoms) {
  /* Garbage-collect binders nothing mentions. */
  NameVec live;
  for (const Name& b : binders) {
    bool hit = false;
    for (const Atom& a : atoms)
      if (atom_mentions(a, b)) {
        hit = true;
        break;
      }
    if (hit) live.push_back(b);
  }

  /* Round 1: sort with all bound names rendered alike. */
  std::map<Name, std::string> topmap;
  for (const Name& b : live) topmap[b] = "#?";
  std::vector<std::string> keys(atoms.size());
  auto sort_by_keys = [&]() {
    std::vector<size_t> idx(atoms.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      return keys[a] < keys[b];
    });
    std::vector<Atom> na;
    std::vector<std::string> nk;
    na.reserve(atoms.size());
    nk.reserve(atoms.size());
    for (size_t i : idx) {
      na.push_back(std::move(atoms[i]));
      nk.push_back(std::move(keys[i]));
    }
    atoms = std::move(na);
    keys = std::move(nk);
  };

  for (size_t i = 0; i < atoms.size(); ++i) keys[i] = render_atom(atoms[i], topmap);
  sort_by_keys();

  /* Refine: number binders by first occurrence over the current order,
   * re-render, re-sort; repeat until stable. */
  NameVec ordered = live;
  for (int round = 0; round < 5; ++round) {
    NameVec order;
    NameSet seen;
    auto note = [&](const Name& n) {
      if (seen.count(n)) return;
      for (const Name& b : live)
        if (b == n) {
          order.push_back(n);
          seen.insert(n);
          return;
        }
    };
    for (const Atom& a : atoms) render_atom(a, topmap, note);
    for (const Name& b : live)           // unreachable-through-render safety
      if (!seen.count(b)) order.push_back(b);

    std::map<Name, std::string> next;
    for (size_t i = 0; i < order.size(); ++i)
      next[order[i]] = "#" + std::to_string(i);
    std::vector<std::string> nk(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) nk[i] = render_atom(atoms[i], next);
    bool stable = (nk == keys) && (order == ordered);
    topmap = std::move(next);
    keys = std::move(nk);
    ordered = std::move(order);
    sort_by_keys();
    if (stable) break;
  }

  NormalForm nf;
  nf.binders = std::move(ordered);
  nf.atoms = std::move(atoms);
  return nf;
}

}  // namespace

const std::string& NormalForm::key() const {
  if (key_.empty()) {
    /* The form is already canonical, so a straight render with binders
     * numbered in their stored order is the canonical key. */
    std::map<Name, std::string> topmap;
    for (size_t i = 0; i < binders.size(); ++i)
      topmap[binders[i]] = "#" + std::to_string(i);
    std::string k = "nu" + std::to_string(binders.size()) + ";";
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (i) k += " | ";
      k += render_atom(atoms[i], topmap);
    }
    key_ = k;
  }
  return key_;
}

TermPtr NormalForm::to_term() const {
  std::vector<TermPtr> parts;
  parts.reserve(atoms.size());
  for (const Atom& a : atoms) parts.push_back(atom_term(a));
  if (parts.empty()) return t_stop();
  return t_news(binders, t_pars(parts));
}

TermPtr atom_term(const Atom& a) {
  if (a.ctx) return t_at(a.location, t_block(a.body, *a.ctx));
  return t_at(a.location, a.body);
}

NormalForm normal_form(const TermPtr& sys) {
  Builder b;
  b.used = all_names(sys);
  b.system(sys);
  return canonicalize(std::move(b.binders), std::move(b.atoms));
}

NormalForm reform(const NameVec& binders, std::vector<Atom> atoms) {
  Builder b;
  for (const Atom& a : atoms) {
    NameSet an = all_names(a.body);
    b.used.insert(an.begin(), an.end());
    if (!a.location.is_index()) b.used.insert(a.location);
    if (a.ctx && !a.ctx->loc.is_index()) b.used.insert(a.ctx->loc);
  }
  b.used.insert(binders.begin(), binders.end());
  b.binders = binders;
  for (const Atom& a : atoms) b.flatten(a.location, a.body, a.ctx, a.budget);
  return canonicalize(std::move(b.binders), std::move(b.atoms));
}

TermPtr normalize(const TermPtr& sys) { return normal_form(sys).to_term(); }

}  // namespace mdpi
