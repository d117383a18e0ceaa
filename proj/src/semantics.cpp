#include "mdpi/semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "mdpi/rewrite.hpp"

namespace mdpi {
namespace {

/* One capability of one atom, before pairing/instantiation.  For inputs,
 * `active` still contains the binders; everything else is ready to fire. */
struct Cand {
  ActKind kind = ActKind::tau;
  Tag tag;
  Name subject;
  NameVec payload;  // outputs
  NameVec binders;  // inputs
  TermPtr active;   // continuation of the acting prefix (null: none)
  std::vector<TermPtr> passive;  // parallel siblings inside a replicated copy
  std::optional<MonCtx> ctx_after;
  std::optional<Name> loc_after;  // go
  bool emits_trace = false;       // plain process output: log + clock tick
  bool keep_source = false;       // trace entities persist
  bool blocked = false;           // replication budget exhausted
  std::optional<std::pair<Name, Verdict>> verdict;
  /* Residual replications, innermost first (body, remaining budget). */
  std::vector<std::pair<TermPtr, int>> rep_residuals;
};

/* Enumerates what `body` can do at atom (loc, ctx).  `budget` is the
 * remaining unfold allowance if `body` is a replication (-1 = full). */
void collect_cands(const Name& loc, const TermPtr& body,
                   const std::optional<MonCtx>& ctx, int budget,
                   const ClockMap& clocks, const ExploreBounds& bounds,
                   std::vector<Cand>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Stop>) {
          return;
        } else if constexpr (std::is_same_v<T, Output>) {
          Cand c;
          c.kind = ActKind::output;
          c.tag = Tag{ctx ? TagKind::m : TagKind::p, loc, std::nullopt, -1};
          c.subject = x.subject;
          c.payload = x.values;
          c.active = x.next;
          c.ctx_after = ctx;
          c.emits_trace = !ctx;
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, Input>) {
          Cand c;
          c.kind = ActKind::input;
          c.tag = Tag{ctx ? TagKind::m : TagKind::p, std::nullopt, loc, -1};
          c.subject = x.subject;
          c.binders = x.binders;
          c.active = x.next;
          c.ctx_after = ctx;
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, Query>) {
          if (!ctx) return;  // queries only act inside a monitor block
          Cand c;
          c.kind = ActKind::input;
          c.tag = Tag{TagKind::t, ctx->loc, loc, ctx->idx};
          c.subject = x.subject;
          c.binders = x.binders;
          c.active = x.next;
          c.ctx_after = MonCtx{ctx->loc, ctx->idx + 1};
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, Cond>) {
          Cand c;
          c.tag = Tag{ctx ? TagKind::m : TagKind::p, loc, loc, -1};
          c.active = (x.lhs == x.rhs) ? x.then_branch : x.else_branch;
          c.ctx_after = ctx;
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, TraceEntity>) {
          Cand c;
          c.kind = ActKind::output;
          c.tag = Tag{TagKind::t, loc, std::nullopt, x.stamp};
          c.subject = x.subject;
          c.payload = x.values;
          c.keep_source = true;
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, SyncM>) {
          if (!ctx || x.target.is_index()) return;
          Cand c;
          c.tag = Tag{TagKind::m, loc, loc, -1};
          c.active = x.next;
          c.ctx_after = MonCtx{x.target, clock_of(clocks, x.target)};
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          if (!ctx) return;
          Cand c;
          c.tag = Tag{TagKind::m, loc, loc, -1};
          c.active = substitute(x.next, {x.loc_var, x.idx_var},
                                {ctx->loc, Name::idx(ctx->idx)});
          c.ctx_after = ctx;
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          if (!ctx || x.loc.is_index() || !x.idx.is_index()) return;
          Cand c;
          c.tag = Tag{TagKind::m, loc, loc, -1};
          c.active = x.next;
          c.ctx_after = MonCtx{x.loc, x.idx.num};
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, GoM>) {
          if (!ctx || x.target.is_index()) return;
          Cand c;
          c.tag = Tag{TagKind::m, loc, x.target, -1};
          c.active = x.next;
          c.ctx_after = ctx;
          c.loc_after = x.target;
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, OkM> ||
                             std::is_same_v<T, FailM>) {
          if (!ctx) return;
          Cand c;
          c.tag = Tag{TagKind::m, loc, loc, -1};
          c.ctx_after = ctx;
          c.verdict = {loc, std::is_same_v<T, OkM> ? Verdict::ok : Verdict::fail};
          out.push_back(std::move(c));
        } else if constexpr (std::is_same_v<T, Par>) {
          /* Only reachable inside a replicated copy: one side acts, the
           * other rides along. */
          auto lift = [&](const TermPtr& acting, const TermPtr& rider) {
            std::vector<Cand> sub;
            collect_cands(loc, acting, ctx, -1, clocks, bounds, sub);
            for (Cand& c : sub) {
              c.passive.push_back(rider);
              out.push_back(std::move(c));
            }
          };
          lift(x.left, x.right);
          lift(x.right, x.left);
        } else if constexpr (std::is_same_v<T, Repeat>) {
          int remaining = budget < 0 ? bounds.max_repeat_unfold : budget;
          std::vector<Cand> sub;
          collect_cands(loc, x.body, ctx, -1, clocks, bounds, sub);
          for (Cand& c : sub) {
            c.blocked = c.blocked || remaining <= 0;
            c.rep_residuals.emplace_back(x.body, std::max(remaining - 1, 0));
            out.push_back(std::move(c));
          }
        } else {
          throw std::logic_error("enabled_transitions: system node in atom");
        }
      },
      body->node);
}

NameSet config_names(const Config& cfg) {
  NameSet used;
  for (const Atom& a : cfg.sys.atoms) {
    NameSet an = all_names(a.body);
    used.insert(an.begin(), an.end());
    used.insert(a.location);
    if (a.ctx) used.insert(a.ctx->loc);
  }
  used.insert(cfg.sys.binders.begin(), cfg.sys.binders.end());
  for (const auto& [l, v] : cfg.clocks) used.insert(l);
  return used;
}

/* Names the environment can already see.  Bound names are excluded so that
 * alpha-equivalent configurations make identical choices (e.g. of extruded
 * names). */
NameSet observable_names(const Config& cfg) {
  NameSet out = free_names(cfg.sys.to_term());
  for (const auto& [l, v] : cfg.clocks)
    if (!cfg.sys.is_bound(l)) out.insert(l);
  for (const auto& [lv, n] : cfg.verdicts) out.insert(lv.first);
  return out;
}

/* Renames binders and their occurrences (map keys must not collide with
 * unrelated binders; callers pre-rename to guarantee that). */
Config rename_config(const Config& cfg, const NameMap& ren) {
  std::vector<Atom> atoms;
  for (const Atom& a : cfg.sys.atoms) {
    Atom r = a;
    r.body = substitute(a.body, ren);
    auto it = ren.find(r.location);
    if (it != ren.end()) r.location = it->second;
    if (r.ctx) {
      auto ic = ren.find(r.ctx->loc);
      if (ic != ren.end()) r.ctx = MonCtx{ic->second, r.ctx->idx};
    }
    atoms.push_back(std::move(r));
  }
  NameVec binders;
  for (const Name& b : cfg.sys.binders) {
    auto it = ren.find(b);
    binders.push_back(it == ren.end() ? b : it->second);
  }
  ClockMap clocks;
  for (const auto& [l, v] : cfg.clocks) {
    auto it = ren.find(l);
    clocks[it == ren.end() ? l : it->second] = v;
  }
  Config out;
  out.clocks = std::move(clocks);
  out.verdicts = cfg.verdicts;
  out.sys = reform(std::move(binders), std::move(atoms));
  return out;
}

struct Assembler {
  const Config& cfg;
  std::vector<Transition> out;
  bool truncated = false;

  /* Replaces atom `src` (and, for communications, `src2`) by the residues
   * described by the candidates, producing the successor configuration. */
  Config build(size_t src, const Cand& c, const NameVec& in_payload,
               const size_t* src2 = nullptr, const Cand* c2 = nullptr,
               const NameVec* in_payload2 = nullptr) {
    std::vector<Atom> atoms;
    atoms.reserve(cfg.sys.atoms.size() + 3);
    for (size_t i = 0; i < cfg.sys.atoms.size(); ++i) {
      if (i == src || (src2 && i == *src2)) continue;
      atoms.push_back(cfg.sys.atoms[i]);
    }
    ClockMap clocks = cfg.clocks;
    VerdictBag verdicts = cfg.verdicts;
    append_residue(atoms, clocks, verdicts, cfg.sys.atoms[src], c, in_payload);
    if (src2)
      append_residue(atoms, clocks, verdicts, cfg.sys.atoms[*src2], *c2,
                     *in_payload2);
    Config next;
    next.clocks = std::move(clocks);
    next.verdicts = std::move(verdicts);
    next.sys = reform(cfg.sys.binders, std::move(atoms));
    return next;
  }

  void append_residue(std::vector<Atom>& atoms, ClockMap& clocks,
                      VerdictBag& verdicts, const Atom& a, const Cand& c,
                      const NameVec& in_payload) {
    if (c.keep_source) {
      atoms.push_back(a);
      return;
    }
    if (c.verdict) ++verdicts[*c.verdict];
    if (c.emits_trace) {
      Atom e;
      e.location = a.location;
      e.body = t_trace(c.subject, c.payload, clock_of(clocks, a.location));
      atoms.push_back(std::move(e));
      clocks = inc_clock(std::move(clocks), a.location);
    }
    TermPtr act = c.active;
    if (act && c.kind == ActKind::input)
      act = substitute(act, c.binders, in_payload);
    if (act) {
      Atom n;
      n.location = c.loc_after.value_or(a.location);
      n.body = act;
      n.ctx = c.ctx_after;
      atoms.push_back(std::move(n));
    }
    /* Parallel siblings of the acting prefix split off as blocks of their
     * own and keep the pre-action context and location. */
    for (const TermPtr& p : c.passive) {
      Atom n;
      n.location = a.location;
      n.body = p;
      n.ctx = a.ctx;
      atoms.push_back(std::move(n));
    }
    /* Residual replications resume from the advanced context, so a
     * replicated trace listener walks the log entry by entry. */
    for (const auto& [body, left] : c.rep_residuals) {
      Atom r;
      r.location = a.location;
      r.body = t_rep(body);
      r.ctx = c.ctx_after;
      r.budget = left;
      atoms.push_back(std::move(r));
    }
  }

  void emit(Action act, Config target) {
    out.push_back(Transition{std::move(act), std::move(target)});
  }
};

Action action_of(const Cand& c, const NameVec& payload) {
  Action a;
  a.kind = c.kind;
  a.tag = c.tag;
  if (c.kind != ActKind::tau) {
    a.subject = c.subject;
    a.payload = payload;
  }
  return a;
}

}  // namespace

std::optional<Tag> match_communication(const Action& out, const Action& in) {
  if (out.kind != ActKind::output || in.kind != ActKind::input)
    return std::nullopt;
  if (!(out.subject == in.subject)) return std::nullopt;
  if (out.payload != in.payload) return std::nullopt;
  if (out.tag.kind != in.tag.kind) return std::nullopt;
  auto unify = [](const std::optional<Name>& a,
                  const std::optional<Name>& b) -> std::optional<std::optional<Name>> {
    if (!a) return b;
    if (!b) return a;
    if (*a == *b) return a;
    return std::nullopt;
  };
  auto from = unify(out.tag.from, in.tag.from);
  auto to = unify(out.tag.to, in.tag.to);
  if (!from || !to) return std::nullopt;
  if (out.tag.kind == TagKind::t && out.tag.stamp != in.tag.stamp)
    return std::nullopt;
  Tag tag;
  tag.kind = out.tag.kind;
  tag.from = *from;
  tag.to = *to;
  tag.stamp = out.tag.kind == TagKind::t ? out.tag.stamp : -1;
  return tag;
}

NameVec input_universe(const std::vector<Config>& cs) {
  NameSet free, used;
  for (const Config& c : cs) {
    TermPtr t = c.sys.to_term();
    NameSet fn = free_names(t);
    free.insert(fn.begin(), fn.end());
    NameSet an = all_names(t);
    used.insert(an.begin(), an.end());
  }
  NameVec out(free.begin(), free.end());
  used.insert(free.begin(), free.end());
  out.push_back(fresh_name("w", used));
  std::sort(out.begin(), out.end());
  return out;
}

StepResult enabled_transitions(const Config& cfg, const StepOptions& opt) {
  Assembler asmb{cfg};
  const auto& atoms = cfg.sys.atoms;

  std::vector<std::vector<Cand>> cands(atoms.size());
  for (size_t i = 0; i < atoms.size(); ++i)
    collect_cands(atoms[i].location, atoms[i].body, atoms[i].ctx,
                  atoms[i].budget, cfg.clocks, opt.bounds, cands[i]);

  auto log_full = [&](const Name& loc) {
    return (std::int64_t)log_stamps(cfg.sys, loc).size() >=
           opt.bounds.max_trace_len;
  };

  /* Internal steps. */
  for (size_t i = 0; i < atoms.size(); ++i) {
    for (const Cand& c : cands[i]) {
      if (c.kind != ActKind::tau) continue;
      if (c.blocked) {
        asmb.truncated = true;
        continue;
      }
      asmb.emit(action_of(c, {}), asmb.build(i, c, {}));
    }
  }

  /* Communications. */
  for (size_t i = 0; i < atoms.size(); ++i) {
    for (const Cand& co : cands[i]) {
      if (co.kind != ActKind::output) continue;
      for (size_t j = 0; j < atoms.size(); ++j) {
        if (j == i) continue;
        for (const Cand& ci : cands[j]) {
          if (ci.kind != ActKind::input) continue;
          if (ci.binders.size() != co.payload.size()) continue;
          Action outv = action_of(co, co.payload);
          Action inv = action_of(ci, co.payload);
          std::optional<Tag> tag = match_communication(outv, inv);
          if (!tag) continue;
          if (co.blocked || ci.blocked) {
            asmb.truncated = true;
            continue;
          }
          if (co.emits_trace && log_full(atoms[i].location)) {
            asmb.truncated = true;
            continue;
          }
          Action act;
          act.kind = ActKind::tau;
          act.tag = *tag;
          asmb.emit(std::move(act),
                    asmb.build(i, co, {}, &j, &ci, &co.payload));
        }
      }
    }
  }

  /* Skip: a monitor whose pending log entry is on a channel it is not
   * querying steps over that entry without consuming replication budget. */
  for (size_t j = 0; j < atoms.size(); ++j) {
    if (!atoms[j].ctx) continue;
    NameSet offered;
    for (const Cand& c : cands[j])
      if (c.kind == ActKind::input && c.tag.kind == TagKind::t)
        offered.insert(c.subject);
    if (offered.empty()) continue;
    const MonCtx& ctx = *atoms[j].ctx;
    for (size_t i = 0; i < atoms.size(); ++i) {
      const TraceEntity* e = as<TraceEntity>(atoms[i].body);
      if (!e || !(atoms[i].location == ctx.loc) || e->stamp != ctx.idx)
        continue;
      if (offered.count(e->subject)) continue;
      Action act;
      act.kind = ActKind::tau;
      act.tag = Tag{TagKind::t, ctx.loc, atoms[j].location, ctx.idx};
      std::vector<Atom> next = cfg.sys.atoms;
      next[j].ctx = MonCtx{ctx.loc, ctx.idx + 1};
      Config target;
      target.clocks = cfg.clocks;
      target.verdicts = cfg.verdicts;
      target.sys = reform(cfg.sys.binders, std::move(next));
      asmb.emit(std::move(act), std::move(target));
      break;  // at most one entity carries this (loc, idx)
    }
  }

  /* Firings observable by the environment. */
  if (opt.mode != Mode::tau_only) {
    for (size_t i = 0; i < atoms.size(); ++i) {
      for (const Cand& c : cands[i]) {
        if (c.kind != ActKind::output) continue;
        if (cfg.sys.is_bound(c.subject)) continue;
        if (c.blocked) {
          asmb.truncated = true;
          continue;
        }
        if (c.emits_trace && log_full(atoms[i].location)) {
          asmb.truncated = true;
          continue;
        }
        /* Bound payload names escape (Open): build the successor, then
         * rename each escaping binder to a canonical fresh name and drop
         * it from the restriction. */
        NameVec extruded;
        for (const Name& v : c.payload)
          if (cfg.sys.is_bound(v)) {
            bool seen = false;
            for (const Name& e : extruded) seen = seen || e == v;
            if (!seen) extruded.push_back(v);
          }
        Config succ = asmb.build(i, c, {});
        Action act = action_of(c, c.payload);
        if (!extruded.empty()) {
          /* Escaped names get positional fresh names drawn from what the
           * environment can see, so the label does not depend on the
           * original choice of bound name. */
          NameSet visible = observable_names(cfg);
          for (const Name& u : opt.universe) visible.insert(u);
          NameMap ren;
          NameVec fresh_list;
          NameSet fresh_set;
          for (size_t slot = 0; slot < extruded.size(); ++slot) {
            Name f = fresh_name("n" + std::to_string(slot + 1), visible);
            visible.insert(f);
            ren.emplace(extruded[slot], f);
            fresh_list.push_back(f);
            fresh_set.insert(f);
          }
          /* Bound names of the successor that collide with the chosen
           * fresh names step aside first. */
          NameMap pre;
          NameSet succ_names = config_names(succ);
          succ_names.insert(fresh_set.begin(), fresh_set.end());
          for (const Name& b : succ.sys.binders) {
            if (!fresh_set.count(b) || ren.count(b)) continue;
            Name nb = fresh_name(b.text, succ_names);
            succ_names.insert(nb);
            pre.emplace(b, nb);
          }
          if (!pre.empty()) succ = rename_config(succ, pre);
          succ = rename_config(succ, ren);
          NameVec keep;
          for (const Name& b : succ.sys.binders)
            if (!fresh_set.count(b)) keep.push_back(b);
          if (keep.size() != succ.sys.binders.size())
            succ.sys = reform(keep, succ.sys.atoms);
          auto rn = [&](const Name& n) {
            auto it = ren.find(n);
            return it == ren.end() ? n : it->second;
          };
          NameVec pl;
          for (const Name& v : act.payload) pl.push_back(rn(v));
          act.payload = std::move(pl);
          act.extruded = fresh_list;
        }
        asmb.emit(std::move(act), std::move(succ));
      }
    }
  }

  /* External inputs over the universe (process/monitor channels only; the
   * environment cannot forge logged data). */
  if (opt.mode == Mode::open) {
    for (size_t i = 0; i < atoms.size(); ++i) {
      for (const Cand& c : cands[i]) {
        if (c.kind != ActKind::input || c.tag.kind == TagKind::t) continue;
        if (cfg.sys.is_bound(c.subject)) continue;
        if (c.blocked) {
          asmb.truncated = true;
          continue;
        }
        size_t arity = c.binders.size();
        std::vector<NameVec> tuples{{}};
        for (size_t k2 = 0; k2 < arity; ++k2) {
          std::vector<NameVec> next;
          for (const NameVec& base : tuples)
            for (const Name& u : opt.universe) {
              NameVec t2 = base;
              t2.push_back(u);
              next.push_back(std::move(t2));
            }
          tuples = std::move(next);
        }
        for (const NameVec& payload : tuples)
          asmb.emit(action_of(c, payload), asmb.build(i, c, payload));
      }
    }
  }

  /* Mode filter, dedup, deterministic order. */
  std::vector<Transition>& ts = asmb.out;
  if (opt.mode == Mode::tau_only) {
    std::vector<Transition> kept;
    for (Transition& t : ts)
      if (t.act.kind == ActKind::tau) kept.push_back(std::move(t));
    ts = std::move(kept);
  }
  std::sort(ts.begin(), ts.end(), [](const Transition& a, const Transition& b) {
    std::string ka = action_text(a.act), kb = action_text(b.act);
    if (ka != kb) return ka < kb;
    return a.target.key() < b.target.key();
  });
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](const Transition& a, const Transition& b) {
                         return a.act == b.act &&
                                a.target.key() == b.target.key();
                       }),
           ts.end());

  StepResult res;
  res.transitions = std::move(ts);
  res.truncated = asmb.truncated;
  return res;
}

LtsGraph explore(const Config& init, const StepOptions& opt) {
  LtsGraph g;
  std::map<std::string, int> index;
  std::deque<int> queue;
  g.states.push_back(init);
  g.expanded.push_back(false);
  index[init.key()] = 0;
  queue.push_back(0);
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    StepResult step = enabled_transitions(g.states[s], opt);
    g.truncated = g.truncated || step.truncated;
    g.expanded[s] = true;
    for (Transition& t : step.transitions) {
      const std::string& key = t.target.key();
      auto it = index.find(key);
      int dst;
      if (it != index.end()) {
        dst = it->second;
      } else if ((int)g.states.size() >= opt.bounds.max_states) {
        g.truncated = true;
        g.expanded[s] = false;  // outgoing behaviour incomplete
        continue;
      } else {
        dst = (int)g.states.size();
        index.emplace(key, dst);
        g.states.push_back(std::move(t.target));
        g.expanded.push_back(false);
        queue.push_back(dst);
      }
      g.edges.push_back(Edge{s, std::move(t.act), dst});
    }
  }
  return g;
}

}  // namespace mdpi
