#include "mdpi/compile.hpp"

#include <stdexcept>

namespace mdpi {
namespace {

Name draw(const char* hint, NameSet& used) {
  Name n = fresh_name(hint, used);
  used.insert(n);
  return n;
}

NameVec draw_tuple(const char* stem, int arity, NameSet& used) {
  NameVec xs;
  for (int i = 0; i < arity; ++i)
    xs.push_back(draw((std::string(stem) + std::to_string(i + 1)).c_str(), used));
  return xs;
}

Name draw(const std::string& hint, NameSet& used) {
  return draw(hint.c_str(), used);
}

/* if xs = vs then body else stop, as nested conditionals. */
TermPtr eq_guard(const NameVec& xs, const NameVec& vs, TermPtr body) {
  TermPtr t = std::move(body);
  for (size_t i = xs.size(); i-- > 0;) t = t_cond(xs[i], vs[i], t, t_stop());
  return t;
}

struct Compiler {
  const Placement& place;
  NameSet used;
  int node_idx = 0;  // preorder counter over operator nodes

  explicit Compiler(const ContractPtr& e, const Placement& p) : place(p) {
    used = contract_names(e);
    used.insert(p.central);
    used.insert(p.start);
    for (const auto& [k, v] : p.at) used.insert(v);
  }

  std::int64_t ctx_idx(const Name& loc) const {
    if (!place.ctx_from_clock) return 1;
    auto it = place.clocks.find(loc);
    return it == place.clocks.end() ? 1 : it->second;
  }

  Name macro_loc(int node, const char* which, const Name& fallback) const {
    auto it = place.at.find(std::to_string(node) + "." + which);
    return it == place.at.end() ? fallback : it->second;
  }

  static Name leftmost_event_loc(const ContractPtr& e) {
    if (auto* ev = std::get_if<CEvent>(&e->node)) return ev->loc;
    if (auto* s = std::get_if<CSeq>(&e->node)) return leftmost_event_loc(s->left);
    if (auto* st = std::get_if<CStar>(&e->node))
      return leftmost_event_loc(st->body);
    return leftmost_event_loc(std::get<CChoice>(e->node).left);
  }

  /* Basic-event listener shared by all strategies; migrate prepends go k. */
  TermPtr listener(const Name& s, const Name& f, const CEvent& ev,
                   bool migrate) {
    Name xl = draw("xl", used);
    Name xi = draw("xi", used);
    TermPtr trg = build_trg(ev.chan, ev.values, f, used);
    TermPtr body = t_cond(ev.loc, xl, t_seti(xl, xi, trg),
                          t_sync(ev.loc, trg));
    if (migrate) body = t_go(ev.loc, body);
    return t_rep(t_in(s, {xl, xi}, body));
  }

  /* psi': the wiring between a start and a match channel.  Every operator
   * draws its fresh channels before recursing, left to right. */
  TermPtr wire(const Name& s, const Name& f, const ContractPtr& e,
               bool migrate) {
    if (auto* ev = std::get_if<CEvent>(&e->node))
      return listener(s, f, *ev, migrate);
    if (auto* sq = std::get_if<CSeq>(&e->node)) {
      ++node_idx;
      Name m = draw("m", used);
      return t_new(m, t_pars({wire(s, m, sq->left, migrate),
                              wire(m, f, sq->right, migrate)}));
    }
    if (auto* st = std::get_if<CStar>(&e->node)) {
      ++node_idx;
      Name c = draw("c", used);
      Name s2 = draw("s'", used);
      Name f2 = draw("f'", used);
      return t_news({c, s2, f2},
                    t_pars({build_comb(s, f2, c, 2, used),
                            build_bifurc(c, s2, f, 2, used),
                            wire(s2, f2, st->body, migrate)}));
    }
    const auto& ch = std::get<CChoice>(e->node);
    ++node_idx;
    Name s1 = draw("s1", used);
    Name s2 = draw("s2", used);
    Name f1 = draw("f1", used);
    Name f2 = draw("f2", used);
    return t_news({s1, s2, f1, f2},
                  t_pars({build_bifurc(s, s1, s2, 2, used),
                          wire(s1, f1, ch.left, migrate),
                          wire(s2, f2, ch.right, migrate),
                          build_comb(f1, f2, f, 2, used)}));
  }

  /* Choreography: the same wiring, but every listener and macro gets its
   * own located block. */
  TermPtr wire_chor(const Name& s, const Name& f, const ContractPtr& e) {
    if (auto* ev = std::get_if<CEvent>(&e->node)) {
      TermPtr ls = listener(s, f, *ev, false);
      return t_at(ev->loc, t_block(ls, MonCtx{ev->loc, ctx_idx(ev->loc)}));
    }
    if (auto* sq = std::get_if<CSeq>(&e->node)) {
      ++node_idx;
      Name m = draw("m", used);
      return t_new(m, t_pars({wire_chor(s, m, sq->left),
                              wire_chor(m, f, sq->right)}));
    }
    auto blockify = [&](const Name& loc, TermPtr t) {
      return t_at(loc, t_block(std::move(t), MonCtx{loc, ctx_idx(loc)}));
    };
    if (auto* st = std::get_if<CStar>(&e->node)) {
      int node = node_idx++;
      Name def = leftmost_event_loc(st->body);
      Name lc = macro_loc(node, "comb", def);
      Name lb = macro_loc(node, "bifurc", def);
      Name c = draw("c", used);
      Name s2 = draw("s'", used);
      Name f2 = draw("f'", used);
      return t_news({c, s2, f2},
                    t_pars({blockify(lc, build_comb(s, f2, c, 2, used)),
                            blockify(lb, build_bifurc(c, s2, f, 2, used)),
                            wire_chor(s2, f2, st->body)}));
    }
    const auto& ch = std::get<CChoice>(e->node);
    int node = node_idx++;
    Name def = leftmost_event_loc(ch.right);
    Name lb = macro_loc(node, "bifurc", def);
    Name lc = macro_loc(node, "comb", def);
    Name s1 = draw("s1", used);
    Name s2 = draw("s2", used);
    Name f1 = draw("f1", used);
    Name f2 = draw("f2", used);
    return t_news({s1, s2, f1, f2},
                  t_pars({blockify(lb, build_bifurc(s, s1, s2, 2, used)),
                          wire_chor(s1, f1, ch.left),
                          wire_chor(s2, f2, ch.right),
                          blockify(lc, build_comb(f1, f2, f, 2, used))}));
  }

  /* Single central block: start signal | wiring | fail watcher. */
  TermPtr central_block(const ContractPtr& e, bool migrate) {
    const Name& h = place.central;
    Name s = draw("s", used);
    Name f = draw("f", used);
    TermPtr w = wire(s, f, e, migrate);
    NameVec xs = draw_tuple("x", 2, used);
    std::int64_t i0 = ctx_idx(h);
    TermPtr body =
        t_news({s, f}, t_pars({t_out(s, {h, Name::idx(i0)}, t_stop()),
                               std::move(w), t_in(f, xs, t_fail())}));
    return t_at(h, t_block(std::move(body), MonCtx{h, i0}));
  }
};

}  // namespace

TermPtr build_comb(const Name& f1, const Name& f2, const Name& f, int arity,
                   NameSet& used) {
  NameVec xs = draw_tuple("x", arity, used);
  NameVec ys = draw_tuple("x", arity, used);
  return t_par(t_rep(t_in(f1, xs, t_out(f, xs, t_stop()))),
               t_rep(t_in(f2, ys, t_out(f, ys, t_stop()))));
}

TermPtr build_bifurc(const Name& s, const Name& s1, const Name& s2, int arity,
                     NameSet& used) {
  NameVec xs = draw_tuple("x", arity, used);
  return t_rep(
      t_in(s, xs, t_par(t_out(s1, xs, t_stop()), t_out(s2, xs, t_stop()))));
}

TermPtr build_trg(const Name& c, const NameVec& vals, const Name& f,
                  NameSet& used) {
  NameVec xs = draw_tuple("x", (int)vals.size(), used);
  Name xl = draw("xl", used);
  Name xi = draw("xi", used);
  TermPtr report = t_geti(xl, xi, t_out(f, {xl, xi}, t_stop()));
  return t_rep(t_query(c, xs, eq_guard(xs, vals, std::move(report))));
}

TermPtr compile_orch(const ContractPtr& e, const Placement& p) {
  Compiler cc(e, p);
  return cc.central_block(e, false);
}

TermPtr compile_chor(const ContractPtr& e, const Placement& p) {
  Compiler cc(e, p);
  const Name& k = p.start;
  Name s = draw("s", cc.used);
  Name f = draw("f", cc.used);
  TermPtr w = cc.wire_chor(s, f, e);
  NameVec xs = draw_tuple("x", 2, cc.used);
  std::int64_t i0 = cc.ctx_idx(k);
  TermPtr starter = t_par(t_out(s, {k, Name::idx(i0)}, t_stop()),
                          t_in(f, xs, t_fail()));
  TermPtr start_blk =
      t_at(k, t_block(std::move(starter), MonCtx{k, i0}));
  return t_news({s, f}, t_par(std::move(start_blk), std::move(w)));
}

TermPtr compile_mig(const ContractPtr& e, const Placement& p, bool nested,
                    bool align) {
  if (!nested) {
    Compiler cc(e, p);
    return cc.central_block(e, true);
  }
  /* Nested mode: a single monitor that walks a sequence of events,
   * relocating before each query. */
  std::vector<CEvent> evs;
  {
    std::vector<ContractPtr> stack{e};
    while (!stack.empty()) {
      ContractPtr cur = stack.back();
      stack.pop_back();
      if (auto* ev = std::get_if<CEvent>(&cur->node)) {
        evs.push_back(*ev);
        continue;
      }
      if (auto* sq = std::get_if<CSeq>(&cur->node)) {
        stack.push_back(sq->right);  // left first after the two pops below
        stack.push_back(sq->left);
        continue;
      }
      throw std::invalid_argument(
          "nested migrating compilation needs a plain sequence of events");
    }
  }
  NameSet used = contract_names(e);
  used.insert(p.central);
  TermPtr body = t_fail();
  for (size_t i = evs.size(); i-- > 0;) {
    const CEvent& ev = evs[i];
    NameVec xs;
    for (size_t j = 0; j < ev.values.size(); ++j)
      xs.push_back(fresh_name(
          "x" + std::to_string(i + 1) +
              (ev.values.size() > 1 ? "_" + std::to_string(j + 1) : ""),
          used));
    for (const Name& x : xs) used.insert(x);
    body = t_query(ev.chan, xs, eq_guard(xs, ev.values, std::move(body)));
    if (align) body = t_sync(ev.loc, std::move(body));
    body = t_go(ev.loc, std::move(body));
  }
  std::int64_t i0 =
      p.ctx_from_clock && p.clocks.count(p.central) ? p.clocks.at(p.central) : 1;
  return t_at(p.central, t_block(std::move(body), MonCtx{p.central, i0}));
}

}  // namespace mdpi
