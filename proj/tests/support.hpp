#pragma once

/* Helpers shared by the test binaries: tiny wrappers around the library
 * entry points, log/clock invariant checks, and deterministic generators
 * for random systems and contracts. */

#include <random>
#include <set>
#include <sstream>
#include <string>

#include "mdpi/compile.hpp"
#include "mdpi/contract.hpp"
#include "mdpi/parse.hpp"
#include "mdpi/semantics.hpp"

namespace testutil {

using namespace mdpi;

inline Config init(const std::string& src, const ClockMap& clocks = {}) {
  return initial_config(parse_system(src), clocks);
}

inline StepOptions sopts(Mode m, int unfold = 8, int max_states = 250000) {
  StepOptions o;
  o.mode = m;
  o.bounds.max_repeat_unfold = unfold;
  o.bounds.max_states = max_states;
  return o;
}

inline std::multiset<std::string> step_labels(const Config& c,
                                              const StepOptions& o) {
  std::multiset<std::string> out;
  for (const Transition& tr : enabled_transitions(c, o).transitions)
    out.insert(action_text(tr.act));
  return out;
}

/* "loc:chan<v̄>@stamp" for every trace entity of the state. */
inline std::multiset<std::string> log_atoms(const Config& c) {
  std::multiset<std::string> out;
  for (const Atom& a : c.sys.atoms)
    if (const TraceEntity* e = as<TraceEntity>(a.body))
      out.insert(a.location.str() + ":" + e->subject.str() + "<" +
                 join_names(e->values) + ">@" + std::to_string(e->stamp));
  return out;
}

inline bool contains_all(const std::multiset<std::string>& big,
                         const std::multiset<std::string>& small) {
  for (const std::string& s : small)
    if (big.count(s) < small.count(s)) return false;
  return true;
}

/* Per-state log shape plus per-edge monotonicity:
 *  - logged stamps at each location are contiguous and end one below the
 *    clock;
 *  - along an edge each location either keeps its log and clock, or gains
 *    exactly the entry stamped with the source clock while the clock ticks;
 *  - entities and verdicts are never dropped.
 * Returns an empty string when everything holds. */
inline std::string check_log_invariants(const LtsGraph& g) {
  std::ostringstream err;
  auto stamps_of = [](const Config& c, const Name& loc) {
    return log_stamps(c.sys, loc);
  };
  for (size_t i = 0; i < g.states.size(); ++i) {
    const Config& c = g.states[i];
    for (const auto& [loc, clk] : c.clocks) {
      std::vector<std::int64_t> st = stamps_of(c, loc);
      for (size_t j = 0; j + 1 < st.size(); ++j)
        if (st[j] + 1 != st[j + 1]) {
          err << "state " << i << ": gap in log at " << loc.str();
          return err.str();
        }
      if (!st.empty() && st.back() + 1 != clk) {
        err << "state " << i << ": clock of " << loc.str() << " is " << clk
            << ", log ends at " << st.back();
        return err.str();
      }
    }
  }
  for (const Edge& e : g.edges) {
    const Config& s = g.states[e.src];
    const Config& d = g.states[e.dst];
    if (!contains_all(log_atoms(d), log_atoms(s))) {
      err << "edge " << e.src << "->" << e.dst << " [" << action_text(e.act)
          << "] drops a trace entity";
      return err.str();
    }
    for (const auto& [loc, sclk] : s.clocks) {
      std::int64_t dclk = clock_of(d.clocks, loc);
      auto ss = stamps_of(s, loc), ds = stamps_of(d, loc);
      if (dclk == sclk) {
        if (ds.size() != ss.size()) {
          err << "edge " << e.src << "->" << e.dst << ": log of " << loc.str()
              << " changed without a clock tick";
          return err.str();
        }
      } else if (dclk == sclk + 1) {
        if (ds.size() != ss.size() + 1 || ds.back() != sclk) {
          err << "edge " << e.src << "->" << e.dst << ": clock of "
              << loc.str() << " ticked but the new entry is not stamped "
              << sclk;
          return err.str();
        }
      } else {
        err << "edge " << e.src << "->" << e.dst << ": clock of " << loc.str()
            << " jumped " << sclk << "->" << dclk;
        return err.str();
      }
    }
    for (const auto& [kv, n] : s.verdicts) {
      auto it = d.verdicts.find(kv);
      if (it == d.verdicts.end() || it->second < n) {
        err << "edge " << e.src << "->" << e.dst << " retracts a verdict";
        return err.str();
      }
    }
  }
  return {};
}

inline bool fail_reachable(const LtsGraph& g) {
  for (const Config& c : g.states)
    for (const auto& [kv, n] : c.verdicts)
      if (kv.second == Verdict::fail && n > 0) return true;
  return false;
}

/* States with no progress edge (log re-broadcast self-loops don't count). */
inline std::vector<int> progress_terminals(const LtsGraph& g) {
  std::vector<bool> has(g.states.size(), false);
  for (const Edge& e : g.edges)
    if (e.dst != e.src) has[e.src] = true;
  std::vector<int> out;
  for (size_t i = 0; i < g.states.size(); ++i)
    if (!has[i] && g.expanded[i]) out.push_back((int)i);
  return out;
}

/* ---- deterministic random generators ------------------------------------ */

struct Rng {
  std::mt19937 rng;
  explicit Rng(unsigned seed) : rng(seed) {}
  int r(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[r((int)v.size())];
  }
};

/* Straight-line systems: up to `max_out` outputs spread over up to
 * `max_loc` locations, each location running one sequential chain.
 * Occasionally a chain starts with an input so communication and blocking
 * show up too. */
struct SysGen {
  Rng rng;
  explicit SysGen(unsigned seed) : rng(seed) {}

  TermPtr next(int max_loc = 3, int max_out = 6) {
    static const std::vector<Name> locs = {Name::id("l"), Name::id("k"),
                                           Name::id("h")};
    static const std::vector<Name> chans = {Name::id("c"), Name::id("d")};
    static const std::vector<Name> vals = {Name::id("u"), Name::id("v")};
    int nloc = 1 + rng.r(max_loc);
    int remaining = 1 + rng.r(max_out);
    std::vector<TermPtr> atoms;
    for (int i = 0; i < nloc && remaining > 0; ++i) {
      int here = 1 + rng.r(remaining);
      remaining -= here;
      TermPtr chain = t_stop();
      for (int j = 0; j < here; ++j)
        chain = t_out(rng.pick(chans), {rng.pick(vals)}, chain);
      if (rng.r(4) == 0)
        chain = t_in(rng.pick(chans), {Name::id("x")}, chain);
      atoms.push_back(t_at(locs[i], chain));
    }
    return t_pars(atoms);
  }
};

/* Contracts for the compiler corpus: operator depth <= 3, events drawn from
 * a small alphabet (<= `max_loc` locations, <= 2 channels, at most one
 * value).  Star bodies are kept non-nullable so compiled monitors cannot
 * cycle without consuming an event. */
struct ContractGen {
  Rng rng;
  std::vector<Name> locs, chans, vals;

  explicit ContractGen(unsigned seed, int max_loc = 3) : rng(seed) {
    static const Name all_locs[] = {Name::id("l"), Name::id("k"),
                                    Name::id("h")};
    for (int i = 0; i < max_loc; ++i) locs.push_back(all_locs[i]);
    chans = {Name::id("c"), Name::id("d")};
    vals = {Name::id("v"), Name::id("w")};
  }

  /* Channels keep a fixed arity (c carries one value, d none): every entry
   * on a channel stays readable by that channel's queries, so a monitor is
   * never stuck on an entry it can neither read nor skip. */
  CEvent event() {
    CEvent e;
    e.chan = rng.pick(chans);
    if (e.chan == chans[0]) e.values = {rng.pick(vals)};
    e.loc = rng.pick(locs);
    return e;
  }

  static bool nullable(const ContractPtr& c) {
    if (std::get_if<CEvent>(&c->node)) return false;
    if (std::get_if<CStar>(&c->node)) return true;
    if (auto* s = std::get_if<CSeq>(&c->node))
      return nullable(s->left) && nullable(s->right);
    auto& ch = std::get<CChoice>(c->node);
    return nullable(ch.left) || nullable(ch.right);
  }

  ContractPtr gen(int depth) {
    if (depth <= 0 || rng.r(3) == 0) {
      CEvent e = event();
      return c_event(e.chan, e.values, e.loc);
    }
    switch (rng.r(3)) {
      case 0: return c_seq(gen(depth - 1), gen(depth - 1));
      case 1: {
        ContractPtr body = gen(depth - 1);
        if (nullable(body)) {
          CEvent e = event();
          body = c_event(e.chan, e.values, e.loc);
        }
        return c_star(body);
      }
      default: return c_choice(gen(depth - 1), gen(depth - 1));
    }
  }

  /* A run of located communications over the same alphabet; locations
   * restricted to those of `c` so the script stays relevant. */
  std::vector<CEvent> script(const ContractPtr& c, int max_events) {
    NameSet cl;
    for (const CEvent& e : contract_events(c)) cl.insert(e.loc);
    std::vector<Name> use(cl.begin(), cl.end());
    std::vector<CEvent> out;
    int n = 1 + rng.r(max_events);
    for (int i = 0; i < n; ++i) {
      CEvent e = event();
      e.loc = use[rng.r((int)use.size())];
      out.push_back(e);
    }
    return out;
  }
};

/* The script as a system: one sequential sender chain per location. */
inline TermPtr scripted_system(const std::vector<CEvent>& script) {
  std::map<Name, std::vector<const CEvent*>> per;
  std::vector<Name> order;
  for (const CEvent& e : script) {
    if (!per.count(e.loc)) order.push_back(e.loc);
    per[e.loc].push_back(&e);
  }
  std::vector<TermPtr> atoms;
  for (const Name& loc : order) {
    TermPtr chain = t_stop();
    const auto& evs = per[loc];
    for (size_t i = evs.size(); i-- > 0;)
      chain = t_out(evs[i]->chan, evs[i]->values, chain);
    atoms.push_back(t_at(loc, chain));
  }
  return t_pars(atoms);
}

/* Clock map starting every mentioned location at 1; compiled monitors are
 * initialized with literal context index 1, so logs must begin there. */
inline ClockMap ones_for(const TermPtr& sys) {
  Config probe = initial_config(sys, {});
  ClockMap m;
  for (const auto& [loc, v] : probe.clocks) m[loc] = 1;
  return m;
}

inline LocatedTrace as_trace(const std::vector<CEvent>& script) {
  LocatedTrace t;
  for (const CEvent& e : script)
    t.push_back(LocatedEvent{e.loc, e.chan, e.values, -1});
  return t;
}

}  // namespace testutil
