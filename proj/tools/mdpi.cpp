#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "mdpi/compile.hpp"
#include "mdpi/graph_io.hpp"
#include "mdpi/parse.hpp"
#include "mdpi/verify.hpp"

using namespace mdpi;

namespace {

/* Exit codes: 0 ok/bisimilar, 1 distinguished, 2 inconclusive,
 * 3 unreadable/unparsable input, 4 monitor soundness bug. */
constexpr int kOk = 0, kDistinguished = 1, kInconclusive = 2, kBadInput = 3,
              kSoundnessBug = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

ClockMap parse_clocks(const std::vector<std::string>& entries) {
  ClockMap m;
  for (const std::string& e : entries) {
    auto eq = e.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("bad --clock entry '" + e + "', want loc=nat");
    m[Name::id(e.substr(0, eq))] = std::stoll(e.substr(eq + 1));
  }
  return m;
}

Filter load_filter(const std::string& spec) {
  try {
    return builtin_filter(spec);
  } catch (const std::invalid_argument&) {
    return filter_from_json_text(read_file(spec), spec);
  }
}

Mode parse_mode(const std::string& m) {
  if (m == "tau") return Mode::tau_only;
  if (m == "standard") return Mode::standard;
  if (m == "open") return Mode::open;
  throw std::runtime_error("unknown mode '" + m + "' (tau|standard|open)");
}

/* Options shared by the exploring commands. */
struct ExploreOpts {
  std::vector<std::string> clocks;
  std::string mode = "standard";
  int unfold = 8;
  int max_states = 250000;
  int max_trace = 64;

  void attach(CLI::App* cmd) {
    cmd->add_option("--clock", clocks,
                    "initial clock value per location, e.g. --clock l=5");
    cmd->add_option("--mode", mode, "step relation: tau|standard|open")
        ->capture_default_str();
    cmd->add_option("--unfold", unfold, "replication unfolding budget")
        ->capture_default_str();
    cmd->add_option("--max-states", max_states, "state-count cap")
        ->capture_default_str();
    cmd->add_option("--max-trace", max_trace, "per-location log cap")
        ->capture_default_str();
  }
  StepOptions step_options() const {
    StepOptions o;
    o.mode = parse_mode(mode);
    o.bounds.max_repeat_unfold = unfold;
    o.bounds.max_states = max_states;
    o.bounds.max_trace_len = max_trace;
    return o;
  }
};

std::string verdict_summary(const LtsGraph& g) {
  std::set<std::string> seen;
  for (const Config& c : g.states)
    for (const auto& [lv, n] : c.verdicts)
      seen.insert(lv.first.str() + ":" + verdict_text(lv.second));
  if (seen.empty()) return "none";
  std::string out;
  for (const auto& s : seen) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

/* Terminal = no progress edges (log re-broadcast self-loops stay forever
 * and do not count). */
void print_terminals(const LtsGraph& g, const std::vector<int>& outdeg) {
  std::vector<int> terminals;
  for (size_t i = 0; i < g.states.size(); ++i)
    if (outdeg[i] == 0 && g.expanded[i]) terminals.push_back((int)i);
  std::cout << "terminal states (" << terminals.size() << "):\n";
  const size_t cap = 50;
  for (size_t k = 0; k < terminals.size() && k < cap; ++k)
    std::cout << "  [" << terminals[k] << "] " << state_line(g.states[terminals[k]])
              << "\n";
  if (terminals.size() > cap)
    std::cout << "  ... and " << terminals.size() - cap << " more\n";
}

int cmd_explore(const std::string& path, const std::string& filter_spec,
                const ExploreOpts& eo, const std::string& json_path,
                const std::string& dot_path) {
  TermPtr sys = parse_system(read_file(path));
  Config init = initial_config(sys, parse_clocks(eo.clocks));
  StepOptions opt = eo.step_options();
  if (opt.mode == Mode::open) opt.universe = input_universe({init});
  LtsGraph g = explore(init, opt);

  if (!filter_spec.empty()) {
    Filter f = load_filter(filter_spec);
    FilteredLts fl = filtered_lts(g, f);
    std::cout << "filter: " << f.name << "\n";
    std::cout << "states: " << fl.n << "\n";
    std::cout << "edges: " << fl.edges.size() << "\n";
    std::cout << "truncated: " << (fl.truncated ? "yes" : "no") << "\n";
    std::cout << "verdicts: " << verdict_summary(g) << "\n";
    std::vector<int> outdeg(fl.n, 0);
    for (const auto& e : fl.edges)
      if (e.dst != e.src) ++outdeg[e.src];
    std::vector<int> terminals;
    for (int i = 0; i < fl.n; ++i)
      if (outdeg[i] == 0) terminals.push_back(i);
    std::cout << "terminal states (" << terminals.size() << "):\n";
    const size_t cap = 50;
    for (size_t k = 0; k < terminals.size() && k < cap; ++k)
      std::cout << "  [" << terminals[k] << "] " << state_line(fl.states[terminals[k]])
                << "\n";
    if (terminals.size() > cap)
      std::cout << "  ... and " << terminals.size() - cap << " more\n";
    if (!json_path.empty()) write_file(json_path, lts_to_json(fl));
    if (!dot_path.empty()) write_file(dot_path, lts_to_dot(fl));
    return kOk;
  }

  std::cout << "states: " << g.states.size() << "\n";
  std::cout << "edges: " << g.edges.size() << "\n";
  std::cout << "truncated: " << (g.truncated ? "yes" : "no") << "\n";
  std::cout << "verdicts: " << verdict_summary(g) << "\n";
  std::vector<int> outdeg(g.states.size(), 0);
  for (const Edge& e : g.edges)
    if (e.dst != e.src) ++outdeg[e.src];
  print_terminals(g, outdeg);
  if (!json_path.empty()) write_file(json_path, lts_to_json(g));
  if (!dot_path.empty()) write_file(dot_path, lts_to_dot(g));
  return kOk;
}

int cmd_check(const std::string& path_a, const std::string& path_b,
              const std::string& filter_shared, std::string filter_a,
              std::string filter_b, const ExploreOpts& eo,
              const std::string& witness_path) {
  if (filter_a.empty()) filter_a = filter_shared;
  if (filter_b.empty()) filter_b = filter_shared;
  TermPtr ta = parse_system(read_file(path_a));
  TermPtr tb = parse_system(read_file(path_b));
  ClockMap clocks = parse_clocks(eo.clocks);
  Config ia = initial_config(ta, clocks);
  Config ib = initial_config(tb, clocks);
  StepOptions opt = eo.step_options();
  if (opt.mode == Mode::open) opt.universe = input_universe({ia, ib});

  LtsGraph ga = explore(ia, opt);
  LtsGraph gb = explore(ib, opt);
  FilteredLts fa = filtered_lts(ga, load_filter(filter_a));
  FilteredLts fb = filtered_lts(gb, load_filter(filter_b));
  std::cout << "A: " << fa.n << " states, " << fa.edges.size() << " edges"
            << (fa.truncated ? " (truncated)" : "") << "\n";
  std::cout << "B: " << fb.n << " states, " << fb.edges.size() << " edges"
            << (fb.truncated ? " (truncated)" : "") << "\n";

  BisimResult r = check_weak_bisim(fa, fb);
  if (!witness_path.empty()) write_file(witness_path, bisim_to_json(r));
  switch (r.verdict) {
    case BisimResult::Verdict::bisimilar:
      std::cout << "verdict: bisimilar (" << r.witness.size()
                << " related pairs)\n";
      return kOk;
    case BisimResult::Verdict::inconclusive:
      std::cout << "verdict: inconclusive";
      if (!r.note.empty()) std::cout << " — " << r.note;
      std::cout << "\n";
      return kInconclusive;
    case BisimResult::Verdict::distinguished: {
      std::cout << "verdict: distinguished\n";
      if (!r.sequence.empty()) {
        std::cout << "distinguishing sequence (playable on "
                  << (r.sequence_on_a ? "A" : "B") << " only):";
        for (const AbstractAction& a : r.sequence)
          std::cout << " " << abstract_action_text(a);
        std::cout << "\n";
      }
      if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
      return kDistinguished;
    }
  }
  return kInconclusive;
}

int cmd_simulate(const std::string& path, int steps, std::uint64_t seed,
                 bool halt_on_fail, const ExploreOpts& eo) {
  TermPtr sys = parse_system(read_file(path));
  Config cur = initial_config(sys, parse_clocks(eo.clocks));
  StepOptions opt = eo.step_options();
  if (opt.mode == Mode::open) opt.universe = input_universe({cur});
  std::mt19937_64 rng(seed);
  int taken = 0;
  bool halted = false;
  for (; taken < steps; ++taken) {
    StepResult sr = enabled_transitions(cur, opt);
    if (sr.transitions.empty()) break;
    size_t pick = (size_t)(rng() % sr.transitions.size());
    const Transition& tr = sr.transitions[pick];
    std::cout << "  " << taken + 1 << ". " << action_text(tr.act) << "\n";
    cur = tr.target;
    if (halt_on_fail) {
      bool failed = false;
      for (const auto& [lv, n] : cur.verdicts)
        if (lv.second == Verdict::fail) failed = true;
      if (failed) {
        halted = true;
        ++taken;
        break;
      }
    }
  }
  std::cout << "steps taken: " << taken << (halted ? " (halted on fail)" : "")
            << "\n";
  std::cout << "final: " << state_line(cur) << "\n";
  std::cout << "logs:\n";
  auto logs = located_logs(cur);
  for (const auto& [loc, n] : cur.clocks)
    if (!logs.count(loc)) logs[loc];  // show clocked locations even if silent
  for (const auto& [loc, log] : logs) {
    std::cout << "  " << loc.str() << ":";
    if (log.empty()) std::cout << " (empty)";
    for (const LocatedEvent& ev : log)
      std::cout << " " << ev.chan.str() << "<" << join_names(ev.values) << ">@"
                << ev.stamp;
    std::cout << "\n";
  }
  return kOk;
}

struct CompileOpts {
  std::string strategy = "orch";
  std::string central, start;
  bool nested = false;
  bool no_align = false;
  std::vector<std::string> place;
  std::string ctx_init = "literal";
  std::vector<std::string> clocks;

  void attach(CLI::App* cmd) {
    cmd->add_option("--strategy", strategy, "orch|chor|mig")
        ->capture_default_str();
    cmd->add_option("--central", central,
                    "central/home location (default: first event's)");
    cmd->add_option("--start", start,
                    "choreography start-signal location (default: central)");
    cmd->add_flag("--nested", nested,
                  "migrating: one relocating monitor (sequences only)");
    cmd->add_flag("--no-align", no_align,
                  "nested migrating: omit the sync after each go");
    cmd->add_option("--place", place,
                    "choreography override, e.g. --place 0.comb=l");
    cmd->add_option("--ctx-init", ctx_init,
                    "block contexts: literal (…,1) or clock (…,delta(loc))")
        ->capture_default_str();
    cmd->add_option("--clock", clocks,
                    "clock values consulted by --ctx-init clock");
  }

  Placement placement(const ContractPtr& e) const {
    Placement p;
    std::vector<CEvent> evs = contract_events(e);
    if (evs.empty()) throw std::runtime_error("contract has no events");
    p.central = central.empty() ? evs.front().loc : Name::id(central);
    p.start = start.empty() ? p.central : Name::id(start);
    for (const std::string& s : place) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("bad --place entry '" + s +
                                 "', want node.macro=loc");
      p.at[s.substr(0, eq)] = Name::id(s.substr(eq + 1));
    }
    if (ctx_init == "clock") {
      p.ctx_from_clock = true;
      for (const auto& [loc, n] : parse_clocks(clocks)) p.clocks[loc] = n;
    } else if (ctx_init != "literal") {
      throw std::runtime_error("--ctx-init wants literal|clock");
    }
    return p;
  }

  TermPtr run(const ContractPtr& e) const {
    Placement p = placement(e);
    if (strategy == "orch") return compile_orch(e, p);
    if (strategy == "chor") return compile_chor(e, p);
    if (strategy == "mig") return compile_mig(e, p, nested, !no_align);
    throw std::runtime_error("unknown strategy '" + strategy + "'");
  }
};

int cmd_compile(const std::string& contract_path, const CompileOpts& co,
                const std::string& out_path) {
  ContractPtr e = parse_contract(read_file(contract_path));
  TermPtr mon = co.run(e);
  write_file(out_path.empty() ? "-" : out_path, print_term(mon) + "\n");
  return kOk;
}

int cmd_verify(const std::string& contract_path, const std::string& system_path,
               const std::string& strategy, const CompileOpts& co_in,
               const ExploreOpts& eo) {
  ContractPtr e = parse_contract(read_file(contract_path));
  TermPtr sys = parse_system(read_file(system_path));
  ClockMap clocks = parse_clocks(eo.clocks);

  std::vector<std::string> strategies;
  if (strategy == "all")
    strategies = {"orch", "chor", "mig"};
  else
    strategies.push_back(strategy);

  int rc = kOk;
  std::vector<std::pair<std::string, bool>> reach;
  for (const std::string& st : strategies) {
    CompileOpts co = co_in;
    co.strategy = st;
    TermPtr mon = co.run(e);
    Config init = initial_config(t_par(sys, mon), clocks);
    StepOptions opt = eo.step_options();
    if (opt.mode == Mode::open) opt.universe = input_universe({init});
    LtsGraph g = explore(init, opt);

    bool fail_reachable = false;
    int unconfirmed = 0;
    for (const Config& c : g.states) {
      bool failed = false;
      for (const auto& [lv, n] : c.verdicts)
        if (lv.second == Verdict::fail) failed = true;
      if (!failed) continue;
      fail_reachable = true;
      if (!some_prefix_matches(e, located_logs(c))) ++unconfirmed;
    }
    reach.emplace_back(st, fail_reachable);
    std::cout << "strategy " << st << ": states=" << g.states.size()
              << " edges=" << g.edges.size()
              << " truncated=" << (g.truncated ? "yes" : "no")
              << " fail-reachable=" << (fail_reachable ? "yes" : "no");
    if (fail_reachable)
      std::cout << " soundness="
                << (unconfirmed == 0 ? "confirmed"
                                     : std::to_string(unconfirmed) +
                                           " unconfirmed fail states");
    std::cout << "\n";
    if (unconfirmed > 0) rc = kSoundnessBug;
  }
  if (reach.size() > 1) {
    bool agree = true;
    for (const auto& [st, r] : reach) agree = agree && r == reach[0].second;
    std::cout << "strategies agree on fail-reachability: "
              << (agree ? "yes" : "no") << "\n";
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mDPi: located processes, trace monitors, and contract compilation"};
  app.require_subcommand(1);
  std::function<int()> action;

  /* explore */
  auto* ex = app.add_subcommand("explore", "exhaustively explore a system");
  static std::string ex_path, ex_filter, ex_json, ex_dot;
  static ExploreOpts ex_eo;
  ex->add_option("system", ex_path, "system file")->required();
  ex->add_option("--filter", ex_filter,
                 "ntg|prc|ltr|ltr-local-m or a JSON filter file");
  ex->add_option("--json", ex_json, "write the graph as JSON ('-' = stdout)");
  ex->add_option("--dot", ex_dot, "write the graph as DOT ('-' = stdout)");
  ex_eo.attach(ex);
  ex->callback([&] {
    action = [&] { return cmd_explore(ex_path, ex_filter, ex_eo, ex_json, ex_dot); };
  });

  /* check */
  auto* ck = app.add_subcommand("check", "weak-bisimilarity of two systems");
  static std::string ck_a, ck_b, ck_f = "ntg", ck_fa, ck_fb, ck_witness;
  static ExploreOpts ck_eo;
  ck->add_option("system-a", ck_a, "first system file")->required();
  ck->add_option("system-b", ck_b, "second system file")->required();
  ck->add_option("--filter", ck_f, "filter for both sides")
      ->capture_default_str();
  ck->add_option("--filter-a", ck_fa, "filter for side A only");
  ck->add_option("--filter-b", ck_fb, "filter for side B only");
  ck->add_option("--witness", ck_witness, "write the checker result as JSON");
  ck_eo.attach(ck);
  ck->callback([&] {
    action = [&] {
      return cmd_check(ck_a, ck_b, ck_f, ck_fa, ck_fb, ck_eo, ck_witness);
    };
  });

  /* simulate */
  auto* sm = app.add_subcommand("simulate", "run one random path");
  static std::string sm_path;
  static int sm_steps = 100;
  static std::uint64_t sm_seed = 0;
  static bool sm_seed_set = false, sm_halt = false;
  static ExploreOpts sm_eo;
  sm->add_option("system", sm_path, "system file")->required();
  sm->add_option("--steps", sm_steps, "step bound")->capture_default_str();
  sm->add_option("--seed", sm_seed, "RNG seed (default: $MDPI_SEED or 0)")
      ->each([&](const std::string&) { sm_seed_set = true; });
  sm->add_flag("--halt-on-first-fail", sm_halt,
               "stop as soon as a fail verdict appears");
  sm_eo.attach(sm);
  sm->callback([&] {
    action = [&] {
      std::uint64_t seed = sm_seed;
      if (!sm_seed_set) {
        const char* env = std::getenv("MDPI_SEED");
        seed = env ? std::strtoull(env, nullptr, 10) : 0;
      }
      return cmd_simulate(sm_path, sm_steps, seed, sm_halt, sm_eo);
    };
  });

  /* compile */
  auto* cp = app.add_subcommand("compile", "contract to monitor system");
  static std::string cp_contract, cp_out;
  static CompileOpts cp_co;
  cp->add_option("contract", cp_contract, "contract file")->required();
  cp->add_option("-o,--output", cp_out, "output path (default: stdout)");
  cp_co.attach(cp);
  cp->callback([&] {
    action = [&] { return cmd_compile(cp_contract, cp_co, cp_out); };
  });

  /* verify-contract */
  auto* vf = app.add_subcommand(
      "verify-contract", "compile, compose, explore, and cross-check verdicts");
  static std::string vf_contract, vf_system, vf_strategy = "all";
  static CompileOpts vf_co;
  static ExploreOpts vf_eo;
  vf->add_option("contract", vf_contract, "contract file")->required();
  vf->add_option("system", vf_system, "system file")->required();
  vf->add_option("--strategy", vf_strategy, "orch|chor|mig|all")
      ->capture_default_str();
  vf->add_option("--central", vf_co.central, "central/home location");
  vf->add_option("--start", vf_co.start, "choreography start location");
  vf->add_flag("--nested", vf_co.nested, "nested migrating monitor");
  vf->add_flag("--no-align", vf_co.no_align, "omit sync after go (nested)");
  vf->add_option("--place", vf_co.place, "choreography placement override");
  vf->add_option("--ctx-init", vf_co.ctx_init, "literal|clock")
      ->capture_default_str();
  vf_eo.attach(vf);
  vf->callback([&] {
    action = [&] {
      vf_co.clocks = vf_eo.clocks;  // --ctx-init clock uses the same map
      return cmd_verify(vf_contract, vf_system, vf_strategy, vf_co, vf_eo);
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    return action ? action() : kBadInput;
  } catch (const ParseError& pe) {
    std::cerr << pe.what() << "\n";
    return kBadInput;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kBadInput;
  }
}
