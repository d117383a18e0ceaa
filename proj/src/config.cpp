#include "mdpi/config.hpp"

#include <algorithm>
#include <stdexcept>

namespace mdpi {

std::int64_t clock_of(const ClockMap& m, const Name& loc) {
  auto it = m.find(loc);
  return it == m.end() ? 0 : it->second;
}

ClockMap inc_clock(ClockMap m, const Name& loc) {
  ++m[loc];
  return m;
}

const char* verdict_text(Verdict v) { return v == Verdict::ok ? "ok" : "fail"; }

const std::string& Config::key() const {
  if (key_.empty()) {
    std::string k = "d{";
    bool first = true;
    for (const auto& [loc, c] : clocks) {
      if (!first) k += ",";
      first = false;
      k += loc.str() + "=" + std::to_string(c);
    }
    k += "};";
    k += sys.key();
    if (!verdicts.empty()) {
      k += ";v{";
      first = true;
      for (const auto& [lv, n] : verdicts) {
        if (!first) k += ",";
        first = false;
        k += lv.first.str() + ":" + verdict_text(lv.second) + "x" +
             std::to_string(n);
      }
      k += "}";
    }
    key_ = k;
  }
  return key_;
}

std::vector<std::int64_t> log_stamps(const NormalForm& nf, const Name& loc) {
  std::vector<std::int64_t> out;
  for (const Atom& a : nf.atoms) {
    if (!(a.location == loc)) continue;
    if (const TraceEntity* e = as<TraceEntity>(a.body)) out.push_back(e->stamp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

/* Free location mentions only: a sync/go/setI target under a binder is a
 * variable, not a location that needs a clock. */
void collect_locations(const TermPtr& t, NameSet bound, NameSet& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          collect_locations(x.next, bound, out);
        } else if constexpr (std::is_same_v<T, Input> ||
                             std::is_same_v<T, Query>) {
          for (const Name& b : x.binders) bound.insert(b);
          collect_locations(x.next, std::move(bound), out);
        } else if constexpr (std::is_same_v<T, NewChan>) {
          bound.insert(x.channel);
          collect_locations(x.body, std::move(bound), out);
        } else if constexpr (std::is_same_v<T, Cond>) {
          collect_locations(x.then_branch, bound, out);
          collect_locations(x.else_branch, std::move(bound), out);
        } else if constexpr (std::is_same_v<T, Par>) {
          collect_locations(x.left, bound, out);
          collect_locations(x.right, std::move(bound), out);
        } else if constexpr (std::is_same_v<T, Repeat>) {
          collect_locations(x.body, std::move(bound), out);
        } else if constexpr (std::is_same_v<T, SyncM> ||
                             std::is_same_v<T, GoM>) {
          if (!x.target.is_index() && !bound.count(x.target))
            out.insert(x.target);
          collect_locations(x.next, std::move(bound), out);
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          bound.insert(x.loc_var);
          bound.insert(x.idx_var);
          collect_locations(x.next, std::move(bound), out);
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          if (!x.loc.is_index() && !bound.count(x.loc)) out.insert(x.loc);
          collect_locations(x.next, std::move(bound), out);
        }
      },
      t->node);
}

}  // namespace

Config initial_config(const TermPtr& sys, const ClockMap& clocks) {
  Config c;
  c.sys = normal_form(sys);
  c.clocks = clocks;

  /* Every syntactically mentioned location gets a clock (default 0). */
  NameSet locs;
  for (const Atom& a : c.sys.atoms) {
    locs.insert(a.location);
    if (a.ctx) locs.insert(a.ctx->loc);
    NameSet bound(c.sys.binders.begin(), c.sys.binders.end());
    collect_locations(a.body, std::move(bound), locs);
  }
  for (const Name& l : locs) c.clocks.emplace(l, 0);

  /* Trace invariants per location. */
  for (const Name& l : locs) {
    std::vector<std::int64_t> stamps = log_stamps(c.sys, l);
    if (stamps.empty()) continue;
    for (size_t i = 0; i + 1 < stamps.size(); ++i) {
      if (stamps[i] == stamps[i + 1])
        throw std::invalid_argument("duplicate trace timestamp " +
                                    std::to_string(stamps[i]) + " at " +
                                    l.str());
      if (stamps[i] + 1 != stamps[i + 1])
        throw std::invalid_argument("trace timestamps at " + l.str() +
                                    " are not contiguous");
    }
    if (stamps.front() < 0)
      throw std::invalid_argument("negative trace timestamp at " + l.str());
    if (stamps.back() + 1 != clock_of(c.clocks, l))
      throw std::invalid_argument(
          "clock of " + l.str() + " must be " +
          std::to_string(stamps.back() + 1) + " (one past the last logged "
          "timestamp), got " + std::to_string(clock_of(c.clocks, l)));
  }
  return c;
}

}  // namespace mdpi
