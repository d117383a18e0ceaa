#pragma once

#include <map>

#include "mdpi/normal_form.hpp"

namespace mdpi {

/* δ: next timestamp per location.  Lookups never insert; locations without
 * an entry read as 0. */
using ClockMap = std::map<Name, std::int64_t>;

std::int64_t clock_of(const ClockMap& m, const Name& loc);
ClockMap inc_clock(ClockMap m, const Name& loc);

enum class Verdict { ok, fail };
const char* verdict_text(Verdict v);

/* Flagged monitor verdicts; a multiset since several monitors may flag the
 * same verdict at the same location. */
using VerdictBag = std::map<std::pair<Name, Verdict>, int>;

struct Config {
  ClockMap clocks;
  NormalForm sys;
  VerdictBag verdicts;

  const std::string& key() const;

 private:
  mutable std::string key_;
};

/* Validates the clock/trace invariants: per location, logged timestamps are
 * duplicate-free, contiguous, and end one below that location's clock. */
Config initial_config(const TermPtr& sys, const ClockMap& clocks);

/* All trace-entity stamps at `loc`, sorted. */
std::vector<std::int64_t> log_stamps(const NormalForm& nf, const Name& loc);

}  // namespace mdpi
