#pragma once

#include "mdpi/filter.hpp"
#include "mdpi/semantics.hpp"

namespace mdpi {

/* An LTS whose edges carry filter images.  `states` may be empty for
 * synthetic graphs (tests); `n` is authoritative. */
struct FilteredLts {
  struct FEdge {
    int src;
    int label;
    int dst;
  };

  int n = 0;
  int initial = 0;
  bool truncated = false;
  std::vector<Config> states;          // optional payload, aligned with ids
  std::vector<AbstractAction> labels;  // interned
  std::vector<FEdge> edges;

  int intern(const AbstractAction& a);
  const AbstractAction& label(int id) const { return labels[id]; }
};

/* Applies the filter to every edge of the graph; edges whose action the
 * filter leaves undefined disappear, then unreachable states are pruned. */
FilteredLts filtered_lts(const LtsGraph& g, const Filter& f);

/* The weak-transition relation: tau edges become the reflexive-transitive
 * closure, alpha edges become tau*·alpha·tau*. */
FilteredLts weak_closure(const FilteredLts& l);

struct BisimResult {
  enum class Verdict { bisimilar, distinguished, inconclusive };
  Verdict verdict = Verdict::inconclusive;

  /* bisimilar: related reachable state pairs (a-state, b-state). */
  std::vector<std::pair<int, int>> witness;

  /* distinguished: a weak action sequence playable to completion on exactly
   * one side.  Empty when only refinement evidence exists (see note). */
  std::vector<AbstractAction> sequence;
  bool sequence_on_a = false;
  std::string note;
};

/* Weak bisimilarity of the two initial states. */
BisimResult check_weak_bisim(const FilteredLts& a, const FilteredLts& b);

}  // namespace mdpi
