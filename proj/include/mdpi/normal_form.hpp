#pragma once

#include <optional>

#include "mdpi/term.hpp"

namespace mdpi {

/* One parallel component of a normalized system: a located process, trace
 * entity, or monitor body (ctx present).  `budget` is the engine's remaining
 * unfold allowance when the body is a replication; -1 when untracked. */
struct Atom {
  Name location;
  TermPtr body;
  std::optional<MonCtx> ctx;
  int budget = -1;
};

/* Canonical representation standing in for structural congruence: a single
 * hoisted binder prefix over a sorted multiset of atoms.  Parallel is
 * flattened (monitor blocks split pointwise), stop components are dropped,
 * binders with no occurrence are dropped, and atom order / binder numbering
 * are chosen so that alpha-equivalent congruent systems render identically. */
struct NormalForm {
  NameVec binders;
  std::vector<Atom> atoms;

  /* Canonical string; equal keys == same state (given equal budgets). */
  const std::string& key() const;
  TermPtr to_term() const;

  bool is_bound(const Name& n) const {
    for (const Name& b : binders)
      if (b == n) return true;
    return false;
  }

 private:
  mutable std::string key_;
};

NormalForm normal_form(const TermPtr& sys);

/* Rebuild a canonical NormalForm from edited atoms (re-hoists binders that
 * atom bodies still mention, drops the rest, re-sorts). */
NormalForm reform(const NameVec& binders, std::vector<Atom> atoms);

/* The syntax-level canonicalizer: hoist, flatten, sort, drop inert parts. */
TermPtr normalize(const TermPtr& sys);

TermPtr atom_term(const Atom& a);  // Located(loc, body-or-block), budget ignored

}  // namespace mdpi
