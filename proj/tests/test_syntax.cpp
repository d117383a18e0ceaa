#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <sstream>

#include "doctest.h"
#include "mdpi/normal_form.hpp"
#include "mdpi/parse.hpp"
#include "mdpi/rewrite.hpp"

using namespace mdpi;

namespace {

Name N(const char* s) { return Name::id(s); }

/* ---- nameless (de Bruijn) rendering, the independent oracle ------------- */
/* Bound occurrences render as b{k} (distance to binder), free identifiers as
 * f{text}, index literals as i{num}.  Two terms are alpha-equivalent iff
 * their renderings coincide, and capture-avoiding substitution of free names
 * is, at this level, plain token replacement. */

std::string db_name(const Name& n, const std::vector<Name>& env) {
  if (n.is_index()) return "i{" + std::to_string(n.num) + "}";
  for (int i = (int)env.size() - 1; i >= 0; --i)
    if (env[i] == n) return "b{" + std::to_string((int)env.size() - 1 - i) + "}";
  return "f{" + n.text + "}";
}

void db_rec(const TermPtr& t, std::vector<Name> env, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        auto nm = [&](const Name& n) { out += db_name(n, env) + " "; };
        if constexpr (std::is_same_v<T, Stop>) {
          out += "0;";
        } else if constexpr (std::is_same_v<T, Output>) {
          out += "out ";
          nm(x.subject);
          for (const Name& v : x.values) nm(v);
          out += ";";
          db_rec(x.next, env, out);
        } else if constexpr (std::is_same_v<T, Input> ||
                             std::is_same_v<T, Query>) {
          out += std::is_same_v<T, Input> ? "in " : "qry ";
          nm(x.subject);
          out += "/" + std::to_string(x.binders.size()) + ";";
          for (const Name& b : x.binders) env.push_back(b);
          db_rec(x.next, env, out);
        } else if constexpr (std::is_same_v<T, NewChan>) {
          out += "new;";
          env.push_back(x.channel);
          db_rec(x.body, env, out);
        } else if constexpr (std::is_same_v<T, Cond>) {
          out += "if ";
          nm(x.lhs);
          nm(x.rhs);
          out += "{";
          db_rec(x.then_branch, env, out);
          out += "}{";
          db_rec(x.else_branch, env, out);
          out += "}";
        } else if constexpr (std::is_same_v<T, Par>) {
          out += "(";
          db_rec(x.left, env, out);
          out += "|";
          db_rec(x.right, env, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, Repeat>) {
          out += "!";
          db_rec(x.body, env, out);
        } else if constexpr (std::is_same_v<T, TraceEntity>) {
          out += "tr ";
          nm(x.subject);
          for (const Name& v : x.values) nm(v);
          out += "@" + std::to_string(x.stamp) + ";";
        } else if constexpr (std::is_same_v<T, SyncM>) {
          out += "sy ";
          nm(x.target);
          out += ";";
          db_rec(x.next, env, out);
        } else if constexpr (std::is_same_v<T, GoM>) {
          out += "go ";
          nm(x.target);
          out += ";";
          db_rec(x.next, env, out);
        } else if constexpr (std::is_same_v<T, GetIdx>) {
          out += "gi;";
          env.push_back(x.loc_var);
          env.push_back(x.idx_var);
          db_rec(x.next, env, out);
        } else if constexpr (std::is_same_v<T, SetIdx>) {
          out += "si ";
          nm(x.loc);
          nm(x.idx);
          out += ";";
          db_rec(x.next, env, out);
        } else if constexpr (std::is_same_v<T, OkM>) {
          out += "ok;";
        } else if constexpr (std::is_same_v<T, FailM>) {
          out += "fl;";
        } else if constexpr (std::is_same_v<T, MonBlock>) {
          out += "[";
          db_rec(x.mon, env, out);
          out += "]@ " + db_name(x.ctx.loc, env) + " " +
                 std::to_string(x.ctx.idx) + ";";
        } else if constexpr (std::is_same_v<T, Located>) {
          out += "at ";
          nm(x.location);
          out += "{";
          db_rec(x.body, env, out);
          out += "}";
        }
      },
      t->node);
}

std::string db(const TermPtr& t) {
  std::string out;
  db_rec(t, {}, out);
  return out;
}

/* Free-name substitution performed on the rendering itself: replaces whole
 * f{...} tokens, simultaneously.  Cannot capture by construction. */
std::string db_subst(const std::string& s, const NameMap& m) {
  std::map<std::string, std::string> tok;
  for (const auto& [k, v] : m) {
    if (k.is_index() || k == v) continue;
    tok["f{" + k.text + "}"] =
        v.is_index() ? "i{" + std::to_string(v.num) + "}" : "f{" + v.text + "}";
  }
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "f{") == 0) {
      size_t j = s.find('}', i);
      std::string t = s.substr(i, j - i + 1);
      auto it = tok.find(t);
      out += it == tok.end() ? t : it->second;
      i = j + 1;
    } else {
      out += s[i++];
    }
  }
  return out;
}

/* ---- random terms ------------------------------------------------------- */

struct Gen {
  std::mt19937 rng;
  explicit Gen(unsigned seed) : rng(seed) {}

  int r(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Name name() {
    static const char* pool[] = {"a", "b", "c", "d", "x", "y", "z"};
    return N(pool[r(7)]);
  }
  Name name_or_idx() { return r(4) == 0 ? Name::idx(r(5)) : name(); }

  NameVec binders(int max) {
    NameSet seen;
    NameVec out;
    int k = 1 + r(max);
    while ((int)out.size() < k) {
      Name b = name();
      if (seen.insert(b).second) out.push_back(b);
    }
    return out;
  }

  TermPtr proc(int d) {
    if (d <= 0) return r(2) ? t_stop() : t_out(name(), {name()}, t_stop());
    switch (r(7)) {
      case 0: return t_stop();
      case 1: {
        NameVec vs;
        for (int i = r(3); i-- > 0;) vs.push_back(name());
        return t_out(name(), vs, proc(d - 1));
      }
      case 2: return t_in(name(), binders(2), proc(d - 1));
      case 3: return t_new(name(), proc(d - 1));
      case 4: return t_cond(name(), name(), proc(d - 1), proc(d - 1));
      case 5: return t_par(proc(d - 1), proc(d - 1));
      default: return t_rep(proc(d - 1));
    }
  }

  TermPtr mon(int d) {
    if (d <= 0) return r(2) ? t_ok() : t_fail();
    switch (r(12)) {
      case 0: return t_ok();
      case 1: return t_fail();
      case 2: {
        NameVec vs;
        for (int i = r(3); i-- > 0;) vs.push_back(name());
        return t_out(name(), vs, mon(d - 1));
      }
      case 3: return t_in(name(), binders(2), mon(d - 1));
      case 4: return t_query(name(), binders(2), mon(d - 1));
      case 5: return t_new(name(), mon(d - 1));
      case 6: return t_cond(name(), name(), mon(d - 1), mon(d - 1));
      case 7: return t_par(mon(d - 1), mon(d - 1));
      case 8: return t_rep(mon(d - 1));
      case 9: return t_sync(name(), mon(d - 1));
      case 10: {
        NameVec bs = binders(2);
        while (bs.size() < 2) bs.push_back(fresh_name("w", {bs[0]}));
        return t_geti(bs[0], bs[1], mon(d - 1));
      }
      default: return t_seti(name(), name_or_idx(), mon(d - 1));
    }
  }

  TermPtr system(int d) {
    switch (r(5)) {
      case 0: return t_at(name(), proc(d));
      case 1: return t_at(name(), t_block(mon(d), MonCtx{name(), r(4)}));
      case 2: return t_at(name(), t_trace(name(), {name()}, r(6)));
      case 3: return t_new(name(), system(d));
      default: return t_par(system(d > 0 ? d - 1 : 0), system(d > 0 ? d - 1 : 0));
    }
  }

  TermPtr any(int d) {
    switch (r(3)) {
      case 0: return proc(d);
      case 1: return mon(d);
      default: return system(d);
    }
  }
};

std::string rt_key(const std::string& src) {
  return normal_form(parse_system(src)).key();
}

}  // namespace

TEST_CASE("names: ordering, rendering, freshness") {
  CHECK(Name::id("a") < Name::id("b"));
  CHECK(Name::id("zz") < Name::idx(0));  // identifiers sort before indices
  CHECK(Name::idx(3) < Name::idx(11));
  CHECK(Name::id("l").str() == "l");
  CHECK(Name::idx(7).str() == "7");
  CHECK_FALSE(Name::id("7") == Name::idx(7));

  NameSet used{N("x"), N("x_1")};
  CHECK(fresh_name("x", used) == N("x_2"));
  CHECK(fresh_name("y", used) == N("y"));
}

TEST_CASE("parser round-trips every construct") {
  const char* sources[] = {
      "l[[stop]]",
      "l[[c!<v>]]",
      "l[[c!<>]]",
      "l[[c!<v,w>.d?(x).x!<w>]]",
      "l[[c?(x,y).if x = y then d!<x> else stop]]",
      "l[[new n.(n!<v> | n?(x))]]",
      "l[[!(c?(x).d!<x>)]]",
      "l[[trace c<v,w>@4]]",
      "l[[ c?*(x). if x = v then ok else fail ]]@(l,0)",
      "l[[ sync k. go k. getI(xl,xi). setI(xl,xi). ok ]]@(k,2)",
      "l[[ setI(k,3). fail ]]@(l,1)",
      "h[[new s,f.(s!<h,1> | f?(x1,x2).fail)]]@(h,1)",
      "l[[c!<v>]] | k[[d!<w>]] | new n.( l[[n!<v>]] | k[[n?(x).x!<v>]] )",
      "stop",
      "l[[if a = b then stop else c!<v>]]",
      "l[[ !(s?(xl,xi).if l = xl then setI(xl,xi).ok else sync l.fail) ]]@(h,1)",
  };
  for (const char* src : sources) {
    CAPTURE(src);
    TermPtr t = parse_system(src);
    std::string printed = print_term(t);
    CAPTURE(printed);
    TermPtr t2 = parse_system(printed);
    CHECK(term_eq(t, t2));
    CHECK(normal_form(t).key() == normal_form(t2).key());
  }
}

TEST_CASE("printer keeps hand-built right-nested pars intact") {
  // the parser left-nests "A | B | C"; a Par in right position must keep its
  // parens or the round trip re-associates it
  auto atom = [](const char* c) { return t_out(Name::id(c), {}, t_stop()); };
  TermPtr rproc = t_par(atom("a"), t_par(atom("b"), atom("c")));
  TermPtr sys = t_at(Name::id("l"), rproc);
  CHECK(print_term(sys) == "l[[a!<> | (b!<> | c!<>)]]");
  CHECK(term_eq(sys, parse_system(print_term(sys))));

  TermPtr rsys = t_par(t_at(Name::id("l"), atom("a")),
                       t_par(t_at(Name::id("k"), atom("b")),
                             t_at(Name::id("h"), atom("c"))));
  CHECK(print_term(rsys) == "l[[a!<>]] | (k[[b!<>]] | h[[c!<>]])");
  CHECK(term_eq(rsys, parse_system(print_term(rsys))));

  // left-nested chains still print flat
  TermPtr lsys = t_pars({t_at(Name::id("l"), atom("a")),
                         t_at(Name::id("k"), atom("b")),
                         t_at(Name::id("h"), atom("c"))});
  CHECK(print_term(lsys) == "l[[a!<>]] | k[[b!<>]] | h[[c!<>]]");
  CHECK(term_eq(lsys, parse_system(print_term(lsys))));
}

TEST_CASE("parser enforces sorts and binder hygiene") {
  // trace entities only in plain located processes
  CHECK_THROWS_AS(parse_system("l[[ trace c<v>@1 ]]@(l,0)"), ParseError);
  // monitor prefixes never in plain processes
  CHECK_THROWS_AS(parse_system("l[[ c?*(x).stop ]]"), ParseError);
  CHECK_THROWS_AS(parse_system("l[[ sync k. stop ]]"), ParseError);
  CHECK_THROWS_AS(parse_system("l[[ ok ]]"), ParseError);
  CHECK_THROWS_AS(parse_system("l[[ go k ]]"), ParseError);
  // plain-process queries inside monitor blocks are fine, trace reads required
  CHECK_NOTHROW(parse_system("l[[ c?(x).ok ]]@(l,0)"));
  // binder lists are duplicate-free
  CHECK_THROWS_AS(parse_system("l[[c?(x,x).stop]]"), ParseError);
  CHECK_THROWS_AS(parse_system("l[[ getI(x,x).ok ]]@(l,0)"), ParseError);
  // structural noise
  CHECK_THROWS_AS(parse_system("l[[c!<v>]] |"), ParseError);
  CHECK_THROWS_AS(parse_system("l[[if a = b then stop]]"), ParseError);
  CHECK_THROWS_AS(parse_system("l[[c!<v>]] k[[d!<v>]]"), ParseError);
  CHECK_THROWS_AS(parse_system(""), ParseError);
}

TEST_CASE("substitution: pinpoint capture cases") {
  Name c = N("c"), d = N("d"), x = N("x"), y = N("y"), n = N("n"), v = N("v");

  SUBCASE("input binder renamed when it would capture") {
    TermPtr t = t_in(c, {x}, t_out(d, {y}, t_stop()));
    TermPtr s = substitute(t, NameMap{{y, x}});
    const Input* in = as<Input>(s);
    REQUIRE(in != nullptr);
    CHECK(in->binders[0] != x);                  // binder stepped aside
    CHECK(as<Output>(in->next)->values[0] == x); // incoming x stays free
    CHECK(db(s) == db_subst(db(t), NameMap{{y, x}}));
  }
  SUBCASE("restriction binder renamed when it would capture") {
    TermPtr t = t_new(n, t_out(c, {v}, t_stop()));
    TermPtr s = substitute(t, NameMap{{v, n}});
    CHECK(as<NewChan>(s)->channel != n);
    CHECK(db(s) == db_subst(db(t), NameMap{{v, n}}));
  }
  SUBCASE("shadowed substitution is dropped") {
    TermPtr t = t_in(c, {x}, t_out(d, {x}, t_stop()));
    TermPtr s = substitute(t, NameMap{{x, v}});
    CHECK(term_eq(s, t));
  }
  SUBCASE("getI binders rename independently") {
    TermPtr t = t_geti(x, y, t_out(c, {v}, t_ok()));
    TermPtr s = substitute(t, NameMap{{v, x}});
    const GetIdx* g = as<GetIdx>(s);
    REQUIRE(g != nullptr);
    CHECK(g->loc_var != x);
    CHECK(as<Output>(g->next)->values[0] == x);
    CHECK(db(s) == db_subst(db(t), NameMap{{v, x}}));
  }
  SUBCASE("block context locations are substituted") {
    TermPtr t = t_at(N("l"), t_block(t_ok(), MonCtx{N("l"), 3}));
    TermPtr s = substitute(t, NameMap{{N("l"), N("k")}});
    CHECK(as<Located>(s)->location == N("k"));
    CHECK(as<MonBlock>(as<Located>(s)->body)->ctx.loc == N("k"));
  }
}

TEST_CASE("substitution agrees with the nameless oracle on random terms") {
  Gen g(20260825);
  for (int iter = 0; iter < 500; ++iter) {
    CAPTURE(iter);
    TermPtr t = g.any(3);
    NameMap m;
    int nsub = 1 + g.r(2);
    for (int i = 0; i < nsub; ++i) m[g.name()] = g.name_or_idx();
    TermPtr s = substitute(t, m);
    REQUIRE(db(s) == db_subst(db(t), m));
  }
}

TEST_CASE("substitution composes with itself per the oracle") {
  // swap via simultaneous map, the classic trap for sequential rewriting
  Gen g(7);
  Name x = N("x"), y = N("y");
  for (int iter = 0; iter < 100; ++iter) {
    TermPtr t = g.mon(3);
    NameMap swap{{x, y}, {y, x}};
    TermPtr s = substitute(t, swap);
    CHECK(db(s) == db_subst(db(t), swap));
    // applying the swap twice is the identity, up to alpha
    CHECK(db(substitute(s, swap)) == db(t));
  }
}

TEST_CASE("free and all names") {
  TermPtr t = parse_system("l[[new n.(n!<v> | c?(x).x!<n>)]]");
  NameSet fn = free_names(t);
  CHECK(fn == NameSet{N("l"), N("v"), N("c")});
  NameSet an = all_names(t);
  CHECK(an == NameSet{N("l"), N("n"), N("v"), N("c"), N("x")});
  // index literals are not names
  TermPtr u = parse_system("l[[ setI(k,3). ok ]]@(l,1)");
  CHECK(free_names(u).count(Name::idx(3)) == 0);
}

TEST_CASE("normal form: pinpoint laws") {
  // parallel is commutative/associative, stop is the unit
  CHECK(rt_key("l[[c!<v>]] | (k[[d!<w>]] | stop)") ==
        rt_key("k[[d!<w>]] | l[[c!<v>]]"));
  // unused restrictions are dropped
  CHECK(rt_key("new z. ( l[[c!<v>]] )") == rt_key("l[[c!<v>]]"));
  // scope extends over components that do not mention the binder
  CHECK(rt_key("new n.( l[[n!<v>]] | k[[c!<w>]] )") ==
        rt_key("k[[c!<w>]] | new n.( l[[n!<v>]] )"));
  // alpha-equivalent systems coincide
  CHECK(rt_key("new n.( l[[n!<v>]] | k[[n?(x).x!<v>]] )") ==
        rt_key("new m.( l[[m!<v>]] | k[[m?(y).y!<v>]] )"));
  // located parallel splits into separate atoms
  CHECK(rt_key("l[[ c!<v> | d!<w> ]]") == rt_key("l[[d!<w>]] | l[[c!<v>]]"));
  // the empty system renders as stop
  CHECK(print_term(normalize(parse_system("stop | stop"))) == "stop");
  // distinct blocks at equal contexts are still distinct atoms
  CHECK(rt_key("l[[ok]]@(l,0) | l[[fail]]@(l,0)") !=
        rt_key("l[[ok]]@(l,0) | l[[ok]]@(l,0)"));
}

TEST_CASE("normal form is invariant under congruent reshuffling (randomized)") {
  Gen g(424242);
  for (int iter = 0; iter < 150; ++iter) {
    CAPTURE(iter);
    Name n = N("n");
    // a pool of atoms, some mentioning the restricted channel n
    std::vector<TermPtr> atoms;
    int k = 2 + g.r(4);
    for (int i = 0; i < k; ++i) {
      TermPtr body = g.r(2) ? t_out(g.r(3) ? g.name() : n, {g.name()}, t_stop())
                            : g.proc(2);
      atoms.push_back(t_at(g.name(), body));
    }
    auto build = [&](std::vector<TermPtr> order, bool left_nest,
                     bool hoist_new) {
      if (g.r(2)) order.push_back(t_stop());
      std::shuffle(order.begin(), order.end(), g.rng);
      TermPtr body;
      if (left_nest) {
        body = order[0];
        for (size_t i = 1; i < order.size(); ++i) body = t_par(body, order[i]);
      } else {
        body = order.back();
        for (size_t i = order.size() - 1; i-- > 0;) body = t_par(order[i], body);
      }
      TermPtr sys = hoist_new ? t_new(n, body) : t_new(N("zz"), t_new(n, body));
      return normal_form(sys).key();
    };
    std::string ka = build(atoms, true, true);
    std::string kb = build(atoms, false, false);  // extra unused binder zz
    CHECK(ka == kb);
  }
}

TEST_CASE("normal form key is alpha-invariant (randomized binder renaming)") {
  Gen g(99);
  for (int iter = 0; iter < 150; ++iter) {
    CAPTURE(iter);
    TermPtr t = t_new(N("n"), t_par(t_at(g.name(), g.proc(2)),
                                    t_at(g.name(), t_out(N("n"), {g.name()},
                                                         t_stop()))));
    // rename the bound n by rebuilding with a fresh binder
    const NewChan* nc = as<NewChan>(t);
    Name fresh = fresh_name("q", all_names(t));
    TermPtr renamed = t_new(fresh, substitute(nc->body, NameMap{{N("n"), fresh}}));
    CHECK(normal_form(t).key() == normal_form(renamed).key());
  }
}

TEST_CASE("contracts: parse, print, precedence, sums") {
  ContractPtr c = parse_contract("(c,v)@l . (d,w)@k* + (e)@h");
  CHECK(print_contract(c) == "(c,v)@l . (d,w)@k* + (e)@h");
  // star binds tighter than sequence, sequence tighter than choice
  const CChoice* top = std::get_if<CChoice>(&c->node);
  REQUIRE(top != nullptr);
  const CSeq* seq = std::get_if<CSeq>(&top->left->node);
  REQUIRE(seq != nullptr);
  CHECK(std::get_if<CStar>(&seq->right->node) != nullptr);

  // parentheses flip the grouping and survive printing
  ContractPtr d = parse_contract("((c,v)@l . (d,w)@k)*");
  CHECK(print_contract(d) == "((c,v)@l . (d,w)@k)*");
  ContractPtr rt = parse_contract(print_contract(d));
  CHECK(print_contract(rt) == print_contract(d));

  // sum-binders expand to left-nested choices in element order
  ContractPtr s = parse_contract("sum x in {a,b,c} (ch,x)@l");
  CHECK(print_contract(s) == "(ch,a)@l + (ch,b)@l + (ch,c)@l");
  // sum variable may appear anywhere in the event
  ContractPtr s2 = parse_contract("sum p in {l,k} (c,v)@p . (done,p)@h");
  CHECK(print_contract(s2) == "(c,v)@l . (done,l)@h + (c,v)@k . (done,k)@h");

  CHECK_THROWS_AS(parse_contract("sum x in {} (c,x)@l"), ParseError);
  CHECK_THROWS_AS(parse_contract("(c,v)@l ."), ParseError);
  CHECK_THROWS_AS(parse_contract("(c,v)"), ParseError);
}

TEST_CASE("value-free events and multi-value events round-trip") {
  ContractPtr c = parse_contract("(ping)@l . (move,a,b)@k");
  std::vector<CEvent> evs = contract_events(c);
  REQUIRE(evs.size() == 2);
  CHECK(evs[0].values.empty());
  CHECK(evs[1].values.size() == 2);
  CHECK(contract_names(c) ==
        NameSet{N("ping"), N("l"), N("move"), N("a"), N("b"), N("k")});
}
