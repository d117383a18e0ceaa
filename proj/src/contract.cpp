#include "mdpi/contract.hpp"

#include <map>

namespace mdpi {

ContractPtr c_event(Name chan, NameVec values, Name loc) {
  return std::make_shared<const ContractExpr>(
      CEvent{std::move(chan), std::move(values), std::move(loc)});
}
ContractPtr c_seq(ContractPtr l, ContractPtr r) {
  return std::make_shared<const ContractExpr>(CSeq{std::move(l), std::move(r)});
}
ContractPtr c_star(ContractPtr b) {
  return std::make_shared<const ContractExpr>(CStar{std::move(b)});
}
ContractPtr c_choice(ContractPtr l, ContractPtr r) {
  return std::make_shared<const ContractExpr>(
      CChoice{std::move(l), std::move(r)});
}

namespace {

/* Precedence: choice < seq < star. */
void print_rec(const ContractPtr& c, std::string& out, int prec) {
  if (auto* e = std::get_if<CEvent>(&c->node)) {
    out += "(" + e->chan.str();
    for (const Name& v : e->values) out += "," + v.str();
    out += ")@" + e->loc.str();
    return;
  }
  if (auto* s = std::get_if<CSeq>(&c->node)) {
    bool paren = prec > 1;
    if (paren) out += "(";
    print_rec(s->left, out, 1);
    out += " . ";
    print_rec(s->right, out, 2);  // seq is left-assoc
    if (paren) out += ")";
    return;
  }
  if (auto* st = std::get_if<CStar>(&c->node)) {
    print_rec(st->body, out, 3);
    out += "*";
    return;
  }
  const auto& ch = std::get<CChoice>(c->node);
  bool paren = prec > 0;
  if (paren) out += "(";
  print_rec(ch.left, out, 0);
  out += " + ";
  print_rec(ch.right, out, 1);
  if (paren) out += ")";
}

struct Matcher {
  const LocatedTrace& trace;
  /* match[node][i][j]: does E match trace[i..j)?  Memoised per node. */
  std::map<const ContractExpr*, std::vector<std::vector<signed char>>> memo;

  explicit Matcher(const LocatedTrace& t) : trace(t) {}

  bool match(const ContractExpr* c, size_t i, size_t j) {
    auto& tab = memo[c];
    size_t n = trace.size();
    if (tab.empty())
      tab.assign(n + 1, std::vector<signed char>(n + 1, -1));
    signed char& cell = tab[i][j];
    if (cell >= 0) return cell == 1;
    cell = 0;  // guards star self-reference on the same span
    bool r = compute(c, i, j);
    cell = r ? 1 : 0;
    return r;
  }

  bool compute(const ContractExpr* c, size_t i, size_t j) {
    if (auto* e = std::get_if<CEvent>(&c->node)) {
      if (j <= i) return false;
      const LocatedEvent& last = trace[j - 1];
      return last.chan == e->chan && last.values == e->values &&
             last.loc == e->loc;
    }
    if (auto* s = std::get_if<CSeq>(&c->node)) {
      for (size_t k = i; k <= j; ++k)
        if (match(s->left.get(), i, k) && match(s->right.get(), k, j))
          return true;
      return false;
    }
    if (auto* st = std::get_if<CStar>(&c->node)) {
      if (i == j) return true;
      /* Peel a nonempty head iteration so the recursion shrinks. */
      for (size_t k = i + 1; k <= j; ++k)
        if (match(st->body.get(), i, k) && match(c, k, j)) return true;
      return false;
    }
    const auto& ch = std::get<CChoice>(c->node);
    return match(ch.left.get(), i, j) || match(ch.right.get(), i, j);
  }
};

void events_rec(const ContractPtr& c, std::vector<CEvent>& out) {
  if (auto* e = std::get_if<CEvent>(&c->node)) {
    out.push_back(*e);
    return;
  }
  if (auto* s = std::get_if<CSeq>(&c->node)) {
    events_rec(s->left, out);
    events_rec(s->right, out);
    return;
  }
  if (auto* st = std::get_if<CStar>(&c->node)) {
    events_rec(st->body, out);
    return;
  }
  const auto& ch = std::get<CChoice>(c->node);
  events_rec(ch.left, out);
  events_rec(ch.right, out);
}

}  // namespace

std::string print_contract(const ContractPtr& c) {
  std::string out;
  print_rec(c, out, 0);
  return out;
}

bool oracle_match(const ContractPtr& c, const LocatedTrace& trace) {
  Matcher m(trace);
  return m.match(c.get(), 0, trace.size());
}

std::vector<CEvent> contract_events(const ContractPtr& c) {
  std::vector<CEvent> out;
  events_rec(c, out);
  return out;
}

NameSet contract_names(const ContractPtr& c) {
  NameSet out;
  for (const CEvent& e : contract_events(c)) {
    out.insert(e.chan);
    out.insert(e.loc);
    for (const Name& v : e.values) out.insert(v);
  }
  return out;
}

}  // namespace mdpi
