#include "mdpi/parse.hpp"

#include <cctype>
#include <map>

namespace mdpi {
namespace {

enum class Tk { ident, nat, punct, eof };

struct Token {
  Tk kind = Tk::eof;
  std::string text;
  std::int64_t num = 0;
  int line = 1, col = 1;
};

const char* kKeywords[] = {"stop", "new",  "if",   "then", "else", "trace",
                           "sync", "getI", "setI", "go",   "ok",   "fail",
                           "sum",  "in"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto bump = [&](size_t n) {
    for (size_t j = 0; j < n; ++j) {
      if (src[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') bump(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_' || src[j] == '\''))
        ++j;
      t.kind = Tk::ident;
      t.text = src.substr(i, j - i);
      bump(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.kind = Tk::nat;
      t.text = src.substr(i, j - i);
      t.num = std::stoll(t.text);
      bump(j - i);
      out.push_back(t);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "[[" || two == "]]" || two == "?*") {
      t.kind = Tk::punct;
      t.text = two;
      bump(2);
      out.push_back(t);
      continue;
    }
    static const std::string singles = "!<>()|.,=@*+{}?[]";
    if (singles.find(c) != std::string::npos) {
      t.kind = Tk::punct;
      t.text = std::string(1, c);
      bump(1);
      out.push_back(t);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  Token end;
  end.kind = Tk::eof;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t p = pos + ahead;
    return p < toks.size() ? toks[p] : toks.back();
  }
  const Token& cur() const { return peek(); }
  void advance() {
    if (pos + 1 < toks.size()) ++pos;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }
  bool at_punct(const std::string& p) const {
    return cur().kind == Tk::punct && cur().text == p;
  }
  bool at_kw(const std::string& k) const {
    return cur().kind == Tk::ident && cur().text == k;
  }
  bool eat_punct(const std::string& p) {
    if (!at_punct(p)) return false;
    advance();
    return true;
  }
  void expect_punct(const std::string& p) {
    if (!eat_punct(p)) fail("expected '" + p + "'");
  }
  bool eat_kw(const std::string& k) {
    if (!at_kw(k)) return false;
    advance();
    return true;
  }
  void expect_kw(const std::string& k) {
    if (!eat_kw(k)) fail("expected '" + k + "'");
  }
  Name expect_ident(const char* what) {
    if (cur().kind != Tk::ident) fail(std::string("expected ") + what);
    if (is_keyword(cur().text))
      fail("keyword '" + cur().text + "' used as " + what);
    Name n = Name::id(cur().text);
    advance();
    return n;
  }
  std::int64_t expect_nat(const char* what) {
    if (cur().kind != Tk::nat) fail(std::string("expected ") + what);
    std::int64_t v = cur().num;
    advance();
    return v;
  }
  /* identifier or index literal */
  Name expect_name(const char* what) {
    if (cur().kind == Tk::nat) {
      Name n = Name::idx(cur().num);
      advance();
      return n;
    }
    return expect_ident(what);
  }

  NameVec name_list_until(const std::string& closer, const char* what) {
    NameVec out;
    if (at_punct(closer)) return out;
    out.push_back(expect_name(what));
    while (eat_punct(",")) out.push_back(expect_name(what));
    return out;
  }
  NameVec binder_list(const std::string& closer) {
    NameVec out;
    if (at_punct(closer)) return out;
    out.push_back(expect_ident("binder"));
    while (eat_punct(",")) out.push_back(expect_ident("binder"));
    for (size_t a = 0; a < out.size(); ++a)
      for (size_t b = a + 1; b < out.size(); ++b)
        if (out[a] == out[b])
          fail("duplicate binder '" + out[a].str() + "'");
    return out;
  }
  NameVec chan_list() {
    NameVec out;
    out.push_back(expect_ident("channel"));
    while (eat_punct(",")) out.push_back(expect_ident("channel"));
    for (size_t a = 0; a < out.size(); ++a)
      for (size_t b = a + 1; b < out.size(); ++b)
        if (out[a] == out[b]) fail("duplicate channel '" + out[a].str() + "'");
    return out;
  }

  /* ---- processes and monitors (parsed permissively, sort-checked after) */

  TermPtr opt_cont() {
    if (eat_punct(".")) return unary();
    return t_stop();
  }

  TermPtr unary() {
    if (eat_punct("!")) return t_rep(unary());
    return prefix();
  }

  TermPtr prefix() {
    if (eat_kw("stop")) return t_stop();
    if (eat_kw("ok")) return t_ok();
    if (eat_kw("fail")) return t_fail();
    if (eat_punct("(")) {
      TermPtr p = parproc();
      expect_punct(")");
      return p;
    }
    if (eat_kw("new")) {
      NameVec cs = chan_list();
      expect_punct(".");
      return t_news(cs, unary());
    }
    if (eat_kw("if")) {
      Name u = expect_name("name");
      expect_punct("=");
      Name v = expect_name("name");
      expect_kw("then");
      TermPtr tb = unary();
      expect_kw("else");
      TermPtr eb = unary();
      return t_cond(u, v, tb, eb);
    }
    if (eat_kw("trace")) {
      Name c = expect_ident("channel");
      expect_punct("<");
      NameVec vs = name_list_until(">", "value");
      expect_punct(">");
      expect_punct("@");
      std::int64_t n = expect_nat("timestamp");
      return t_trace(c, vs, n);
    }
    if (eat_kw("sync")) {
      Name l = expect_ident("location");
      return t_sync(l, opt_cont());
    }
    if (eat_kw("go")) {
      Name l = expect_ident("location");
      return t_go(l, opt_cont());
    }
    if (eat_kw("getI")) {
      expect_punct("(");
      Name x = expect_ident("variable");
      expect_punct(",");
      Name y = expect_ident("variable");
      expect_punct(")");
      if (x == y) fail("duplicate binder '" + x.str() + "'");
      return t_geti(x, y, opt_cont());
    }
    if (eat_kw("setI")) {
      expect_punct("(");
      Name l = expect_name("location");
      expect_punct(",");
      Name n = expect_name("index");
      expect_punct(")");
      return t_seti(l, n, opt_cont());
    }
    /* channel-prefixed forms */
    Name c = expect_ident("process");
    if (eat_punct("!")) {
      expect_punct("<");
      NameVec vs = name_list_until(">", "value");
      expect_punct(">");
      return t_out(c, vs, opt_cont());
    }
    if (eat_punct("?*")) {
      expect_punct("(");
      NameVec xs = binder_list(")");
      expect_punct(")");
      return t_query(c, xs, opt_cont());
    }
    if (eat_punct("?")) {
      expect_punct("(");
      NameVec xs = binder_list(")");
      expect_punct(")");
      return t_in(c, xs, opt_cont());
    }
    fail("expected '!', '?' or '?*' after channel '" + c.str() + "'");
  }

  TermPtr parproc() {
    TermPtr t = unary();
    while (eat_punct("|")) t = t_par(t, unary());
    return t;
  }

  /* ---- systems */

  TermPtr sysatom() {
    if (eat_kw("new")) {
      NameVec cs = chan_list();
      expect_punct(".");
      expect_punct("(");
      TermPtr body = system();
      expect_punct(")");
      return t_news(cs, body);
    }
    if (eat_punct("(")) {
      TermPtr s = system();
      expect_punct(")");
      return s;
    }
    if (eat_kw("stop")) return t_stop();  // the empty system
    int bline = cur().line, bcol = cur().col;
    Name loc = expect_ident("location");
    expect_punct("[[");
    TermPtr body = parproc();
    expect_punct("]]");
    if (eat_punct("@")) {
      expect_punct("(");
      Name cl = expect_ident("location");
      expect_punct(",");
      std::int64_t ci = expect_nat("index");
      expect_punct(")");
      validate(body, true, bline, bcol);
      return t_at(loc, t_block(body, MonCtx{cl, ci}));
    }
    validate(body, false, bline, bcol);
    return t_at(loc, body);
  }

  TermPtr system() {
    TermPtr t = sysatom();
    while (eat_punct("|")) t = t_par(t, sysatom());
    return t;
  }

  /* Sort check: monitor bodies may not contain trace entities; plain
   * processes may not use the monitor-only prefixes. */
  void validate(const TermPtr& t, bool monitor, int line, int col) {
    auto bad = [&](const char* what) {
      throw ParseError(std::string(what) + (monitor ? " not allowed in a monitor"
                                                    : " only allowed in a monitor"),
                       line, col);
    };
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Stop>) {
          } else if constexpr (std::is_same_v<T, Output>) {
            validate(x.next, monitor, line, col);
          } else if constexpr (std::is_same_v<T, Input>) {
            validate(x.next, monitor, line, col);
          } else if constexpr (std::is_same_v<T, Query>) {
            if (!monitor) bad("trace query");
            validate(x.next, monitor, line, col);
          } else if constexpr (std::is_same_v<T, NewChan>) {
            validate(x.body, monitor, line, col);
          } else if constexpr (std::is_same_v<T, Cond>) {
            validate(x.then_branch, monitor, line, col);
            validate(x.else_branch, monitor, line, col);
          } else if constexpr (std::is_same_v<T, Par>) {
            validate(x.left, monitor, line, col);
            validate(x.right, monitor, line, col);
          } else if constexpr (std::is_same_v<T, Repeat>) {
            validate(x.body, monitor, line, col);
          } else if constexpr (std::is_same_v<T, TraceEntity>) {
            if (monitor) bad("trace entity");
          } else if constexpr (std::is_same_v<T, SyncM>) {
            if (!monitor) bad("sync");
            validate(x.next, monitor, line, col);
          } else if constexpr (std::is_same_v<T, GetIdx>) {
            if (!monitor) bad("getI");
            validate(x.next, monitor, line, col);
          } else if constexpr (std::is_same_v<T, SetIdx>) {
            if (!monitor) bad("setI");
            validate(x.next, monitor, line, col);
          } else if constexpr (std::is_same_v<T, GoM>) {
            if (!monitor) bad("go");
            validate(x.next, monitor, line, col);
          } else if constexpr (std::is_same_v<T, OkM>) {
            if (!monitor) bad("ok");
          } else if constexpr (std::is_same_v<T, FailM>) {
            if (!monitor) bad("fail");
          } else {
            bad("nested system");
          }
        },
        t->node);
  }

  /* ---- contracts */

  /* After '(' the token stream is an event iff the matching ')' is followed
   * by '@'. */
  bool paren_is_event() const {
    int depth = 0;
    for (size_t a = 0;; ++a) {
      const Token& t = peek(a);
      if (t.kind == Tk::eof) return false;
      if (t.kind != Tk::punct) continue;
      if (t.text == "(") ++depth;
      if (t.text == ")") {
        --depth;
        if (depth == 0) {
          const Token& nxt = peek(a + 1);
          return nxt.kind == Tk::punct && nxt.text == "@";
        }
      }
    }
  }

  ContractPtr cprim() {
    if (at_punct("(")) {
      if (paren_is_event()) {
        expect_punct("(");
        Name chan = expect_ident("channel");
        NameVec vals;
        while (eat_punct(",")) vals.push_back(expect_name("value"));
        expect_punct(")");
        expect_punct("@");
        Name loc = expect_ident("location");
        return c_event(chan, vals, loc);
      }
      expect_punct("(");
      ContractPtr e = cexpr();
      expect_punct(")");
      return e;
    }
    if (eat_kw("sum")) {
      Name var = expect_ident("variable");
      expect_kw("in");
      expect_punct("{");
      NameVec set = name_list_until("}", "set element");
      expect_punct("}");
      if (set.empty()) fail("sum over empty set");
      ContractPtr body = cexpr();
      ContractPtr acc;
      for (const Name& v : set) {
        ContractPtr inst = subst_contract(body, var, v);
        acc = acc ? c_choice(acc, inst) : inst;
      }
      return acc;
    }
    fail("expected contract expression");
  }

  static ContractPtr subst_contract(const ContractPtr& c, const Name& var,
                                    const Name& val) {
    return std::visit(
        [&](const auto& x) -> ContractPtr {
          using T = std::decay_t<decltype(x)>;
          auto rn = [&](const Name& n) { return n == var ? val : n; };
          if constexpr (std::is_same_v<T, CEvent>) {
            NameVec vs;
            for (const Name& v : x.values) vs.push_back(rn(v));
            return c_event(rn(x.chan), vs, rn(x.loc));
          } else if constexpr (std::is_same_v<T, CSeq>) {
            return c_seq(subst_contract(x.left, var, val),
                         subst_contract(x.right, var, val));
          } else if constexpr (std::is_same_v<T, CStar>) {
            return c_star(subst_contract(x.body, var, val));
          } else {
            return c_choice(subst_contract(x.left, var, val),
                            subst_contract(x.right, var, val));
          }
        },
        c->node);
  }

  ContractPtr cpost() {
    ContractPtr e = cprim();
    while (eat_punct("*")) e = c_star(e);
    return e;
  }
  ContractPtr cseq() {
    ContractPtr e = cpost();
    while (eat_punct(".")) e = c_seq(e, cpost());
    return e;
  }
  ContractPtr cexpr() {
    ContractPtr e = cseq();
    while (eat_punct("+")) e = c_choice(e, cseq());
    return e;
  }
};

}  // namespace

TermPtr parse_system(const std::string& src) {
  Parser p{lex(src)};
  TermPtr t = p.system();
  if (p.cur().kind != Tk::eof) p.fail("unexpected trailing input");
  return t;
}

ContractPtr parse_contract(const std::string& src) {
  Parser p{lex(src)};
  ContractPtr c = p.cexpr();
  if (p.cur().kind != Tk::eof) p.fail("unexpected trailing input");
  return c;
}

}  // namespace mdpi
