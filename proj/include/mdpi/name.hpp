#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace mdpi {

/* A name is either an identifier (channel, location, value, variable -- the
 * calculus does not distinguish these roles syntactically) or a log index,
 * i.e. a nonnegative integer literal.  Indices can appear in argument
 * position and as the second component of a monitoring context. */
struct Name {
  enum class Kind { ident, index };

  Kind kind = Kind::ident;
  std::string text;       // valid when kind == ident
  std::int64_t num = 0;   // valid when kind == index

  static Name id(std::string s) {
    Name n;
    n.kind = Kind::ident;
    n.text = std::move(s);
    return n;
  }
  static Name idx(std::int64_t v) {
    Name n;
    n.kind = Kind::index;
    n.num = v;
    return n;
  }

  bool is_index() const { return kind == Kind::index; }

  friend bool operator==(const Name& a, const Name& b) {
    if (a.kind != b.kind) return false;
    return a.kind == Kind::ident ? a.text == b.text : a.num == b.num;
  }
  friend bool operator!=(const Name& a, const Name& b) { return !(a == b); }
  friend bool operator<(const Name& a, const Name& b) {
    if (a.kind != b.kind) return a.kind < b.kind;  // idents before indices
    return a.kind == Kind::ident ? a.text < b.text : a.num < b.num;
  }

  std::string str() const {
    return kind == Kind::ident ? text : std::to_string(num);
  }
};

using NameSet = std::set<Name>;
using NameVec = std::vector<Name>;

std::string join_names(const NameVec& ns, const char* sep = ",");

/* Smallest hint-derived identifier not in `used`: hint, hint_1, hint_2, ... */
Name fresh_name(const std::string& hint, const NameSet& used);

}  // namespace mdpi
