#include "mdpi/action.hpp"

namespace mdpi {

static std::string slot(const std::optional<Name>& n) {
  return n ? n->str() : "*";
}

std::string tag_text(const Tag& t) {
  const char* k = t.kind == TagKind::p ? "p" : t.kind == TagKind::m ? "m" : "t";
  std::string out = std::string("<") + k + ":" + slot(t.from) + "," + slot(t.to);
  if (t.kind == TagKind::t) out += ":" + std::to_string(t.stamp);
  return out + ">";
}

std::string action_text(const Action& a) {
  switch (a.kind) {
    case ActKind::tau:
      return "tau" + tag_text(a.tag);
    case ActKind::output: {
      std::string out;
      if (!a.extruded.empty()) out += "(nu " + join_names(a.extruded) + ")";
      out += a.subject.str() + "!<" + join_names(a.payload) + ">";
      return out + tag_text(a.tag);
    }
    case ActKind::input:
      return a.subject.str() + "?<" + join_names(a.payload) + ">" +
             tag_text(a.tag);
  }
  return "?";
}

bool action_less(const Action& a, const Action& b) {
  std::string sa = action_text(a), sb = action_text(b);
  if (sa != sb) return sa < sb;
  return false;
}

}  // namespace mdpi
