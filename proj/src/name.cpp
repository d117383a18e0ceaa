#include "mdpi/name.hpp"

namespace mdpi {

std::string join_names(const NameVec& ns, const char* sep) {
  std::string out;
  for (size_t i = 0; i < ns.size(); ++i) {
    if (i) out += sep;
    out += ns[i].str();
  }
  return out;
}

Name fresh_name(const std::string& hint, const NameSet& used) {
  Name cand = Name::id(hint);
  if (!used.count(cand)) return cand;
  for (std::int64_t i = 1;; ++i) {
    cand = Name::id(hint + "_" + std::to_string(i));
    if (!used.count(cand)) return cand;
  }
}

}  // namespace mdpi
