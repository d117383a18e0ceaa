#include "mdpi/verify.hpp"

#include <algorithm>

namespace mdpi {

std::map<Name, LocatedTrace> located_logs(const Config& c) {
  std::map<Name, LocatedTrace> logs;
  for (const auto& atom : c.sys.atoms) {
    const TraceEntity* te = as<TraceEntity>(atom.body);
    if (!te) continue;
    logs[atom.location].push_back(
        LocatedEvent{atom.location, te->subject, te->values, te->stamp});
  }
  for (auto& [loc, log] : logs)
    std::sort(log.begin(), log.end(),
              [](const LocatedEvent& a, const LocatedEvent& b) {
                return a.stamp < b.stamp;
              });
  return logs;
}

namespace {

bool search(const ContractPtr& e, const std::vector<const LocatedTrace*>& logs,
            std::vector<size_t>& pos, LocatedTrace& prefix) {
  if (oracle_match(e, prefix)) return true;  // the empty prefix counts too
  for (size_t i = 0; i < logs.size(); ++i) {
    if (pos[i] >= logs[i]->size()) continue;
    prefix.push_back((*logs[i])[pos[i]]);
    ++pos[i];
    bool hit = search(e, logs, pos, prefix);
    --pos[i];
    prefix.pop_back();
    if (hit) return true;
  }
  return false;
}

}  // namespace

bool some_prefix_matches(const ContractPtr& e,
                         const std::map<Name, LocatedTrace>& logs) {
  std::vector<const LocatedTrace*> ls;
  for (const auto& [loc, log] : logs)
    if (!log.empty()) ls.push_back(&log);
  std::vector<size_t> pos(ls.size(), 0);
  LocatedTrace prefix;
  return search(e, ls, pos, prefix);
}

}  // namespace mdpi
