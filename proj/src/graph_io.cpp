#include "mdpi/graph_io.hpp"

#include <json.hpp>

namespace mdpi {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json clocks_json(const ClockMap& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [loc, n] : m) j[loc.str()] = n;
  return j;
}

ordered_json verdicts_json(const VerdictBag& v) {
  ordered_json j = ordered_json::array();
  for (const auto& [lv, count] : v) {
    j.push_back({{"location", lv.first.str()},
                 {"verdict", verdict_text(lv.second)},
                 {"count", count}});
  }
  return j;
}

ordered_json state_json(int id, const Config& c) {
  return {{"id", id},
          {"system", print_term(c.sys.to_term())},
          {"clocks", clocks_json(c.clocks)},
          {"verdicts", verdicts_json(c.verdicts)}};
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

template <class EdgeText>
std::string dot_graph(int n, int initial, const std::vector<bool>* expanded,
                      size_t nedges, EdgeText edge) {
  std::string out = "digraph lts {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int s = 0; s < n; ++s) {
    out += "  " + std::to_string(s);
    std::string attrs;
    if (s == initial) attrs += "shape=doublecircle";
    if (expanded && !(*expanded)[s]) {
      if (!attrs.empty()) attrs += ", ";
      attrs += "style=dashed";  // frontier state, not expanded
    }
    if (!attrs.empty()) out += " [" + attrs + "]";
    out += ";\n";
  }
  for (size_t i = 0; i < nedges; ++i) {
    auto [src, dst, label] = edge(i);
    out += "  " + std::to_string(src) + " -> " + std::to_string(dst) +
           " [label=\"" + dot_escape(label) + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace

std::string state_line(const Config& c) {
  std::string out = print_term(c.sys.to_term());
  out += "   clocks{";
  bool first = true;
  for (const auto& [loc, n] : c.clocks) {
    if (!first) out += ",";
    first = false;
    out += loc.str() + "=" + std::to_string(n);
  }
  out += "}";
  if (!c.verdicts.empty()) {
    out += " verdicts{";
    first = true;
    for (const auto& [lv, count] : c.verdicts) {
      if (!first) out += ",";
      first = false;
      out += lv.first.str() + ":" + verdict_text(lv.second);
      if (count > 1) out += "x" + std::to_string(count);
    }
    out += "}";
  }
  return out;
}

std::string lts_to_json(const LtsGraph& g) {
  ordered_json j;
  j["initial"] = g.initial;
  j["truncated"] = g.truncated;
  j["states"] = ordered_json::array();
  for (size_t i = 0; i < g.states.size(); ++i) {
    ordered_json s = state_json((int)i, g.states[i]);
    s["expanded"] = (bool)g.expanded[i];
    j["states"].push_back(std::move(s));
  }
  j["edges"] = ordered_json::array();
  for (const Edge& e : g.edges)
    j["edges"].push_back(
        {{"src", e.src}, {"action", action_text(e.act)}, {"dst", e.dst}});
  return j.dump(2) + "\n";
}

std::string lts_to_dot(const LtsGraph& g) {
  return dot_graph((int)g.states.size(), g.initial, &g.expanded,
                   g.edges.size(), [&](size_t i) {
                     const Edge& e = g.edges[i];
                     return std::tuple{e.src, e.dst, action_text(e.act)};
                   });
}

std::string lts_to_json(const FilteredLts& g) {
  ordered_json j;
  j["initial"] = g.initial;
  j["truncated"] = g.truncated;
  j["states"] = ordered_json::array();
  for (int i = 0; i < g.n; ++i) {
    if ((size_t)i < g.states.size())
      j["states"].push_back(state_json(i, g.states[i]));
    else
      j["states"].push_back({{"id", i}});
  }
  j["edges"] = ordered_json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"src", e.src},
                          {"action", abstract_action_text(g.label(e.label))},
                          {"dst", e.dst}});
  return j.dump(2) + "\n";
}

std::string lts_to_dot(const FilteredLts& g) {
  return dot_graph(g.n, g.initial, nullptr, g.edges.size(), [&](size_t i) {
    const auto& e = g.edges[i];
    return std::tuple{e.src, e.dst, abstract_action_text(g.label(e.label))};
  });
}

std::string bisim_to_json(const BisimResult& r) {
  ordered_json j;
  switch (r.verdict) {
    case BisimResult::Verdict::bisimilar:
      j["verdict"] = "bisimilar";
      break;
    case BisimResult::Verdict::distinguished:
      j["verdict"] = "distinguished";
      break;
    case BisimResult::Verdict::inconclusive:
      j["verdict"] = "inconclusive";
      break;
  }
  j["witness_pairs"] = ordered_json::array();
  for (const auto& [x, y] : r.witness) j["witness_pairs"].push_back({x, y});
  j["sequence"] = ordered_json::array();
  for (const AbstractAction& a : r.sequence)
    j["sequence"].push_back(abstract_action_text(a));
  j["sequence_on"] = r.sequence_on_a ? "a" : "b";
  j["note"] = r.note;
  return j.dump(2) + "\n";
}

}  // namespace mdpi
