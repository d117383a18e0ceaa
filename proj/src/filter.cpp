#include "mdpi/filter.hpp"

#include <stdexcept>

#include <json.hpp>

#include "mdpi/semantics.hpp"

namespace mdpi {

std::string abstract_action_text(const AbstractAction& a) {
  switch (a.kind) {
    case ActKind::tau:
      return "tau";
    case ActKind::output: {
      std::string out;
      if (!a.extruded.empty()) out += "(nu " + join_names(a.extruded) + ")";
      out += a.subject.str() + "!<" + join_names(a.payload) + ">";
      if (a.locs)
        out += "@(" + (a.locs->first ? a.locs->first->str() : "*") + "," +
               (a.locs->second ? a.locs->second->str() : "*") + ")";
      return out;
    }
    case ActKind::input: {
      std::string out = a.subject.str() + "?<" + join_names(a.payload) + ">";
      if (a.locs)
        out += "@(" + (a.locs->first ? a.locs->first->str() : "*") + "," +
               (a.locs->second ? a.locs->second->str() : "*") + ")";
      return out;
    }
  }
  return "?";
}

namespace {

AbstractAction strip(const Action& a) {
  AbstractAction out;
  out.kind = a.kind;
  if (a.kind != ActKind::tau) {
    out.subject = a.subject;
    out.payload = a.payload;
    out.extruded = a.extruded;
  }
  return out;
}

AbstractAction with_locs(const Action& a) {
  AbstractAction out = strip(a);
  out.locs = std::make_pair(a.tag.from, a.tag.to);
  return out;
}

AbstractAction just_tau() { return AbstractAction{}; }

}  // namespace

Filter builtin_filter(const std::string& name) {
  Filter f;
  f.name = name;
  if (name == "ntg") {
    /* Total: every decoration removed. */
    f.fn = [](const Action& a) -> std::optional<AbstractAction> {
      if (a.kind == ActKind::tau) return just_tau();
      return strip(a);
    };
    return f;
  }
  if (name == "prc") {
    /* Process view: only process-tagged external actions survive, keeping
     * their location pair; all internal steps collapse to tau. */
    f.fn = [](const Action& a) -> std::optional<AbstractAction> {
      if (a.kind == ActKind::tau) return just_tau();
      if (a.tag.kind != TagKind::p) return std::nullopt;
      return with_locs(a);
    };
    return f;
  }
  if (name == "ltr") {
    /* Localised tracing: a tau that reads a log remotely (t-tag with two
     * distinct locations) is prohibited; other taus — including
     * monitor-tagged ones spanning locations — stay tau, and external
     * actions are stripped of tags. */
    f.fn = [](const Action& a) -> std::optional<AbstractAction> {
      if (a.kind == ActKind::tau) {
        if (a.tag.kind == TagKind::t) {
          if (a.tag.from && a.tag.to && *a.tag.from == *a.tag.to)
            return just_tau();
          return std::nullopt;
        }
        return just_tau();
      }
      return strip(a);
    };
    return f;
  }
  if (name == "ltr-local-m") {
    /* Variant of ltr that also localises monitor taus (go/communication
     * between distinct locations prohibited). */
    f.fn = [](const Action& a) -> std::optional<AbstractAction> {
      if (a.kind == ActKind::tau) {
        if (a.tag.kind == TagKind::p) return just_tau();
        if (a.tag.from && a.tag.to && *a.tag.from == *a.tag.to)
          return just_tau();
        return std::nullopt;
      }
      return strip(a);
    };
    return f;
  }
  throw std::invalid_argument("unknown builtin filter: " + name);
}

std::optional<AbstractAction> apply_filter(const Filter& f, const Action& a) {
  return f.fn(a);
}

/* ---- declarative filters ---------------------------------------------
 * {"rules":[{"match":{"kind":"tau|output|input|any",
 *                     "tag":"p|m|t|any",
 *                     "from":"<name>|*|any", "to":"<name>|*|any",
 *                     "same_loc":true|false},
 *            "emit":"drop|tau|strip|locpair"}]}
 * First matching rule decides; no match means drop. */

namespace {

struct Rule {
  int kind = -1;        // -1 any, else ActKind
  int tag = -1;         // -1 any, else TagKind
  bool has_from = false, from_star = false;
  Name from;
  bool has_to = false, to_star = false;
  Name to;
  std::optional<bool> same_loc;
  enum class Emit { drop, tau, strip, locpair } emit = Emit::drop;

  bool slot_matches(bool has, bool star, const Name& want,
                    const std::optional<Name>& got) const {
    if (!has) return true;
    if (star) return !got.has_value();
    return got.has_value() && *got == want;
  }

  bool matches(const Action& a) const {
    if (kind >= 0 && (int)a.kind != kind) return false;
    if (tag >= 0 && (int)a.tag.kind != tag) return false;
    if (!slot_matches(has_from, from_star, from, a.tag.from)) return false;
    if (!slot_matches(has_to, to_star, to, a.tag.to)) return false;
    if (same_loc.has_value()) {
      bool both = a.tag.from.has_value() && a.tag.to.has_value();
      bool same = both && *a.tag.from == *a.tag.to;
      if (*same_loc != same) return false;
    }
    return true;
  }
};

}  // namespace

Filter filter_from_json_text(const std::string& text, const std::string& name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("filter JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array())
    throw std::invalid_argument("filter JSON: expected {\"rules\": [...]}");

  std::vector<Rule> rules;
  for (const auto& jr : doc["rules"]) {
    Rule r;
    if (jr.contains("match")) {
      const auto& m = jr["match"];
      if (m.contains("kind")) {
        std::string k = m["kind"];
        if (k == "tau") r.kind = (int)ActKind::tau;
        else if (k == "output") r.kind = (int)ActKind::output;
        else if (k == "input") r.kind = (int)ActKind::input;
        else if (k != "any")
          throw std::invalid_argument("filter JSON: bad kind " + k);
      }
      if (m.contains("tag")) {
        std::string k = m["tag"];
        if (k == "p") r.tag = (int)TagKind::p;
        else if (k == "m") r.tag = (int)TagKind::m;
        else if (k == "t") r.tag = (int)TagKind::t;
        else if (k != "any")
          throw std::invalid_argument("filter JSON: bad tag " + k);
      }
      auto slot = [&](const char* key, bool& has, bool& star, Name& n) {
        if (!m.contains(key)) return;
        std::string v = m[key];
        if (v == "any") return;
        has = true;
        if (v == "*") star = true;
        else n = Name::id(v);
      };
      slot("from", r.has_from, r.from_star, r.from);
      slot("to", r.has_to, r.to_star, r.to);
      if (m.contains("same_loc")) r.same_loc = (bool)m["same_loc"];
    }
    std::string e = jr.value("emit", "drop");
    if (e == "drop") r.emit = Rule::Emit::drop;
    else if (e == "tau") r.emit = Rule::Emit::tau;
    else if (e == "strip") r.emit = Rule::Emit::strip;
    else if (e == "locpair") r.emit = Rule::Emit::locpair;
    else throw std::invalid_argument("filter JSON: bad emit " + e);

    /* Shape preservation: tau images only for taus, external images only
     * for externals. */
    if (r.emit == Rule::Emit::tau && r.kind != (int)ActKind::tau)
      throw std::invalid_argument(
          "filter JSON: emit \"tau\" requires match kind \"tau\"");
    if ((r.emit == Rule::Emit::strip || r.emit == Rule::Emit::locpair) &&
        (r.kind == -1 || r.kind == (int)ActKind::tau))
      throw std::invalid_argument(
          "filter JSON: emit \"" + e + "\" requires match kind output/input");
    rules.push_back(std::move(r));
  }

  Filter f;
  f.name = name;
  f.fn = [rules](const Action& a) -> std::optional<AbstractAction> {
    for (const Rule& r : rules) {
      if (!r.matches(a)) continue;
      switch (r.emit) {
        case Rule::Emit::drop:
          return std::nullopt;
        case Rule::Emit::tau:
          return just_tau();
        case Rule::Emit::strip:
          return strip(a);
        case Rule::Emit::locpair:
          return with_locs(a);
      }
    }
    return std::nullopt;
  };
  return f;
}

std::vector<std::pair<AbstractAction, Config>> filtered_transitions(
    const Config& c, const Filter& f, const StepOptions& opt) {
  std::vector<std::pair<AbstractAction, Config>> out;
  StepResult step = enabled_transitions(c, opt);
  for (Transition& t : step.transitions) {
    std::optional<AbstractAction> img = apply_filter(f, t.act);
    if (img) out.emplace_back(std::move(*img), std::move(t.target));
  }
  return out;
}

}  // namespace mdpi
