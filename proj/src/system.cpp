#include "multiscale/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "multiscale/graph.hpp"

namespace multiscale {

using nlohmann::json;

bool RandomSubstitutionSystem::is_random() const {
  for (const auto& r : rules)
    if (r.size() > 1) return true;
  return false;
}

int RandomSubstitutionSystem::type_index(const std::string& n) const {
  for (int i = 0; i < type_count(); ++i)
    if (prototile_names[i] == n) return i;
  return -1;
}

const char* to_string(Commensurability c) {
  switch (c) {
    case Commensurability::likely_incommensurable: return "likely_incommensurable";
    case Commensurability::commensurable: return "commensurable";
    default: return "unknown";
  }
}

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("parse_system: " + where + ": " + what);
}

double require_number(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field) || !j[field].is_number())
    parse_fail(where, std::string("missing or non-numeric field '") + field + "'");
  return j[field].get<double>();
}

}  // namespace

RandomSubstitutionSystem parse_system(const std::string& config_text, double tolerance) {
  json root;
  try {
    root = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("parse_system: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) parse_fail("top level", "expected a JSON object");

  RandomSubstitutionSystem sys;
  sys.name = root.value("name", std::string("unnamed"));

  if (!root.contains("dimension") || !root["dimension"].is_number_integer())
    parse_fail("top level", "missing or non-integer 'dimension'");
  sys.dimension = root["dimension"].get<int>();
  if (sys.dimension < 1) parse_fail("top level", "'dimension' must be >= 1");

  if (!root.contains("prototiles") || !root["prototiles"].is_array() ||
      root["prototiles"].empty())
    parse_fail("top level", "missing or empty 'prototiles' array");
  for (const auto& p : root["prototiles"]) {
    if (!p.is_string()) parse_fail("prototiles", "entries must be strings");
    std::string name = p.get<std::string>();
    if (sys.type_index(name) >= 0) parse_fail("prototiles", "duplicate name '" + name + "'");
    sys.prototile_names.push_back(name);
  }

  if (!root.contains("rules") || !root["rules"].is_object())
    parse_fail("top level", "missing 'rules' object");
  const json& rules = root["rules"];
  for (const auto& [key, _] : rules.items())
    if (sys.type_index(key) < 0)
      parse_fail("rules", "'" + key + "' is not a declared prototile");

  sys.rules.resize(sys.prototile_names.size());
  for (int i = 0; i < sys.type_count(); ++i) {
    const std::string& pname = sys.prototile_names[i];
    if (!rules.contains(pname))
      parse_fail("rules", "no rule list for prototile '" + pname + "'");
    const json& rlist = rules[pname];
    if (!rlist.is_array() || rlist.empty())
      parse_fail("prototile '" + pname + "'", "rule list must be a nonempty array");

    double prob_sum = 0.0;
    for (std::size_t k = 0; k < rlist.size(); ++k) {
      std::ostringstream loc;
      loc << "rule " << k << " of prototile '" << pname << "'";
      const json& jr = rlist[k];
      if (!jr.is_object()) parse_fail(loc.str(), "expected an object");

      RuleSpec rule;
      if (jr.contains("probability")) {
        rule.probability = require_number(jr, "probability", loc.str());
      } else if (rlist.size() > 1) {
        parse_fail(loc.str(), "'probability' required when a prototile has several rules");
      }
      if (!(rule.probability > 0.0 && rule.probability <= 1.0))
        parse_fail(loc.str(), "probability must lie in (0,1]");
      prob_sum += rule.probability;

      if (!jr.contains("tiles") || !jr["tiles"].is_array() || jr["tiles"].empty())
        parse_fail(loc.str(), "missing or empty 'tiles' array");

      double vol_sum = 0.0;
      for (std::size_t t = 0; t < jr["tiles"].size(); ++t) {
        std::ostringstream tloc;
        tloc << loc.str() << ", tile " << t;
        const json& jt = jr["tiles"][t];
        if (!jt.is_object()) parse_fail(tloc.str(), "expected an object");
        if (!jt.contains("type") || !jt["type"].is_string())
          parse_fail(tloc.str(), "missing 'type'");
        SubstitutionTileSpec spec;
        std::string tname = jt["type"].get<std::string>();
        spec.type = sys.type_index(tname);
        if (spec.type < 0) parse_fail(tloc.str(), "unknown prototile '" + tname + "'");

        const bool has_vol = jt.contains("volume");
        const bool has_scale = jt.contains("scale");
        if (!has_vol && !has_scale)
          parse_fail(tloc.str(), "needs 'volume' or 'scale'");
        if (has_scale) {
          double s = require_number(jt, "scale", tloc.str());
          if (!(s > 0.0 && s < 1.0)) parse_fail(tloc.str(), "scale must lie in (0,1)");
          spec.scale = s;
          spec.volume = std::pow(s, sys.dimension);
        }
        if (has_vol) {
          double v = require_number(jt, "volume", tloc.str());
          if (has_scale && std::abs(v - spec.volume) > 1e-12) {
            std::ostringstream msg;
            msg << "volume " << v << " disagrees with scale^dimension = " << spec.volume;
            parse_fail(tloc.str(), msg.str());
          }
          spec.volume = v;
        }
        if (!(spec.volume > 0.0 && spec.volume < 1.0))
          parse_fail(tloc.str(), "volume must lie strictly inside (0,1)");
        vol_sum += spec.volume;
        rule.tiles.push_back(spec);
      }
      if (std::abs(vol_sum - 1.0) > tolerance) {
        std::ostringstream msg;
        msg << "tile volumes sum to " << vol_sum << ", expected 1";
        parse_fail(loc.str(), msg.str());
      }
      sys.rules[i].push_back(rule);
    }
    if (std::abs(prob_sum - 1.0) > tolerance) {
      std::ostringstream msg;
      msg << "rule probabilities sum to " << prob_sum << ", expected 1";
      parse_fail("prototile '" + pname + "'", msg.str());
    }
  }
  return sys;
}

std::string serialize_system(const RandomSubstitutionSystem& sys) {
  json root;
  root["name"] = sys.name;
  root["dimension"] = sys.dimension;
  root["prototiles"] = sys.prototile_names;
  json rules = json::object();
  for (int i = 0; i < sys.type_count(); ++i) {
    json rlist = json::array();
    for (const auto& rule : sys.rules[i]) {
      json jr;
      if (sys.rules[i].size() > 1) jr["probability"] = rule.probability;
      json tiles = json::array();
      for (const auto& t : rule.tiles) {
        json jt;
        jt["type"] = sys.prototile_names[t.type];
        if (t.scale)
          jt["scale"] = *t.scale;
        else
          jt["volume"] = t.volume;
        tiles.push_back(jt);
      }
      jr["tiles"] = tiles;
      rlist.push_back(jr);
    }
    rules[sys.prototile_names[i]] = rlist;
  }
  root["rules"] = rules;
  return root.dump(2);
}

ValidationReport validate(const RandomSubstitutionSystem& sys, double tolerance) {
  ValidationReport rep;
  rep.normalized = true;
  for (int i = 0; i < sys.type_count(); ++i) {
    if (sys.rules[i].empty()) {
      rep.normalized = false;
      rep.messages.push_back("prototile '" + sys.prototile_names[i] + "' has no rules");
      continue;
    }
    double prob_sum = 0.0;
    for (std::size_t k = 0; k < sys.rules[i].size(); ++k) {
      const auto& rule = sys.rules[i][k];
      prob_sum += rule.probability;
      double vol_sum = 0.0;
      for (const auto& t : rule.tiles) vol_sum += t.volume;
      if (std::abs(vol_sum - 1.0) > tolerance) {
        rep.normalized = false;
        std::ostringstream msg;
        msg << "rule " << k << " of prototile '" << sys.prototile_names[i]
            << "': tile volumes sum to " << vol_sum << ", expected 1";
        rep.messages.push_back(msg.str());
      }
    }
    if (std::abs(prob_sum - 1.0) > tolerance) {
      rep.normalized = false;
      std::ostringstream msg;
      msg << "prototile '" << sys.prototile_names[i] << "': rule probabilities sum to "
          << prob_sum << ", expected 1";
      rep.messages.push_back(msg.str());
    }
  }

  MetricGraph g = build_graph(sys, Weighting::probability);
  rep.irreducible = strongly_connected(g);
  if (!rep.irreducible)
    rep.messages.push_back("type graph is not strongly connected");

  rep.incommensurability = check_incommensurable(g);
  rep.messages.push_back(std::string("cycle lengths classified as ") +
                         to_string(rep.incommensurability));
  return rep;
}

}  // namespace multiscale
