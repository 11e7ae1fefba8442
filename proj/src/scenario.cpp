#include "battle/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "battle/errors.hpp"

namespace battle {

namespace detail {
extern const std::array<std::pair<std::string_view, std::string_view>, 4> kBuiltinScenarioDocuments;
}

using nlohmann::json;

std::string_view to_string(Posture posture) { return posture == Posture::offensive ? "offensive" : "defensive"; }

std::string_view to_string(Edge edge) {
  switch (edge) {
    case Edge::west: return "west";
    case Edge::east: return "east";
    case Edge::north: return "north";
    case Edge::south: return "south";
  }
  return "west";
}

Coordinate edge_point(const Bounds& b, Edge edge, Coordinate from) {
  switch (edge) {
    case Edge::west: return {b.min.x, from.y};
    case Edge::east: return {b.max.x, from.y};
    case Edge::north: return {from.x, b.max.y};
    case Edge::south: return {from.x, b.min.y};
  }
  return from;
}

double SpeedCaps::cap_m(const ForceComposition& composition) const {
  double cap = 0.0;
  bool any = false;
  for (const auto& [type, n] : composition.counts()) {
    if (n <= 0) continue;
    double v = infantry_m;
    if (type.kind() == TroopType::Kind::heavy_cavalry) {
      v = heavy_cavalry_m;
    } else if (type.is_cavalry()) {
      v = light_cavalry_m;
    }
    cap = any ? std::min(cap, v) : v;
    any = true;
  }
  return any ? cap : infantry_m;
}

const SideConfig& Scenario::side(std::string_view name) const {
  for (const auto& s : sides) {
    if (s.name == name) return s;
  }
  throw LookupError("scenario " + id + " has no side " + std::string(name));
}

const ReferenceRange* Scenario::reference_for(std::string_view side) const {
  for (const auto& r : reference) {
    if (r.side == side) return &r;
  }
  return nullptr;
}

namespace {

// Collects violations while building a Scenario; keeps going after errors so
// validation can report everything at once.
class Reader {
 public:
  std::vector<std::string> violations;

  void fail(const std::string& path, const std::string& msg) { violations.push_back(path + ": " + msg); }

  const json* object(const json& parent, const std::string& key, const std::string& path, bool required) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) fail(path + "." + key, "missing");
      return nullptr;
    }
    if (!it->is_object()) {
      fail(path + "." + key, "expected an object");
      return nullptr;
    }
    return &*it;
  }

  std::string text(const json& obj, const std::string& key, const std::string& path, bool required,
                   std::string fallback = {}) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "." + key, "missing");
      return fallback;
    }
    if (!it->is_string()) {
      fail(path + "." + key, "expected a string");
      return fallback;
    }
    return it->get<std::string>();
  }

  double number(const json& obj, const std::string& key, const std::string& path, double fallback,
                double lo = -HUGE_VAL, double hi = HUGE_VAL) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number() || !std::isfinite(it->get<double>())) {
      fail(path + "." + key, "expected a number");
      return fallback;
    }
    const double v = it->get<double>();
    if (v < lo || v > hi) {
      std::ostringstream m;
      m << "value " << v << " outside [" << lo << ", " << hi << "]";
      fail(path + "." + key, m.str());
      return fallback;
    }
    return v;
  }

  std::int64_t integer(const json& obj, const std::string& key, const std::string& path, std::int64_t fallback,
                       std::int64_t lo = INT64_MIN) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return fallback;
    }
    const auto v = it->get<std::int64_t>();
    if (v < lo) {
      fail(path + "." + key, "must be at least " + std::to_string(lo));
      return fallback;
    }
    return v;
  }

  std::optional<std::pair<std::int64_t, std::int64_t>> range(const json& obj, const std::string& key,
                                                             const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
      fail(path + "." + key, "expected [min, max] integers");
      return std::nullopt;
    }
    const auto lo = (*it)[0].get<std::int64_t>();
    const auto hi = (*it)[1].get<std::int64_t>();
    if (lo < 0 || lo > hi) {
      fail(path + "." + key, "expected 0 <= min <= max");
      return std::nullopt;
    }
    return std::make_pair(lo, hi);
  }

  std::optional<Coordinate> point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(path, "expected [x, y]");
      return std::nullopt;
    }
    return Coordinate{v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<std::string> strings(const json& obj, const std::string& key, const std::string& path) {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end()) return out;
    if (!it->is_array()) {
      fail(path + "." + key, "expected an array of strings");
      return out;
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) {
        fail(path + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        continue;
      }
      out.push_back((*it)[i].get<std::string>());
    }
    return out;
  }
};

void read_casualty(Reader& r, const json& doc, CasualtyConfig& c) {
  const json* cas = r.object(doc, "casualty", "$", false);
  if (cas == nullptr) return;
  const std::string base = "$.casualty";
  if (auto it = cas->find("weapons"); it != cas->end()) {
    if (!it->is_array()) {
      r.fail(base + ".weapons", "expected an array");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string p = base + ".weapons[" + std::to_string(i) + "]";
        const json& w = (*it)[i];
        if (!w.is_object()) {
          r.fail(p, "expected an object");
          continue;
        }
        WeaponStats ws;
        ws.name = r.text(w, "name", p, true);
        if (ws.name.empty()) continue;
        auto prior = std::find_if(c.weapons.begin(), c.weapons.end(),
                                  [&](const WeaponStats& x) { return x.name == ws.name; });
        if (prior != c.weapons.end()) ws = *prior;
        ws.effective_range_m = r.number(w, "effective_range_m", p, ws.effective_range_m, 1e-9);
        ws.attrition_coefficient = r.number(w, "attrition_coefficient", p, ws.attrition_coefficient, 0.0, 1.0);
        if (auto ap = w.find("armor_piercing"); ap != w.end()) {
          if (ap->is_boolean()) {
            ws.armor_piercing = *ap;
          } else {
            r.fail(p + ".armor_piercing", "expected a boolean");
          }
        }
        if (prior != c.weapons.end()) {
          *prior = ws;
        } else {
          c.weapons.push_back(ws);
        }
      }
    }
  }
  if (const json* tw = r.object(*cas, "troop_weapons", base, false)) {
    for (const auto& [k, v] : tw->items()) {
      const std::string p = base + ".troop_weapons." + k;
      auto type = TroopType::parse(k);
      if (!type) {
        r.fail(p, "unknown troop type");
      } else if (!v.is_string() || c.find_weapon(v.get<std::string>()) == nullptr) {
        r.fail(p, "undefined weapon");
      } else {
        c.troop_weapons[*type] = v.get<std::string>();
      }
    }
  }
  c.melee_radius_m = r.number(*cas, "melee_radius_m", base, c.melee_radius_m, 0.0);
  c.counter_ranged = r.number(*cas, "counter_ranged", base, c.counter_ranged, 0.0);
  c.counter_melee = r.number(*cas, "counter_melee", base, c.counter_melee, 0.0);
  c.forest_ranged_factor = r.number(*cas, "forest_ranged_factor", base, c.forest_ranged_factor, 0.0);
  c.fortified_factor = r.number(*cas, "fortified_factor", base, c.fortified_factor, 0.0);
  c.river_cavalry_factor = r.number(*cas, "river_cavalry_factor", base, c.river_cavalry_factor, 0.0);
  c.noise_amplitude = r.number(*cas, "noise_amplitude", base, c.noise_amplitude, 0.0, 1.0);
  c.morale_decay = r.number(*cas, "morale_decay", base, c.morale_decay, 0.0, 1.0);
  c.morale_loss_threshold = r.number(*cas, "morale_loss_threshold", base, c.morale_loss_threshold, 0.0, 1.0);
  if (const json* io = r.object(*cas, "intensity_overrides", base, false)) {
    for (const auto& [k, v] : io->items()) {
      const std::string p = base + ".intensity_overrides." + k;
      if (find_action(k) == nullptr) {
        r.fail(p, "unknown action");
      } else if (!v.is_number() || v.get<double>() < 0.0) {
        r.fail(p, "expected a non-negative number");
      } else {
        c.intensity_overrides[k] = v.get<double>();
      }
    }
  }
}

void read_engine(Reader& r, const json& doc, EngineConfig& e) {
  const json* eng = r.object(doc, "engine", "$", false);
  if (eng == nullptr) return;
  const std::string base = "$.engine";
  e.sight_range_m = r.number(*eng, "sight_range_m", base, e.sight_range_m, 1e-9);
  if (const json* sp = r.object(*eng, "speeds_m_per_tick", base, false)) {
    const std::string p = base + ".speeds_m_per_tick";
    e.speeds.infantry_m = r.number(*sp, "infantry", p, e.speeds.infantry_m, 0.0);
    e.speeds.light_cavalry_m = r.number(*sp, "light_cavalry", p, e.speeds.light_cavalry_m, 0.0);
    e.speeds.heavy_cavalry_m = r.number(*sp, "heavy_cavalry", p, e.speeds.heavy_cavalry_m, 0.0);
  }
  if (const json* cv = r.object(*eng, "convergence", base, false)) {
    e.convergence_window = static_cast<int>(r.integer(*cv, "window", base + ".convergence", e.convergence_window, 1));
    e.convergence_epsilon = r.integer(*cv, "epsilon", base + ".convergence", e.convergence_epsilon, 0);
  }
  e.max_ticks = static_cast<int>(r.integer(*eng, "max_ticks", base, e.max_ticks, 1));
  e.merge_radius = r.number(*eng, "merge_radius", base, e.merge_radius, 0.0);
  e.fork_threshold = r.integer(*eng, "fork_threshold", base, e.fork_threshold, 0);
  e.fork_fraction = r.number(*eng, "fork_fraction", base, e.fork_fraction, 0.0, 1.0);
  e.cluster_linkage = r.number(*eng, "cluster_linkage", base, e.cluster_linkage, 0.0);
  e.retreat_fraction = r.number(*eng, "retreat_fraction", base, e.retreat_fraction, 0.0, 1.0);
  e.broken_morale = r.number(*eng, "broken_morale", base, e.broken_morale, 0.0, 1.0);
  e.trajectory_window = static_cast<int>(r.integer(*eng, "trajectory_window", base, e.trajectory_window, 0));
  e.wound_severity = r.number(*eng, "wound_severity", base, e.wound_severity, 0.0);
}

void read_profile(Reader& r, const json& pj, const std::string& p, const std::string& side_name,
                  const CasualtyConfig& cas, CommanderProfile& prof) {
  prof.identity = r.text(pj, "identity", p, false, side_name);
  if (prof.identity != side_name) r.fail(p + ".identity", "must equal the side name");
  const std::string id = r.text(pj, "id", p, true);
  if (!id.empty()) {
    if (auto parsed = ArmyId::parse(id)) {
      prof.id = *parsed;
    } else {
      r.fail(p + ".id", "not of the form ARMY-xxxxxxxx");
    }
  }
  prof.command_structure = r.text(pj, "command_structure", p, false);
  prof.morale_discipline = r.text(pj, "morale_discipline", p, false);
  prof.morale_score = r.number(pj, "morale_score", p, 0.5, 0.0, 1.0);
  prof.strategy = r.text(pj, "strategy", p, false);
  prof.capability = r.strings(pj, "capability", p);
  for (std::size_t i = 0; i < prof.capability.size(); ++i) {
    if (cas.find_weapon(prof.capability[i]) == nullptr) {
      r.fail(p + ".capability[" + std::to_string(i) + "]", "undefined weapon '" + prof.capability[i] + "'");
    }
  }
  prof.armament = r.text(pj, "armament", p, false);
  prof.mission = r.text(pj, "mission", p, false);
  if (auto it = pj.find("location"); it != pj.end()) {
    if (auto c = r.point(*it, p + ".location")) prof.location = *c;
  } else {
    r.fail(p + ".location", "missing");
  }
  if (const json* comp = r.object(pj, "composition", p, true)) {
    for (const auto& [k, v] : comp->items()) {
      const std::string cp = p + ".composition." + k;
      auto type = TroopType::parse(k);
      if (!type) {
        r.fail(cp, "unknown troop type");
      } else if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        r.fail(cp, "expected a non-negative integer");
      } else if (v.get<std::int64_t>() > 0) {
        prof.composition.add(*type, v.get<std::int64_t>());
      }
    }
    if (prof.composition.total() == 0) r.fail(p + ".composition", "side total is 0");
  }
}

SoldierProfile read_soldier(Reader& r, const json& sj, const std::string& p) {
  SoldierProfile s;
  s.id = r.text(sj, "id", p, true);
  s.side = r.text(sj, "side", p, true);
  s.name = r.text(sj, "name", p, true);
  s.age = r.text(sj, "age", p, false);
  s.familial_ties = r.text(sj, "familial_ties", p, false);
  s.occupation = r.text(sj, "occupation", p, false);
  s.personality = r.text(sj, "personality", p, false);
  s.social_standing = r.text(sj, "social_standing", p, false);
  s.health_conditions = r.text(sj, "health_conditions", p, false);
  s.fitness = r.text(sj, "fitness", p, false);
  s.hobbies = r.text(sj, "hobbies", p, false);
  s.conversational_style = r.text(sj, "conversational_style", p, false);
  s.idiosyncrasies = r.text(sj, "idiosyncrasies", p, false);
  s.secrets = r.text(sj, "secrets", p, false);
  return s;
}

Scenario read(const json& doc, Reader& r) {
  Scenario sc;
  sc.casualty = CasualtyConfig::defaults();
  if (!doc.is_object()) {
    r.fail("$", "expected an object");
    return sc;
  }
  sc.schema_version = static_cast<int>(r.integer(doc, "schema_version", "$", 0));
  if (sc.schema_version != 1) r.fail("$.schema_version", "unsupported schema version (expected 1)");
  sc.id = r.text(doc, "id", "$", true);
  sc.name = r.text(doc, "name", "$", false, sc.id);
  sc.source = r.text(doc, "source", "$", false);

  if (const json* m = r.object(doc, "map", "$", true)) {
    try {
      sc.map = load_map(*m);
    } catch (const LoadError& e) {
      r.fail("$.map" + (e.where().empty() ? std::string() : "." + e.where()), e.what());
    }
  }
  read_casualty(r, doc, sc.casualty);
  read_engine(r, doc, sc.engine);

  auto sides = doc.find("sides");
  if (sides == doc.end() || !sides->is_array() || sides->size() != 2) {
    r.fail("$.sides", "expected exactly two sides");
  } else {
    for (std::size_t i = 0; i < 2; ++i) {
      const std::string p = "$.sides[" + std::to_string(i) + "]";
      const json& sj = (*sides)[i];
      if (!sj.is_object()) {
        r.fail(p, "expected an object");
        continue;
      }
      SideConfig& side = sc.sides[i];
      side.name = r.text(sj, "name", p, true);
      const std::string posture = r.text(sj, "posture", p, false, "defensive");
      if (posture == "offensive") {
        side.posture = Posture::offensive;
      } else if (posture != "defensive") {
        r.fail(p + ".posture", "expected offensive or defensive");
      }
      const std::string edge = r.text(sj, "home_edge", p, false, "west");
      bool edge_ok = false;
      for (Edge e : {Edge::west, Edge::east, Edge::north, Edge::south}) {
        if (edge == to_string(e)) {
          side.home_edge = e;
          edge_ok = true;
        }
      }
      if (!edge_ok) r.fail(p + ".home_edge", "expected west, east, north or south");
      if (const json* pj = r.object(sj, "profile", p, true)) {
        read_profile(r, *pj, p + ".profile", side.name, sc.casualty, side.profile);
      }
      if (auto rg = r.range(sj, "size_range", p)) {
        side.size_min = rg->first;
        side.size_max = rg->second;
        const auto total = side.profile.composition.total();
        if (total > 0 && (total < side.size_min || total > side.size_max)) {
          r.fail(p + ".profile.composition", "total " + std::to_string(total) + " outside size_range");
        }
      }
      if (!r.violations.empty()) continue;
      if (!sc.map.bounds().contains(side.profile.location)) r.fail(p + ".profile.location", "outside map bounds");
    }
    if (!sc.sides[0].name.empty() && sc.sides[0].name == sc.sides[1].name) r.fail("$.sides", "side names must differ");
    if (!sc.sides[0].profile.id.empty() && sc.sides[0].profile.id == sc.sides[1].profile.id) {
      r.fail("$.sides", "root ids must differ");
    }
  }

  if (auto it = doc.find("soldiers"); it != doc.end()) {
    if (!it->is_array()) {
      r.fail("$.soldiers", "expected an array");
    } else {
      std::set<std::string> ids;
      for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string p = "$.soldiers[" + std::to_string(i) + "]";
        if (!(*it)[i].is_object()) {
          r.fail(p, "expected an object");
          continue;
        }
        SoldierProfile s = read_soldier(r, (*it)[i], p);
        if (!ids.insert(s.id).second) r.fail(p + ".id", "duplicate soldier id " + s.id);
        if (s.side != sc.sides[0].name && s.side != sc.sides[1].name) r.fail(p + ".side", "unknown side " + s.side);
        sc.soldiers.push_back(std::move(s));
      }
    }
  }

  if (auto it = doc.find("reference"); it != doc.end()) {
    if (!it->is_array()) {
      r.fail("$.reference", "expected an array");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string p = "$.reference[" + std::to_string(i) + "]";
        const json& rj = (*it)[i];
        if (!rj.is_object()) {
          r.fail(p, "expected an object");
          continue;
        }
        ReferenceRange ref;
        ref.side = r.text(rj, "side", p, true);
        if (ref.side != sc.sides[0].name && ref.side != sc.sides[1].name) r.fail(p + ".side", "unknown side");
        if (auto rg = r.range(rj, "initial_range", p)) std::tie(ref.initial_min, ref.initial_max) = *rg;
        if (auto rg = r.range(rj, "casualty_range", p)) std::tie(ref.casualty_min, ref.casualty_max) = *rg;
        sc.reference.push_back(ref);
      }
    }
  }

  if (const json* an = r.object(doc, "anonymization", "$", false)) {
    sc.anonymization.countries = r.strings(*an, "countries", "$.anonymization");
    sc.anonymization.leaders = r.strings(*an, "leaders", "$.anonymization");
    sc.anonymization.dates = r.strings(*an, "dates", "$.anonymization");
    sc.anonymization.locations = r.strings(*an, "locations", "$.anonymization");
  }
  return sc;
}

}  // namespace

std::vector<std::string> validate_scenario(const json& document) {
  Reader r;
  read(document, r);
  return r.violations;
}

Scenario load_scenario(const json& document) {
  Reader r;
  Scenario sc = read(document, r);
  if (!r.violations.empty()) {
    const std::string& first = r.violations.front();
    const auto colon = first.find(": ");
    throw LoadError(first.substr(0, colon), colon == std::string::npos ? first : first.substr(colon + 2));
  }
  return sc;
}

std::vector<std::string> builtin_scenario_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, text] : detail::kBuiltinScenarioDocuments) ids.emplace_back(id);
  return ids;
}

std::string_view builtin_scenario_text(std::string_view id) {
  for (const auto& [key, text] : detail::kBuiltinScenarioDocuments) {
    if (key == id) return text;
  }
  std::string available;
  for (const auto& key : builtin_scenario_ids()) available += (available.empty() ? "" : ", ") + key;
  throw LookupError("unknown scenario '" + std::string(id) + "' (available: " + available + ")");
}

Scenario builtin_scenario(std::string_view id) { return load_scenario(json::parse(builtin_scenario_text(id))); }

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const auto& id : builtin_scenario_ids()) out.push_back(builtin_scenario(id));
  return out;
}

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string resolve_scenario_text(std::string_view id_or_path) {
  const std::string key(id_or_path);
  if (const char* env = std::getenv("BATTLE_SCENARIO_PATH"); env != nullptr) {
    std::stringstream dirs(env);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) continue;
      if (auto text = read_file(dir + "/" + key + ".json")) return *text;
    }
  }
  for (const auto& [id, text] : detail::kBuiltinScenarioDocuments) {
    if (id == key) return std::string(text);
  }
  if (auto text = read_file(key)) return *text;
  builtin_scenario_text(key);  // throws with the list of ids
  return {};
}

}  // namespace battle
