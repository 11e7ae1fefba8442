#include "battle/evaluator.hpp"

#include <algorithm>
#include <sstream>

namespace battle {

using nlohmann::json;

EngagementOutcome ModelEvaluator::evaluate(const EngagementContext& ctx, Rng& rng, std::vector<std::string>&) {
  return assess(ctx, config_, &rng);
}

namespace {

json snapshot_json(const CombatantSnapshot& s, const CasualtyConfig& config) {
  json comp = json::object();
  json weapons = json::array();
  for (const auto& [type, n] : s.composition.counts()) {
    comp[type.name()] = n;
    if (const WeaponStats* w = config.weapon_for(type)) {
      weapons.push_back({{"troop_type", type.name()},
                         {"weapon", w->name},
                         {"effective_range_m", w->effective_range_m},
                         {"attrition_coefficient", w->attrition_coefficient},
                         {"armor_piercing", w->armor_piercing}});
    }
  }
  json terrain = json::array();
  for (const auto& t : s.terrain) terrain.push_back({{"id", t.id}, {"kind", to_string(t.kind)}});
  return {{"profile",
           {{"id", s.id.str()},
            {"aliases", s.aliases},
            {"side", s.side},
            {"command_structure", s.command_structure},
            {"morale_score", s.morale_score},
            {"composition", comp},
            {"total", s.composition.total()},
            {"fortified", s.fortified}}},
          {"position", {{"location", {s.location.x, s.location.y}}, {"terrain", terrain}}},
          {"weapons", weapons}};
}

// Every id under which a transcript could have recorded this combatant.
std::vector<std::string> keys_for(const CombatantSnapshot& s) {
  std::vector<std::string> keys{s.id.str()};
  keys.insert(keys.end(), s.aliases.begin(), s.aliases.end());
  return keys;
}

}  // namespace

json engagement_request(const EngagementContext& ctx, const CasualtyConfig& config) {
  json a = snapshot_json(ctx.attacker, config);
  json d = snapshot_json(ctx.defender, config);
  return {{"tick", ctx.tick},
          {"profiles", {{"attacker", a["profile"]}, {"defender", d["profile"]}}},
          {"action",
           {{"name", ctx.kind ? std::string(ctx.kind->name) : std::string()}, {"description", ctx.description}}},
          {"positions",
           {{"attacker", a["position"]},
            {"defender", d["position"]},
            {"distance_units", ctx.distance},
            {"distance_m", units_to_meters(ctx.distance)},
            {"crosses_river", ctx.crosses_river}}},
          {"weapons", {{"attacker", a["weapons"]}, {"defender", d["weapons"]}}}};
}

std::optional<EngagementOutcome> parse_engagement_response(const json& response) {
  if (!response.is_object()) return std::nullopt;
  auto count = [&](const char* key) -> std::optional<std::int64_t> {
    auto it = response.find(key);
    if (it == response.end() || !it->is_number_integer()) return std::nullopt;
    const auto v = it->get<std::int64_t>();
    if (v < 0) return std::nullopt;
    return v;
  };
  auto al = count("attacker_losses");
  auto dl = count("defender_losses");
  if (!al || !dl) return std::nullopt;
  EngagementOutcome out{*al, *dl, {}};
  if (auto it = response.find("rationale"); it != response.end() && it->is_string()) out.rationale = *it;
  return out;
}

EvaluatorTranscript EvaluatorTranscript::parse(std::string_view text) {
  EvaluatorTranscript t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = "casualty transcript line " + std::to_string(line_no);
    json entry = json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.is_object() || !entry.contains("request") || !entry.contains("response")) {
      t.warnings_.push_back(where + ": malformed entry skipped");
      continue;
    }
    const json& req = entry["request"];
    try {
      const int tick = req.at("tick").get<int>();
      // Accepts both the full request shape and a compact {attacker, defender} form.
      const json& who = req.contains("profiles") ? req.at("profiles") : req;
      const std::string att = who.at("attacker").at("id").get<std::string>();
      const std::string def = who.at("defender").at("id").get<std::string>();
      t.entries_[{tick, att, def}] = entry["response"];
    } catch (const json::exception&) {
      t.warnings_.push_back(where + ": request lacks tick/attacker.id/defender.id");
    }
    if (end == text.size()) break;
  }
  return t;
}

const json* EvaluatorTranscript::find(int tick, const std::string& attacker, const std::string& defender) const {
  auto it = entries_.find({tick, attacker, defender});
  return it == entries_.end() ? nullptr : &it->second;
}

ExternalEvaluator::ExternalEvaluator(CasualtyConfig config, EvaluatorTranscript transcript)
    : config_(std::move(config)), transcript_(std::move(transcript)) {}

ExternalEvaluator::ExternalEvaluator(CasualtyConfig config, EvaluatorTransport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::optional<json> ExternalEvaluator::lookup(const EngagementContext& ctx, std::vector<std::string>& warnings) const {
  if (transcript_) {
    for (const auto& a : keys_for(ctx.attacker)) {
      for (const auto& d : keys_for(ctx.defender)) {
        if (const json* r = transcript_->find(ctx.tick, a, d)) return *r;
      }
    }
    warnings.push_back("evaluator: no transcript entry for tick " + std::to_string(ctx.tick) + " " +
                       ctx.attacker.id.str() + " -> " + ctx.defender.id.str() + "; using the built-in model");
    return std::nullopt;
  }
  if (transport_) {
    try {
      json r = json::parse(transport_(engagement_request(ctx, config_).dump()), nullptr, false);
      if (!r.is_discarded()) return r;
    } catch (const std::exception& e) {
      warnings.push_back(std::string("evaluator: transport failed: ") + e.what() + "; using the built-in model");
      return std::nullopt;
    }
    warnings.push_back("evaluator: unparseable response; using the built-in model");
  }
  return std::nullopt;
}

EngagementOutcome ExternalEvaluator::evaluate(const EngagementContext& ctx, Rng& rng,
                                              std::vector<std::string>& warnings) {
  std::optional<json> raw = lookup(ctx, warnings);
  if (!raw) return assess(ctx, config_, &rng);
  std::optional<EngagementOutcome> out = parse_engagement_response(*raw);
  if (!out) {
    warnings.push_back("evaluator: malformed response for tick " + std::to_string(ctx.tick) + " " +
                       ctx.attacker.id.str() + " -> " + ctx.defender.id.str() + "; using the built-in model");
    return assess(ctx, config_, &rng);
  }
  auto clamp = [&](std::int64_t& v, std::int64_t cap, const char* who) {
    if (v > cap) {
      std::ostringstream w;
      w << "evaluator: " << who << " losses " << v << " exceed available " << cap << "; clamped";
      warnings.push_back(w.str());
      v = cap;
    }
  };
  clamp(out->attacker_losses, ctx.attacker.composition.total(), "attacker");
  clamp(out->defender_losses, ctx.defender.composition.total(), "defender");
  return *out;
}

}  // namespace battle
