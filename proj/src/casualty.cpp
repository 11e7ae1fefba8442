#include "battle/casualty.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace battle {

CasualtyConfig CasualtyConfig::defaults() {
  using K = TroopType::Kind;
  CasualtyConfig c;
  c.weapons = {
      {"longbow", 300.0, 0.02, true},  {"crossbow", 250.0, 0.015, true}, {"bow", 200.0, 0.015, false},
      {"lance", 50.0, 0.03, true},     {"spear", 50.0, 0.03, false},     {"sword", 50.0, 0.03, false},
  };
  c.troop_weapons = {
      {K::longbowman, "longbow"}, {K::crossbowman, "crossbow"}, {K::archer, "bow"},
      {K::heavy_cavalry, "lance"}, {K::light_cavalry, "lance"}, {K::hobelar, "spear"},
      {K::spearman, "spear"},     {K::man_at_arms, "sword"},    {K::infantry, "sword"},
  };
  return c;
}

const WeaponStats* CasualtyConfig::find_weapon(std::string_view name) const {
  for (const auto& w : weapons) {
    if (w.name == name) return &w;
  }
  return nullptr;
}

const WeaponStats* CasualtyConfig::weapon_for(const TroopType& type) const {
  if (auto it = troop_weapons.find(type); it != troop_weapons.end()) {
    if (const WeaponStats* w = find_weapon(it->second)) return w;
  }
  for (const auto& w : weapons) {
    if (!is_ranged(w)) return &w;
  }
  return nullptr;
}

double CasualtyConfig::intensity(const ActionKind& kind) const {
  if (!kind.offensive) return 0.0;
  if (auto it = intensity_overrides.find(std::string(kind.name)); it != intensity_overrides.end()) return it->second;
  return kind.base_intensity;
}

bool CombatantSnapshot::in_forest() const {
  return std::any_of(terrain.begin(), terrain.end(), [](const TerrainTag& t) { return t.kind == FeatureKind::forest; });
}

EngagementOutcome assess(const EngagementContext& ctx, const CasualtyConfig& config, Rng* rng) {
  if (ctx.kind == nullptr || !ctx.kind->offensive) {
    throw std::invalid_argument("assess: action is not offensive");
  }
  const double distance_m = units_to_meters(ctx.distance);
  const EngagementMode mode = ctx.kind->mode;

  double raw = 0.0;
  double weighted = 0.0;  // raw with forest / river factors applied per troop group
  std::int64_t engaged = 0;
  bool any_melee = false;
  for (const auto& [type, n] : ctx.attacker.composition.counts()) {
    const WeaponStats* w = config.weapon_for(type);
    if (w == nullptr || n <= 0) continue;
    const bool ranged = config.is_ranged(*w);
    if (mode == EngagementMode::ranged && !ranged) continue;
    if (mode == EngagementMode::cavalry && !type.is_cavalry()) continue;
    if (mode == EngagementMode::melee && (ranged || type.is_cavalry())) continue;
    const double reach = ranged ? w->effective_range_m : config.melee_radius_m;
    if (distance_m > reach) continue;
    const double base = static_cast<double>(n) * w->attrition_coefficient;
    double site = 1.0;
    if (ranged && ctx.defender.in_forest()) site *= config.forest_ranged_factor;
    if (!ranged && type.is_cavalry() && ctx.crosses_river) site *= config.river_cavalry_factor;
    raw += base;
    weighted += base * site;
    engaged += n;
    any_melee = any_melee || !ranged;
  }

  const double intensity = config.intensity(*ctx.kind);
  EngagementOutcome out;
  if (engaged == 0 || raw == 0.0 || intensity == 0.0) {
    out.rationale = engaged == 0 ? "no attacking troops within weapon reach" : "no effective attack";
    return out;
  }

  const double fortified = ctx.defender.fortified ? config.fortified_factor : 1.0;
  const double terrain = fortified * weighted / raw;

  const double morale_att = 0.5 + ctx.attacker.morale_score;
  const double morale_def = 0.5 + ctx.defender.morale_score;
  double noise_def = 1.0;
  double noise_att = 1.0;
  if (rng != nullptr && config.noise_amplitude > 0.0) {
    noise_def = rng->uniform(1.0 - config.noise_amplitude, 1.0 + config.noise_amplitude);
    noise_att = rng->uniform(1.0 - config.noise_amplitude, 1.0 + config.noise_amplitude);
  }

  const double mean_coef = raw / static_cast<double>(engaged);
  const double counter = any_melee ? config.counter_melee : config.counter_ranged;
  const double def_total = static_cast<double>(ctx.defender.composition.total());

  const double dl = std::round(weighted * fortified * intensity * morale_att * noise_def);
  const double al = std::round(def_total * mean_coef * counter * intensity * morale_def * noise_att);
  out.defender_losses = std::clamp<std::int64_t>(static_cast<std::int64_t>(dl), 0, ctx.defender.composition.total());
  out.attacker_losses = std::clamp<std::int64_t>(static_cast<std::int64_t>(al), 0, ctx.attacker.composition.total());

  std::ostringstream why;
  why << engaged << " engaged at " << static_cast<long long>(std::llround(distance_m)) << " m, intensity "
      << intensity << ", terrain " << terrain;
  out.rationale = why.str();
  return out;
}

}  // namespace battle
