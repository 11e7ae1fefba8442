#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "battle/actions.hpp"
#include "battle/agents.hpp"
#include "battle/rng.hpp"
#include "battle/world.hpp"

namespace battle {

struct WeaponStats {
  std::string name;
  double effective_range_m = 50.0;
  double attrition_coefficient = 0.03;  // fraction of engaged enemies disabled per tick
  bool armor_piercing = false;
};

/// Coefficients of the attrition model. Every field is scenario-configurable.
struct CasualtyConfig {
  std::vector<WeaponStats> weapons;
  std::map<TroopType, std::string> troop_weapons;
  double melee_radius_m = 50.0;
  double counter_ranged = 0.1;
  double counter_melee = 0.8;
  double forest_ranged_factor = 0.6;
  double fortified_factor = 0.5;
  double river_cavalry_factor = 0.5;
  double noise_amplitude = 0.1;  // jitter in [1 - a, 1 + a]
  double morale_decay = 0.05;
  double morale_loss_threshold = 0.05;  // fraction of remaining strength lost in one tick
  std::map<std::string, double> intensity_overrides;

  static CasualtyConfig defaults();

  const WeaponStats* find_weapon(std::string_view name) const;
  /// Weapon carried by a troop type; falls back to the first melee weapon.
  const WeaponStats* weapon_for(const TroopType& type) const;
  bool is_ranged(const WeaponStats& w) const { return w.effective_range_m > melee_radius_m; }
  double intensity(const ActionKind& kind) const;
};

struct TerrainTag {
  std::string id;
  FeatureKind kind = FeatureKind::other;
};

struct CombatantSnapshot {
  ArmyId id;
  std::vector<std::string> aliases;
  std::string side;
  ForceComposition composition;
  double morale_score = 0.5;
  Coordinate location;
  std::string command_structure;
  std::vector<TerrainTag> terrain;
  bool fortified = false;

  bool in_forest() const;
};

struct EngagementContext {
  int tick = 0;
  CombatantSnapshot attacker;
  CombatantSnapshot defender;
  const ActionKind* kind = nullptr;
  std::string description;
  double distance = 0.0;  // map units
  bool crosses_river = false;
};

struct EngagementOutcome {
  std::int64_t attacker_losses = 0;
  std::int64_t defender_losses = 0;
  std::string rationale;

  friend bool operator==(const EngagementOutcome&, const EngagementOutcome&) = default;
};

/// Closed-form attrition:
///   defender_losses = round(sum_t n_t * coef(w_t) * site_t * fortified * intensity * (0.5 + morale_att) * noise)
///   attacker_losses = round(defender_total * mean_coef * counter * intensity * (0.5 + morale_def) * noise')
/// where t ranges over attacker troop types taking part (per the action's
/// engagement mode) whose weapon reaches `distance`; site_t is the forest
/// factor for ranged groups firing into a forest and the river factor for
/// cavalry charging across one. mean_coef is the engaged-troop average of
/// coef(w_t). `rng == nullptr` pins the noise at 1.0. Losses are clamped to
/// the current totals.
/// Throws std::invalid_argument for non-offensive actions.
EngagementOutcome assess(const EngagementContext& ctx, const CasualtyConfig& config, Rng* rng);

}  // namespace battle
