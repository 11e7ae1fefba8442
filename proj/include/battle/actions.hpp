#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "battle/agents.hpp"
#include "battle/world.hpp"

namespace battle {

enum class ActionCategory { Reposition, Preparation, Attack, Defense, Observation, Retreat };

std::string_view to_string(ActionCategory category);

/// Which of the attacker's troops take part in an engagement.
enum class EngagementMode {
  none,      // not offensive
  ranged,    // troops with ranged weapons only
  cavalry,   // mounted troops only
  melee,     // dismounted troops with melee weapons
  combined,  // everyone, each weapon gated by its own range
};

struct ActionKind {
  std::string_view name;
  ActionCategory category;
  bool requires_recipient;
  bool offensive;
  double base_intensity;
  EngagementMode mode;
  /// True for the eight structure/communication operations that complete the
  /// catalog beyond the 43 named tactical actions.
  bool extension;
  bool moves;  // the order's location is a movement target
};

enum class CatalogScope { named, full };

/// 43 named actions (`named`) or those plus the 8 extensions (`full`, 51).
std::span<const ActionKind> catalog(CatalogScope scope = CatalogScope::full);

/// Exact, case- and spacing-sensitive lookup.
const ActionKind* find_action(std::string_view name);
/// Throws LookupError for unknown names.
const ActionKind& action(std::string_view name);

struct Order {
  ArmyId initiator;
  const ActionKind* kind = nullptr;
  Coordinate location;
  std::optional<ArmyId> recipient;
  std::string description;
};

using AgentTable = std::map<ArmyId, AgentState>;

/// Every violation, not just the first. An empty result means the order is valid.
std::vector<std::string> validate_order(const Order& order, const WorldMap& world, const AgentTable& agents);

}  // namespace battle
