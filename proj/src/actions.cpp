#include "battle/actions.hpp"

#include <array>

#include "battle/errors.hpp"

namespace battle {

namespace {

using C = ActionCategory;
using M = EngagementMode;

constexpr ActionKind tactical(std::string_view name, C cat) {
  return {name, cat, false, false, 0.0, M::none, false, cat == C::Reposition || cat == C::Retreat};
}

constexpr ActionKind offensive(std::string_view name, C cat, double intensity, M mode) {
  return {name, cat, true, true, intensity, mode, false, false};
}

constexpr ActionKind extension(std::string_view name, C cat, bool moves) {
  return {name, cat, false, false, 0.0, M::none, true, moves};
}

// Named actions in their published order, then the extensions.
constexpr std::array<ActionKind, 51> kCatalog{{
    // Reposition (2)
    tactical("Reposition Forces", C::Reposition),
    tactical("Create Decoy Units", C::Reposition),
    // Preparation (10)
    offensive("Deploy Longbows", C::Preparation, 1.0, M::ranged),
    tactical("Rally Troops", C::Preparation),
    offensive("Employ Artillery", C::Preparation, 1.0, M::ranged),
    offensive("Use of Gunpowder Weapons", C::Preparation, 1.0, M::ranged),
    tactical("Resupply Archers", C::Preparation),
    offensive("Destroy Enemy Morale", C::Preparation, 1.0, M::combined),
    offensive("Deploy Archers in Flanking Positions", C::Preparation, 1.0, M::ranged),
    tactical("Organize Night Raids", C::Preparation),
    tactical("Organize Raiding Parties", C::Preparation),
    tactical("Digging trenches", C::Preparation),
    // Attack (14)
    offensive("Initiate Skirmish", C::Attack, 0.5, M::combined),
    offensive("Charge Cavalry", C::Attack, 1.3, M::cavalry),
    offensive("Ambush Enemy", C::Attack, 1.2, M::combined),
    offensive("Launch Full Assault", C::Attack, 1.5, M::combined),
    offensive("Archery Duel", C::Attack, 0.7, M::ranged),
    offensive("Siege Tactics", C::Attack, 1.0, M::combined),
    offensive("Hand-to-Hand Combat", C::Attack, 1.0, M::melee),
    offensive("Counterattack", C::Attack, 1.0, M::combined),
    offensive("Conduct Reconnaissance", C::Attack, 1.0, M::combined),
    offensive("Direct Artillery Fire", C::Attack, 1.0, M::ranged),
    offensive("Engage in Siege Warfare", C::Attack, 1.0, M::combined),
    offensive("Execute Flanking Maneuvers", C::Attack, 1.0, M::combined),
    offensive("Use Cavalry for Shock Tactics", C::Attack, 1.0, M::cavalry),
    offensive("Employ Archers Strategically", C::Attack, 1.0, M::ranged),
    // Defense (10)
    tactical("Construct Defenses", C::Defense),
    tactical("Prepare Defenses", C::Defense),
    tactical("Develop Counter-Siege Measures", C::Defense),
    tactical("Form Defensive Shields", C::Defense),
    tactical("Establish Defensive Fortifications", C::Defense),
    tactical("Fortify Rear Guards", C::Defense),
    tactical("Fortify Position", C::Defense),
    tactical("Create Obstacles for Enemy Cavalry", C::Defense),
    tactical("Form Defensive Pike Formations", C::Defense),
    tactical("Set Traps", C::Defense),
    // Observation (4)
    tactical("Scout Enemy Position", C::Observation),
    tactical("Gather Intelligence", C::Observation),
    offensive("Intercept Enemy Supplies", C::Observation, 1.0, M::combined),
    tactical("Establish Communication Lines", C::Observation),
    // Retreat (3)
    tactical("Retreat and Regroup", C::Retreat),
    tactical("Tactical Retreat", C::Retreat),
    tactical("Plan Feigned Retreat", C::Retreat),
    // Structure and communication extensions (8)
    extension("Fork", C::Preparation, false),
    extension("Merge", C::Preparation, false),
    extension("Prune", C::Retreat, false),
    extension("Move", C::Reposition, true),
    extension("Build Bridge", C::Preparation, false),
    extension("Send Intel", C::Observation, false),
    extension("Hide", C::Defense, false),
    extension("Surrender", C::Retreat, false),
}};

constexpr std::size_t kNamedCount = 43;

}  // namespace

std::string_view to_string(ActionCategory category) {
  switch (category) {
    case C::Reposition: return "Reposition";
    case C::Preparation: return "Preparation";
    case C::Attack: return "Attack";
    case C::Defense: return "Defense";
    case C::Observation: return "Observation";
    case C::Retreat: return "Retreat";
  }
  return "Reposition";
}

std::span<const ActionKind> catalog(CatalogScope scope) {
  return {kCatalog.data(), scope == CatalogScope::full ? kCatalog.size() : kNamedCount};
}

const ActionKind* find_action(std::string_view name) {
  for (const auto& k : kCatalog) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

const ActionKind& action(std::string_view name) {
  if (const ActionKind* k = find_action(name)) return *k;
  throw LookupError("unknown action: " + std::string(name));
}

std::vector<std::string> validate_order(const Order& order, const WorldMap& world, const AgentTable& agents) {
  std::vector<std::string> v;
  if (order.kind == nullptr) {
    v.emplace_back("unknown action");
    return v;
  }
  const AgentState* initiator = nullptr;
  if (auto it = agents.find(order.initiator); it == agents.end()) {
    v.push_back("initiator " + order.initiator.str() + " does not exist");
  } else if (!it->second.active()) {
    v.push_back("initiator " + order.initiator.str() + " is not active");
  } else {
    initiator = &it->second;
  }

  if (order.kind->requires_recipient && !order.recipient) {
    v.emplace_back("recipient required");
  } else if (!order.kind->requires_recipient && order.recipient) {
    v.push_back("recipient not allowed for " + std::string(order.kind->name));
  }
  if (order.recipient) {
    if (*order.recipient == order.initiator) v.emplace_back("initiator and recipient are the same agent");
    auto it = agents.find(*order.recipient);
    if (it == agents.end()) {
      v.push_back("recipient " + order.recipient->str() + " does not exist");
    } else {
      if (!it->second.active()) v.push_back("recipient " + order.recipient->str() + " is not active");
      if (order.kind->offensive && initiator && it->second.side() == initiator->side()) {
        v.push_back("recipient " + order.recipient->str() + " is friendly");
      }
    }
  }
  if (!world.bounds().contains(order.location)) v.emplace_back("location outside map bounds");
  return v;
}

}  // namespace battle
