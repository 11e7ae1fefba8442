#include <doctest.h>

#include <map>
#include <set>

#include "battle/actions.hpp"
#include "battle/errors.hpp"

using namespace battle;
using K = TroopType::Kind;

namespace {

// The six enumerated groups, transcribed from the source text.
const std::map<ActionCategory, std::vector<std::string>> kGroups = {
    {ActionCategory::Reposition, {"Reposition Forces", "Create Decoy Units"}},
    {ActionCategory::Preparation,
     {"Deploy Longbows", "Rally Troops", "Employ Artillery", "Use of Gunpowder Weapons", "Resupply Archers",
      "Destroy Enemy Morale", "Deploy Archers in Flanking Positions", "Organize Night Raids",
      "Organize Raiding Parties", "Digging trenches"}},
    {ActionCategory::Attack,
     {"Initiate Skirmish", "Charge Cavalry", "Ambush Enemy", "Launch Full Assault", "Archery Duel", "Siege Tactics",
      "Hand-to-Hand Combat", "Counterattack", "Conduct Reconnaissance", "Direct Artillery Fire",
      "Engage in Siege Warfare", "Execute Flanking Maneuvers", "Use Cavalry for Shock Tactics",
      "Employ Archers Strategically"}},
    {ActionCategory::Defense,
     {"Construct Defenses", "Prepare Defenses", "Develop Counter-Siege Measures", "Form Defensive Shields",
      "Establish Defensive Fortifications", "Fortify Rear Guards", "Fortify Position",
      "Create Obstacles for Enemy Cavalry", "Form Defensive Pike Formations", "Set Traps"}},
    {ActionCategory::Observation,
     {"Scout Enemy Position", "Gather Intelligence", "Intercept Enemy Supplies", "Establish Communication Lines"}},
    {ActionCategory::Retreat, {"Retreat and Regroup", "Tactical Retreat", "Plan Feigned Retreat"}},
};

AgentTable two_agents() {
  AgentTable t;
  for (auto [id, side] : {std::pair{"ARMY-00000001", "England"}, std::pair{"ARMY-00000002", "France"},
                          std::pair{"ARMY-00000003", "England"}}) {
    CommanderProfile p;
    p.identity = side;
    p.id = ArmyId(id);
    p.composition = ForceComposition{{K::spearman, 100}};
    t[p.id] = make_root_agent(p);
  }
  return t;
}

}  // namespace

TEST_CASE("catalog sizes: 43 named actions and 51 in total") {
  CHECK(catalog(CatalogScope::named).size() == 43);
  CHECK(catalog(CatalogScope::full).size() == 51);
  std::set<std::string_view> names;
  for (const auto& k : catalog()) CHECK(names.insert(k.name).second);
  std::size_t ext = 0;
  for (const auto& k : catalog()) ext += k.extension ? 1 : 0;
  CHECK(ext == 8);
}

TEST_CASE("named actions match the enumerated groups") {
  std::size_t total = 0;
  for (const auto& [cat, names] : kGroups) {
    for (const auto& n : names) {
      const ActionKind* k = find_action(n);
      REQUIRE_MESSAGE(k != nullptr, n);
      CHECK(k->category == cat);
      CHECK_FALSE(k->extension);
    }
    total += names.size();
  }
  CHECK(total == 43);
  CHECK(kGroups.at(ActionCategory::Attack).size() == 14);
}

TEST_CASE("base intensities") {
  CHECK(action("Launch Full Assault").base_intensity == 1.5);
  CHECK(action("Charge Cavalry").base_intensity == 1.3);
  CHECK(action("Ambush Enemy").base_intensity == 1.2);
  CHECK(action("Initiate Skirmish").base_intensity == 0.5);
  CHECK(action("Archery Duel").base_intensity == 0.7);
  CHECK(action("Counterattack").base_intensity == 1.0);
  for (const auto& k : catalog()) {
    if (!k.offensive) {
      CHECK(k.base_intensity == 0.0);
      CHECK(k.mode == EngagementMode::none);
    } else {
      CHECK(k.requires_recipient);
    }
  }
}

TEST_CASE("lookup is exact") {
  CHECK(find_action("fortify position") == nullptr);
  CHECK(find_action("Fortify  Position") == nullptr);
  CHECK_THROWS_AS(action("Teleport"), LookupError);
  CHECK(to_string(ActionCategory::Observation) == "Observation");
}

TEST_CASE("order validation reports every violation") {
  const AgentTable agents = two_agents();
  const WorldMap world({{-10, -10}, {10, 10}}, {}, "");
  const ArmyId en("ARMY-00000001"), fr("ARMY-00000002"), en2("ARMY-00000003");

  CHECK(validate_order({en, &action("Initiate Skirmish"), {0, 0}, fr, ""}, world, agents).empty());
  CHECK(validate_order({en, &action("Fortify Position"), {0, 0}, std::nullopt, ""}, world, agents).empty());

  CHECK(validate_order({en, &action("Charge Cavalry"), {0, 0}, std::nullopt, ""}, world, agents) ==
        std::vector<std::string>{"recipient required"});
  const auto friendly = validate_order({en, &action("Charge Cavalry"), {50, 0}, en2, ""}, world, agents);
  CHECK(friendly.size() == 2);

  const auto many = validate_order({ArmyId("ARMY-0000dead"), &action("Fortify Position"), {99, 99}, fr, ""}, world,
                                   agents);
  CHECK(many.size() == 3);
  CHECK(validate_order({en, nullptr, {0, 0}, std::nullopt, ""}, world, agents) ==
        std::vector<std::string>{"unknown action"});
  CHECK_FALSE(validate_order({en, &action("Counterattack"), {0, 0}, en, ""}, world, agents).empty());
}
