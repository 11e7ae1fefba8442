#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "battle/agents.hpp"
#include "battle/casualty.hpp"
#include "battle/world.hpp"

namespace battle {

enum class Posture { offensive, defensive };

std::string_view to_string(Posture posture);

/// Map edge a side withdraws toward.
enum class Edge { west, east, north, south };

std::string_view to_string(Edge edge);
Coordinate edge_point(const Bounds& bounds, Edge edge, Coordinate from);

struct SideConfig {
  std::string name;
  Posture posture = Posture::defensive;
  Edge home_edge = Edge::west;
  CommanderProfile profile;
  std::int64_t size_min = 0;  // historical range of the initial army
  std::int64_t size_max = 0;
};

struct SpeedCaps {
  double infantry_m = 1250.0;  // per 15-minute tick; also archers
  double light_cavalry_m = 3000.0;
  double heavy_cavalry_m = 3750.0;

  /// Slowest troop type present, in meters per tick.
  double cap_m(const ForceComposition& composition) const;
};

struct EngineConfig {
  double sight_range_m = 10000.0;
  SpeedCaps speeds;
  int convergence_window = 8;
  std::int64_t convergence_epsilon = 0;
  int max_ticks = 96;
  double merge_radius = 50.0;  // map units
  std::int64_t fork_threshold = 5000;
  double fork_fraction = 0.2;
  double cluster_linkage = 100.0;  // map units
  double retreat_fraction = 0.2;
  double broken_morale = 0.2;
  int trajectory_window = 20;
  double wound_severity = 1.0;
};

struct ReferenceRange {
  std::string side;
  std::int64_t initial_min = 0;
  std::int64_t initial_max = 0;
  std::int64_t casualty_min = 0;
  std::int64_t casualty_max = 0;
};

struct AnonymizationConfig {
  std::vector<std::string> countries;
  std::vector<std::string> leaders;
  std::vector<std::string> dates;
  std::vector<std::string> locations;

  bool empty() const { return countries.empty() && leaders.empty() && dates.empty() && locations.empty(); }
};

struct Scenario {
  int schema_version = 1;
  std::string id;
  std::string name;
  std::string source;
  WorldMap map;
  std::array<SideConfig, 2> sides;
  std::vector<SoldierProfile> soldiers;
  EngineConfig engine;
  CasualtyConfig casualty;
  std::vector<ReferenceRange> reference;
  AnonymizationConfig anonymization;

  const SideConfig& side(std::string_view name) const;
  const ReferenceRange* reference_for(std::string_view side) const;
};

/// Schema and cross-reference checks. Each violation is prefixed with its JSON
/// path. An empty result means the document loads.
std::vector<std::string> validate_scenario(const nlohmann::json& document);

/// Throws LoadError carrying the first violation's path.
Scenario load_scenario(const nlohmann::json& document);

std::vector<std::string> builtin_scenario_ids();
/// Raw document text. Throws LookupError listing the available ids.
std::string_view builtin_scenario_text(std::string_view id);
Scenario builtin_scenario(std::string_view id);
std::vector<Scenario> builtin_scenarios();

/// A builtin id, a readable file, or a file found under one of the
/// colon-separated directories in BATTLE_SCENARIO_PATH (as `<dir>/<id>.json`).
/// Returns the document text; throws LookupError when nothing matches.
std::string resolve_scenario_text(std::string_view id_or_path);

}  // namespace battle
