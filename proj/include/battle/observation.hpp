#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "battle/actions.hpp"
#include "battle/agents.hpp"
#include "battle/world.hpp"

namespace battle {

inline constexpr int kMinutesPerTick = 15;

struct VisibleAgent {
  ArmyId id;
  bool friendly = false;
  std::string side;
  std::string current_action;
  double distance = 0.0;  // map units
  double bearing = 0.0;   // degrees
  Coordinate location;
  ForceComposition composition;
};

struct VisibleFeature {
  std::string id;
  FeatureKind kind = FeatureKind::other;
  double distance = 0.0;  // to the nearest point of the feature
  std::string description;
};

/// A child's sightings from the previous tick.
struct IntelReport {
  ArmyId source;
  int tick = 0;
  std::vector<VisibleAgent> agents;
};

struct SelfSnapshot {
  ArmyId id;
  std::vector<std::string> aliases;
  std::string side;
  std::string mission;
  Coordinate location;
  ForceComposition composition;
  std::int64_t initial_total = 0;
  std::int64_t cumulative_losses = 0;
  double morale_score = 0.5;
  bool fortified = false;
  std::optional<ArmyId> parent;
  std::vector<ArmyId> children;  // active ones
  std::vector<std::string> terrain;
};

struct Observation {
  int tick = 0;
  SelfSnapshot self;
  std::vector<VisibleFeature> features;
  std::vector<VisibleAgent> agents;  // sorted by distance, then id
  std::vector<IntelReport> relayed_intel;

  /// Whether `id` appears among direct sightings or relayed intel.
  bool knows(const ArmyId& id) const;
};

/// Builds the observation of `self` from the shared snapshot. `current_actions`
/// maps agent ids to the action each is known to be performing;
/// `previous` holds last tick's observations (the relay source).
Observation observe(const WorldMap& world, const AgentTable& agents, const ArmyId& self, double sight_range_m,
                    int tick, const std::map<ArmyId, std::string>& current_actions,
                    const std::map<ArmyId, Observation>& previous);

struct OrderRecord {
  std::string action;
  std::string category;
  Coordinate location;
  std::optional<ArmyId> recipient;
  std::string description;

  friend bool operator==(const OrderRecord&, const OrderRecord&) = default;
};

struct MovementRecord {
  Coordinate from;
  Coordinate to;
  Coordinate target;
  double distance = 0.0;
  bool clamped = false;  // target was outside the map
  bool blocked = false;  // stopped at an impassable feature

  friend bool operator==(const MovementRecord&, const MovementRecord&) = default;
};

/// One agent's record for one tick. `original` is the strength at the start of
/// the tick (or at creation for agents forked during it).
struct TrajectoryEntry {
  int tick = 0;
  ArmyId agent;
  std::string side;
  std::vector<OrderRecord> orders;
  std::vector<std::string> structure;  // fork / merge / prune events
  std::optional<MovementRecord> movement;
  Coordinate location;  // end of tick
  std::int64_t original = 0;
  std::int64_t losses = 0;
  std::int64_t remaining = 0;
  std::string action_description;

  friend bool operator==(const TrajectoryEntry&, const TrajectoryEntry&) = default;
};

}  // namespace battle
