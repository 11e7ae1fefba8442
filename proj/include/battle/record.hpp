#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "battle/agents.hpp"
#include "battle/observation.hpp"
#include "battle/soldiers.hpp"

namespace battle {

struct AgentFrame {
  ArmyId id;
  std::string side;
  AgentStatus status = AgentStatus::active;
  Coordinate location;
  ForceComposition composition;
  std::int64_t initial_total = 0;
  std::int64_t cumulative_losses = 0;
  std::int64_t received_via_merge = 0;
  std::int64_t forked_out = 0;
  double morale_score = 0.5;
  bool fortified = false;
  std::optional<ArmyId> parent;
  int created_tick = 0;
  std::vector<std::string> aliases;
  std::string mission;

  std::int64_t total() const { return composition.total(); }
  friend bool operator==(const AgentFrame&, const AgentFrame&) = default;
};

/// State after `tick` ticks have run; frame 0 is the initial deployment.
struct Frame {
  int tick = 0;
  std::vector<AgentFrame> agents;  // every agent ever created, by id

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct EngagementRecord {
  int tick = 0;
  ArmyId attacker;
  ArmyId defender;
  std::string action;
  std::string description;
  double distance = 0.0;  // map units
  std::int64_t attacker_losses = 0;
  std::int64_t defender_losses = 0;
  std::string rationale;

  friend bool operator==(const EngagementRecord&, const EngagementRecord&) = default;
};

/// kind: violation, warning, alias, fork, merge, prune.
struct EventRecord {
  int tick = 0;
  std::string kind;
  std::string agent;
  std::string message;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

enum class Termination { running, annihilation, converged, max_ticks };

std::string_view to_string(Termination t);
std::optional<Termination> parse_termination(std::string_view text);

struct SoldierSummary {
  std::string id;
  std::string side;
  std::string name;
  WoundState wound = WoundState::unharmed;
  std::optional<int> death_tick;
  std::string assigned_agent;

  friend bool operator==(const SoldierSummary&, const SoldierSummary&) = default;
};

struct RunRecord {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::vector<std::string> policies;  // per side
  std::vector<std::string> sides;
  std::map<std::string, std::int64_t> initial;
  std::vector<Frame> frames;
  std::vector<TrajectoryEntry> trajectory;
  std::vector<EngagementRecord> engagements;
  std::vector<EventRecord> events;
  std::vector<ExperienceEpisode> episodes;
  std::vector<SoldierSummary> soldiers;
  /// Cumulative losses per side, one value per frame.
  std::map<std::string, std::vector<std::int64_t>> casualties;
  Termination termination = Termination::running;
  int ticks = 0;

  std::int64_t final_casualties(const std::string& side) const;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Line-delimited serialization: a header, one line per frame, trajectory
/// entry, engagement, event, episode and soldier, then a summary line. Keys
/// are sorted, so equal records serialize to identical bytes.
std::string serialize(const RunRecord& record);

/// Throws LoadError naming the offending line.
RunRecord parse_record(std::string_view text);

nlohmann::json to_json(const TrajectoryEntry& e);
nlohmann::json to_json(const ExperienceEpisode& e);

}  // namespace battle
