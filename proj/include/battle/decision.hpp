#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "battle/observation.hpp"
#include "battle/scenario.hpp"

namespace battle {

/// A fork request in the wire shape of recorded commander output:
/// subAgent_NextActionType, troopType, deployedNum, target_position,
/// target_agent_id, agent_id, remarks.
struct ForkDirective {
  std::string next_action;
  TroopType troop_type;
  std::int64_t deployed = 0;
  Coordinate target_position;
  std::optional<std::string> target_agent_id;
  std::optional<std::string> agent_id;  // proposed id for the new agent
  std::string remarks;

  friend bool operator==(const ForkDirective&, const ForkDirective&) = default;
};

struct PolicyDecision {
  std::vector<Order> orders;
  std::vector<ForkDirective> forks;
  std::optional<ArmyId> merge_with;
  bool retreat = false;
  std::vector<std::string> warnings;  // surfaced as run events
};

bool operator==(const Order& a, const Order& b);
bool operator==(const PolicyDecision& a, const PolicyDecision& b);

nlohmann::json to_json(const ForkDirective& f);
nlohmann::json to_json(const PolicyDecision& d);

class Policy {
 public:
  virtual ~Policy() = default;
  /// `history` is the agent's most recent trajectory entries, oldest first.
  virtual PolicyDecision decide(const Observation& obs, std::span<const TrajectoryEntry> history) const = 0;
  virtual std::string name() const = 0;
};

/// Holds position and does nothing.
class PassivePolicy final : public Policy {
 public:
  PolicyDecision decide(const Observation&, std::span<const TrajectoryEntry>) const override { return {}; }
  std::string name() const override { return "passive"; }
};

struct BaselineSettings {
  Posture posture = Posture::defensive;
  Edge home_edge = Edge::west;
  Bounds bounds;
  CasualtyConfig casualty;
  SpeedCaps speeds;
  double retreat_fraction = 0.2;
  double broken_morale = 0.2;
  std::int64_t fork_threshold = 5000;
  double fork_fraction = 0.2;
  double cluster_linkage = 100.0;
  double merge_radius = 50.0;

  static BaselineSettings for_side(const Scenario& scenario, std::size_t side_index);
};

/// Deterministic rules, first match wins:
///  1. strength below retreat_fraction of initial (or morale broken) with an
///     enemy in sight: retreat toward the home edge;
///  2. ranged troops and the nearest enemy within weapon range: ranged attack;
///  3. melee troops and the nearest enemy within melee reach: melee attack;
///     offensive sides fire and close in the same tick when both apply;
///  4. above fork_threshold with at least two enemy clusters in sight: fork
///     fork_fraction of the largest troop type toward the second cluster;
///  5. offensive sides advance on the nearest visible enemy;
///  6. no enemy in sight: advance on the last relayed enemy position, else
///     Fortify Position. Defensive sides fortify when the enemy is visible
///     but out of reach.
/// Ties break toward the smaller ArmyId.
class BaselinePolicy final : public Policy {
 public:
  explicit BaselinePolicy(BaselineSettings settings) : s_(std::move(settings)) {}
  PolicyDecision decide(const Observation& obs, std::span<const TrajectoryEntry> history) const override;
  std::string name() const override { return "baseline"; }

  /// Single-linkage groups of enemy positions (indices into `points`).
  static std::vector<std::vector<std::size_t>> clusters(std::span<const Coordinate> points, double linkage);

 private:
  BaselineSettings s_;
};

/// Recorded decisions keyed by (tick, agent id). An agent is matched by its id
/// or any alias the engine assigned when re-keying.
class ReplayPolicy final : public Policy {
 public:
  /// Line-delimited {tick, agent_id, decision}. Malformed lines and entries
  /// naming unknown actions are skipped; see load_warnings().
  static ReplayPolicy parse(std::string_view text);

  PolicyDecision decide(const Observation& obs, std::span<const TrajectoryEntry> history) const override;
  std::string name() const override { return "replay"; }

  const std::vector<std::string>& load_warnings() const { return load_warnings_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<int, std::string>, PolicyDecision> entries_;
  std::vector<std::string> load_warnings_;
};

/// Parses one recorded decision object. Throws LoadError on malformed input.
PolicyDecision parse_decision(const nlohmann::json& decision, const ArmyId& initiator);

struct AliasMap {
  std::vector<std::pair<std::string, std::string>> entries;  // original -> alias

  std::optional<std::string> alias_of(std::string_view original) const;
  std::optional<std::string> original_of(std::string_view alias) const;
  bool empty() const { return entries.empty(); }
};

/// Replaces configured sensitive strings inside the JSON string literals of a
/// document; numbers, geometry and layout are untouched. Countries become
/// Country_A.., leaders Leader_1.., dates Year_X.., locations Location_1...
/// Longer names are matched first. An alias already present in the document
/// is skipped in favor of the next index.
std::pair<std::string, AliasMap> anonymize(std::string_view document, const AnonymizationConfig& config);

/// Uses the document's own `anonymization` section.
std::pair<std::string, AliasMap> anonymize(std::string_view document);

/// Inverse of anonymize.
std::string de_anonymize(std::string_view document, const AliasMap& aliases);

}  // namespace battle
