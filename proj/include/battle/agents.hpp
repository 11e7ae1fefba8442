#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "battle/rng.hpp"
#include "battle/world.hpp"

namespace battle {

/// "ARMY-" followed by 8 lowercase hex digits.
class ArmyId {
 public:
  ArmyId() = default;
  /// Throws std::invalid_argument if `text` does not match the pattern.
  explicit ArmyId(std::string text);

  static bool is_valid(std::string_view text);
  static std::optional<ArmyId> parse(std::string_view text);

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  friend auto operator<=>(const ArmyId&, const ArmyId&) = default;

 private:
  std::string value_;
};

/// Issues unique ids from the run's id stream. Root ids taken from scenario
/// profiles are reserved so generated ids never collide with them.
class IdIssuer {
 public:
  explicit IdIssuer(Rng rng) : rng_(std::move(rng)) {}

  ArmyId issue();
  /// Returns false if the id was already taken.
  bool reserve(const ArmyId& id);
  bool issued(const ArmyId& id) const { return issued_.contains(id); }
  std::size_t count() const { return issued_.size(); }

 private:
  Rng rng_;
  std::set<ArmyId> issued_;
};

class TroopType {
 public:
  enum class Kind {
    longbowman,
    man_at_arms,
    light_cavalry,
    heavy_cavalry,
    spearman,
    hobelar,
    crossbowman,
    infantry,
    archer,
    other,
  };

  TroopType() = default;
  TroopType(Kind kind) : kind_(kind) {}  // NOLINT(google-explicit-constructor)
  static TroopType other(std::string label) {
    TroopType t(Kind::other);
    t.label_ = std::move(label);
    return t;
  }

  /// Accepts canonical names ("man_at_arms"), prose forms ("Men-at-Arms",
  /// "Light Cavalry", "longbowmen") and "other:<label>". Unknown names yield
  /// std::nullopt.
  static std::optional<TroopType> parse(std::string_view text);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  std::string name() const;
  bool is_cavalry() const;

  friend auto operator<=>(const TroopType&, const TroopType&) = default;

 private:
  Kind kind_ = Kind::infantry;
  std::string label_;
};

class ForceComposition {
 public:
  ForceComposition() = default;
  ForceComposition(std::initializer_list<std::pair<const TroopType, std::int64_t>> counts);

  std::int64_t total() const;
  std::int64_t count(const TroopType& type) const;
  const std::map<TroopType, std::int64_t>& counts() const { return counts_; }
  bool empty() const { return total() == 0; }

  /// Throws std::invalid_argument on negative counts.
  void add(const TroopType& type, std::int64_t n);
  /// Throws std::invalid_argument if more than available is removed.
  void remove(const TroopType& type, std::int64_t n);

  /// Removes `losses` troops spread across types in proportion to their counts
  /// (largest-remainder rounding, ties to the earlier type). Clamped to total.
  /// Returns the per-type removal.
  ForceComposition apply_losses(std::int64_t losses);

  ForceComposition& operator+=(const ForceComposition& other);

  friend bool operator==(const ForceComposition&, const ForceComposition&) = default;

 private:
  void prune_zeros();
  std::map<TroopType, std::int64_t> counts_;
};

struct CommanderProfile {
  std::string identity;  // side name, possibly an alias
  ArmyId id;
  std::string command_structure;
  std::string morale_discipline;
  double morale_score = 0.5;
  std::string strategy;
  std::vector<std::string> capability;  // weapon names
  ForceComposition composition;
  std::string armament;
  Coordinate location;
  std::string mission;
};

enum class AgentStatus { active, retreated, destroyed, merged, pruned };

std::string_view to_string(AgentStatus status);
std::optional<AgentStatus> parse_agent_status(std::string_view text);
/// active -> {retreated, destroyed, merged, pruned}; nothing else.
bool valid_transition(AgentStatus from, AgentStatus to);

struct AgentState {
  CommanderProfile profile;
  std::string mission;
  Coordinate location;
  ForceComposition composition;
  std::int64_t initial_total = 0;
  std::int64_t cumulative_losses = 0;
  std::int64_t received_via_merge = 0;
  std::int64_t forked_out = 0;
  AgentStatus status = AgentStatus::active;
  std::optional<ArmyId> parent;
  int created_tick = 0;
  double morale_score = 0.5;
  bool fortified = false;
  /// Ids external transcripts use for this agent (see engine id re-keying).
  std::vector<std::string> aliases;

  const ArmyId& id() const { return profile.id; }
  const std::string& side() const { return profile.identity; }
  std::int64_t total() const { return composition.total(); }
  bool active() const { return status == AgentStatus::active; }
  /// total + losses + forked_out == initial + received.
  bool ledger_balanced() const;
};

/// Creates a root agent from a scenario profile.
AgentState make_root_agent(const CommanderProfile& profile);

struct ForkRequest {
  TroopType troop_type;
  std::int64_t count = 0;
  std::string mission;
  Coordinate target_position;
  std::optional<std::string> target_agent;
};

struct ForkResult {
  AgentState parent;
  std::vector<AgentState> children;
};

/// Splits troops off `parent`. Children spawn at the parent's location.
/// Throws TopologyError on inactive parent, zero or negative counts, or
/// per-type over-allocation (the message names the type).
ForkResult fork(const AgentState& parent, std::span<const ForkRequest> requests, IdIssuer& ids, int tick);

struct MergeResult {
  AgentState merged;    // keeps the larger agent's id and profile text
  AgentState absorbed;  // status == merged
};

/// Throws TopologyError for inactive agents, different sides, self-merge, or
/// distance beyond `merge_radius` (map units).
MergeResult merge(const AgentState& a, const AgentState& b, double merge_radius);

enum class PruneReason { destroyed, retreated_off_map, removed };

/// Throws TopologyError if the agent is not active.
AgentState prune(const AgentState& agent, PruneReason reason);

enum class WoundState { unharmed, wounded, dead };

std::string_view to_string(WoundState state);
std::optional<WoundState> parse_wound_state(std::string_view text);

struct SoldierProfile {
  std::string id;
  std::string side;
  std::string name;
  std::string age;
  std::string familial_ties;
  std::string occupation;
  std::string personality;
  std::string social_standing;
  std::string health_conditions;
  std::string fitness;
  std::string hobbies;
  std::string conversational_style;
  std::string idiosyncrasies;
  std::string secrets;
};

}  // namespace battle
