#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "battle/decision.hpp"
#include "battle/evaluator.hpp"
#include "battle/record.hpp"
#include "battle/scenario.hpp"
#include "battle/soldiers.hpp"

namespace battle {

struct MoveResult {
  Coordinate to;
  double distance = 0.0;
  bool clamped = false;
  bool blocked = false;
};

/// Straight-line move toward `target`, at most cap_units times the smallest
/// movement factor among features the segment touches. Stops just short of
/// the first impassable feature unless `bridging`.
MoveResult apply_movement(Coordinate from, Coordinate target, double cap_units, const WorldMap& world,
                          bool bridging);

struct RunOptions {
  std::uint64_t seed = 0;
  std::optional<int> max_ticks;
  std::optional<double> sight_range_m;
  std::optional<int> convergence_window;
  std::optional<std::int64_t> convergence_epsilon;
};

/// One seeded emulation. Policies are indexed like Scenario::sides.
class Engine {
 public:
  Engine(const Scenario& scenario, std::array<const Policy*, 2> policies, RunOptions options,
         std::unique_ptr<CasualtyEvaluator> evaluator = nullptr);

  /// Runs one tick. No-op once terminated.
  void step();
  /// Steps until a termination condition holds.
  const RunRecord& run();

  bool terminated() const { return record_.termination != Termination::running; }
  int tick() const { return tick_; }
  const AgentTable& agents() const { return agents_; }
  const RunRecord& record() const { return record_; }
  const std::vector<SoldierState>& soldiers() const { return soldiers_; }
  Observation observe(const ArmyId& id) const;

  /// Resolves an id or alias to the agent now carrying it (following merges).
  std::optional<ArmyId> resolve(const ArmyId& id) const;

 private:
  struct Pending;

  void collect_decisions(std::vector<Pending>& pending);
  void apply_forks(std::vector<Pending>& pending);
  void apply_merges(std::vector<Pending>& pending);
  void apply_moves(std::vector<Pending>& pending);
  void apply_engagements(std::vector<Pending>& pending);
  void update_morale();
  void prune_destroyed(std::vector<Pending>& pending);
  void update_soldiers(std::vector<Pending>& pending);
  void write_trajectory(std::vector<Pending>& pending);
  void snapshot();
  void check_termination();

  void event(std::string kind, const std::string& agent, std::string message);
  void reassign_soldiers(const ArmyId& from);
  std::size_t side_index(const std::string& side) const;
  CombatantSnapshot combatant(const AgentState& a) const;
  std::span<const TrajectoryEntry> history(const ArmyId& id) const;

  const Scenario& scenario_;
  std::array<const Policy*, 2> policies_;
  EngineConfig config_;
  RunStreams streams_;
  IdIssuer ids_;
  std::unique_ptr<CasualtyEvaluator> evaluator_;
  AgentTable agents_;
  std::map<ArmyId, ArmyId> merged_into_;
  std::map<std::string, ArmyId> aliases_;
  std::map<ArmyId, std::string> current_action_;
  std::map<ArmyId, Observation> last_observation_;
  std::map<ArmyId, std::vector<TrajectoryEntry>> history_;
  std::vector<SoldierState> soldiers_;
  std::array<std::int64_t, 2> side_losses_{0, 0};
  std::array<std::int64_t, 2> tick_side_losses_{0, 0};
  std::array<std::int64_t, 2> tick_start_strength_{0, 0};
  RunRecord record_;
  int tick_ = 0;
};

RunRecord run(const Scenario& scenario, std::array<const Policy*, 2> policies, RunOptions options,
              std::unique_ptr<CasualtyEvaluator> evaluator = nullptr);

/// Baseline policies for both sides of a scenario.
std::array<std::unique_ptr<Policy>, 2> baseline_policies(const Scenario& scenario);

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> variance;  // unbiased; zeros when undefined
  bool variance_defined = true;  // false with fewer than two records
};

/// Per-side per-tick statistics of cumulative casualties. Shorter runs are
/// extended by holding their final value. Throws std::invalid_argument on an
/// empty input or records from different scenarios.
std::map<std::string, SeriesStats> mean_variance_series(std::span<const RunRecord> records);

}  // namespace battle
