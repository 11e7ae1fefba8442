#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "battle/actions.hpp"
#include "battle/agents.hpp"
#include "battle/rng.hpp"

namespace battle {

struct SoldierState {
  SoldierProfile profile;
  std::optional<ArmyId> assigned_agent;  // empty once no active ancestor remains
  WoundState wound = WoundState::unharmed;
  std::optional<int> death_tick;
  std::optional<int> wound_tick;
};

struct WoundTransition {
  std::string soldier;
  WoundState from = WoundState::unharmed;
  WoundState to = WoundState::unharmed;

  friend bool operator==(const WoundTransition&, const WoundTransition&) = default;
};

/// Each living soldier in `roster` is hit independently with probability
/// p = min(1, severity * losses / remaining_before). A hit unharmed soldier is
/// wounded (80%) or killed (20%); a hit wounded soldier dies. Soldiers are
/// visited in roster order, so results depend only on the seed and roster.
std::vector<WoundTransition> sample_wounds(std::int64_t losses, std::int64_t remaining_before,
                                           std::span<SoldierState*> roster, double severity, int tick, Rng& rng);

inline constexpr std::string_view kEmotionLexicon[] = {"fear", "resolve", "exhaustion", "grief",
                                                       "hope", "anger",   "relief"};

/// What the soldier's agent did and suffered this tick.
struct TickContext {
  int tick = 0;
  std::optional<ArmyId> agent;
  std::string action;  // empty when the agent issued no order
  std::optional<ActionCategory> category;
  Coordinate location;
  std::int64_t losses_witnessed = 0;
  int momentum = 0;           // sign(enemy losses - own side losses) this tick
  bool under_attack = false;  // the agent was the target of an engagement
  std::string enemy_action;   // the action used against the agent, if any
  WoundState wound_before = WoundState::unharmed;
};

struct ExperienceEpisode {
  std::string soldier;
  std::string side;
  int tick = 0;
  std::string agent;
  std::string action;
  Coordinate location;
  std::int64_t losses_witnessed = 0;
  WoundState wound_state = WoundState::unharmed;
  std::vector<std::string> emotions;  // subset of kEmotionLexicon, lexicon order
  std::string text;

  friend bool operator==(const ExperienceEpisode&, const ExperienceEpisode&) = default;
};

/// Deterministic templated episode. The template and emotion tags are keyed by
/// (action category, wound change, momentum, under attack).
ExperienceEpisode record_experience(const SoldierState& soldier, const TickContext& ctx);

struct FrequencyFilter {
  std::vector<std::string> tags{"RB", "MD", "IN", "CD", "DT", "NNS", "PRP", "FW"};
  std::vector<std::string> stoplist{"think", "feel", "battle", "war"};
  bool drop_function_words = true;
};

struct FrequencyReport {
  std::vector<std::pair<std::string, std::int64_t>> counts;  // descending count, then token
  bool empty_after_filter = false;

  std::optional<std::size_t> rank_of(std::string_view token) const;  // 0-based
};

/// Word -> part-of-speech tag table. Loaded from the bundled lexicon unless
/// BATTLE_LEXICON names a replacement file (word<TAB>tag per line).
class PosLexicon {
 public:
  static const PosLexicon& bundled();
  static PosLexicon parse(std::string_view tsv);

  std::optional<std::string_view> tag(std::string_view word) const;
  std::size_t size() const { return tags_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> tags_;
};

/// Splits on whitespace, lowercases ASCII, strips punctuation at both ends and
/// drops tokens that are empty or purely numeric.
std::vector<std::string> tokenize(std::string_view text);

bool is_function_word(std::string_view token);

FrequencyReport word_frequency(std::span<const std::string> corpus, const FrequencyFilter& filter = {},
                               const PosLexicon& lexicon = PosLexicon::bundled());

}  // namespace battle
