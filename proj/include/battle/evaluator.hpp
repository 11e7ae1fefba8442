#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "battle/casualty.hpp"

namespace battle {

/// Decides the outcome of one engagement. Warnings are appended to the
/// engine's event log.
class CasualtyEvaluator {
 public:
  virtual ~CasualtyEvaluator() = default;
  virtual EngagementOutcome evaluate(const EngagementContext& ctx, Rng& rng, std::vector<std::string>& warnings) = 0;
};

/// The built-in attrition model.
class ModelEvaluator final : public CasualtyEvaluator {
 public:
  explicit ModelEvaluator(CasualtyConfig config) : config_(std::move(config)) {}
  EngagementOutcome evaluate(const EngagementContext& ctx, Rng& rng, std::vector<std::string>& warnings) override;

 private:
  CasualtyConfig config_;
};

/// Wire format for an outside observer: the four factor groups (profiles,
/// action, positions and terrain, weapon metrics).
nlohmann::json engagement_request(const EngagementContext& ctx, const CasualtyConfig& config);

/// Parses {attacker_losses, defender_losses, rationale}; std::nullopt when
/// malformed or negative.
std::optional<EngagementOutcome> parse_engagement_response(const nlohmann::json& response);

/// Sends a serialized request and returns the raw response text.
using EvaluatorTransport = std::function<std::string(const std::string& request)>;

/// Recorded request/response pairs keyed by (tick, attacker id, defender id).
class EvaluatorTranscript {
 public:
  /// Line-delimited {"request": {...}, "response": {...}}. Malformed lines are
  /// skipped and reported through `warnings()`.
  static EvaluatorTranscript parse(std::string_view text);

  const nlohmann::json* find(int tick, const std::string& attacker, const std::string& defender) const;
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::map<std::tuple<int, std::string, std::string>, nlohmann::json> entries_;
  std::vector<std::string> warnings_;
};

/// Delegates to a transport or a transcript; anything unusable falls back to
/// the built-in model with a warning. Losses above the current totals are
/// clamped with a warning.
class ExternalEvaluator final : public CasualtyEvaluator {
 public:
  ExternalEvaluator(CasualtyConfig config, EvaluatorTranscript transcript);
  ExternalEvaluator(CasualtyConfig config, EvaluatorTransport transport);

  EngagementOutcome evaluate(const EngagementContext& ctx, Rng& rng, std::vector<std::string>& warnings) override;

 private:
  std::optional<nlohmann::json> lookup(const EngagementContext& ctx, std::vector<std::string>& warnings) const;

  CasualtyConfig config_;
  std::optional<EvaluatorTranscript> transcript_;
  EvaluatorTransport transport_;
};

}  // namespace battle
