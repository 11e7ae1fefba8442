#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "battle/engine.hpp"
#include "battle/record.hpp"
#include "battle/scenario.hpp"

namespace battle {

struct SideCasualties {
  double final_mean = 0.0;
  std::vector<std::int64_t> finals;  // one per record
  std::optional<ReferenceRange> reference;
  bool within_reference = false;
};

struct CasualtyReport {
  std::string scenario_id;
  std::size_t runs = 0;
  std::map<std::string, SeriesStats> series;
  std::map<std::string, SideCasualties> sides;
  /// Larger final mean over smaller; empty when the smaller is zero.
  std::optional<double> ratio;
  std::string ratio_numerator;
  std::string ratio_denominator;
  /// Every side has a reference range and its final mean lies inside it.
  bool within_reference = false;
};

/// Throws std::invalid_argument on an empty input or mixed scenarios.
CasualtyReport casualty_report(std::span<const RunRecord> records, std::span<const ReferenceRange> reference);

nlohmann::json to_json(const CasualtyReport& report);
/// tick, then mean and variance columns for each side.
std::string casualty_csv(const CasualtyReport& report);

struct TracePoint {
  int tick = 0;
  ArmyId agent;
  std::string side;
  Coordinate location;
  double size = 0.0;  // troops / side initial total

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Active agents of every frame, normalized by their side's initial strength.
std::vector<TracePoint> movement_trace(const RunRecord& record);
std::string trace_jsonl(std::span<const TracePoint> trace);

struct TrackerRow {
  int tick = 0;
  ArmyId agent;
  std::string action;
  std::string description;
  std::int64_t losses = 0;

  friend bool operator==(const TrackerRow&, const TrackerRow&) = default;
};

/// One row per trajectory entry of the chosen agents, by tick then id.
/// Aliases are accepted. Throws LookupError for ids never present in the run.
std::vector<TrackerRow> action_tracker(const RunRecord& record, std::span<const std::string> agents);
std::string tracker_csv(std::span<const TrackerRow> rows);

/// Episode texts written by soldiers of `side` across the records.
std::vector<std::string> side_corpus(std::span<const RunRecord> records, const std::string& side);
std::string frequency_csv(const FrequencyReport& report, std::size_t limit);

}  // namespace battle
