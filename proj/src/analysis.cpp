#include "battle/analysis.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "battle/errors.hpp"

namespace battle {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) { return nlohmann::json(v).dump(); }

}  // namespace

CasualtyReport casualty_report(std::span<const RunRecord> records, std::span<const ReferenceRange> reference) {
  CasualtyReport r;
  r.series = mean_variance_series(records);
  r.scenario_id = records.front().scenario_id;
  r.runs = records.size();
  r.within_reference = true;
  for (const auto& side : records.front().sides) {
    SideCasualties sc;
    double sum = 0.0;
    for (const auto& rec : records) {
      sc.finals.push_back(rec.final_casualties(side));
      sum += static_cast<double>(sc.finals.back());
    }
    sc.final_mean = sum / static_cast<double>(records.size());
    for (const auto& ref : reference) {
      if (ref.side == side) sc.reference = ref;
    }
    sc.within_reference = sc.reference && sc.final_mean >= static_cast<double>(sc.reference->casualty_min) &&
                          sc.final_mean <= static_cast<double>(sc.reference->casualty_max);
    r.within_reference = r.within_reference && sc.within_reference;
    r.sides.emplace(side, std::move(sc));
  }
  const auto& sides = records.front().sides;
  if (sides.size() == 2) {
    const double a = r.sides.at(sides[0]).final_mean;
    const double b = r.sides.at(sides[1]).final_mean;
    const bool a_larger = a >= b;
    r.ratio_numerator = a_larger ? sides[0] : sides[1];
    r.ratio_denominator = a_larger ? sides[1] : sides[0];
    const double lo = std::min(a, b);
    if (lo > 0.0) r.ratio = std::max(a, b) / lo;
  }
  return r;
}

nlohmann::json to_json(const CasualtyReport& report) {
  nlohmann::json sides = nlohmann::json::object();
  for (const auto& [name, sc] : report.sides) {
    nlohmann::json ref = nullptr;
    if (sc.reference) {
      ref = {{"casualty_range", {sc.reference->casualty_min, sc.reference->casualty_max}},
             {"initial_range", {sc.reference->initial_min, sc.reference->initial_max}}};
    }
    const SeriesStats& st = report.series.at(name);
    sides[name] = {{"final_mean", sc.final_mean},
                   {"finals", sc.finals},
                   {"reference", ref},
                   {"within_reference", sc.within_reference},
                   {"mean_series", st.mean},
                   {"variance_series", st.variance},
                   {"variance_defined", st.variance_defined}};
  }
  return {{"scenario_id", report.scenario_id},
          {"runs", report.runs},
          {"sides", sides},
          {"ratio", report.ratio ? nlohmann::json(*report.ratio) : nlohmann::json(nullptr)},
          {"ratio_numerator", report.ratio_numerator},
          {"ratio_denominator", report.ratio_denominator},
          {"within_reference", report.within_reference}};
}

std::string casualty_csv(const CasualtyReport& report) {
  std::ostringstream out;
  out << "tick";
  std::size_t len = 0;
  for (const auto& [side, st] : report.series) {
    out << ',' << csv_field(side + "_mean") << ',' << csv_field(side + "_variance");
    len = std::max(len, st.mean.size());
  }
  out << '\n';
  for (std::size_t t = 0; t < len; ++t) {
    out << t;
    for (const auto& [side, st] : report.series) {
      out << ',' << number(t < st.mean.size() ? st.mean[t] : st.mean.back()) << ','
          << number(t < st.variance.size() ? st.variance[t] : st.variance.back());
    }
    out << '\n';
  }
  return out.str();
}

std::vector<TracePoint> movement_trace(const RunRecord& record) {
  std::vector<TracePoint> out;
  for (const auto& frame : record.frames) {
    for (const auto& a : frame.agents) {
      if (a.status != AgentStatus::active) continue;
      const auto initial = record.initial.at(a.side);
      const double size = initial > 0 ? static_cast<double>(a.total()) / static_cast<double>(initial) : 0.0;
      out.push_back({frame.tick, a.id, a.side, a.location, size});
    }
  }
  return out;
}

std::string trace_jsonl(std::span<const TracePoint> trace) {
  std::string out;
  for (const auto& p : trace) {
    nlohmann::json j = {{"tick", p.tick},
                        {"agent", p.agent.str()},
                        {"side", p.side},
                        {"location", {p.location.x, p.location.y}},
                        {"size", p.size}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<TrackerRow> action_tracker(const RunRecord& record, std::span<const std::string> agents) {
  std::set<ArmyId> wanted;
  for (const auto& name : agents) {
    std::optional<ArmyId> found;
    for (const auto& frame : record.frames) {
      for (const auto& a : frame.agents) {
        if (a.id.str() == name || std::find(a.aliases.begin(), a.aliases.end(), name) != a.aliases.end()) found = a.id;
      }
      if (found) break;
    }
    if (!found) throw LookupError("agent " + name + " never appears in the run");
    wanted.insert(*found);
  }
  std::vector<TrackerRow> rows;
  for (const auto& e : record.trajectory) {
    if (!wanted.contains(e.agent)) continue;
    std::string action;
    for (const auto& o : e.orders) action += (action.empty() ? "" : " + ") + o.action;
    if (action.empty()) action = e.action_description;
    rows.push_back({e.tick, e.agent, action, e.action_description, e.losses});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TrackerRow& a, const TrackerRow& b) {
    return a.tick < b.tick || (a.tick == b.tick && a.agent < b.agent);
  });
  return rows;
}

std::string tracker_csv(std::span<const TrackerRow> rows) {
  std::string out = "tick,agent,action,description,losses\n";
  for (const auto& r : rows) {
    out += std::to_string(r.tick) + "," + r.agent.str() + "," + csv_field(r.action) + "," +
           csv_field(r.description) + "," + std::to_string(r.losses) + "\n";
  }
  return out;
}

std::vector<std::string> side_corpus(std::span<const RunRecord> records, const std::string& side) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    for (const auto& e : r.episodes) {
      if (e.side == side) out.push_back(e.text);
    }
  }
  return out;
}

std::string frequency_csv(const FrequencyReport& report, std::size_t limit) {
  std::string out = "rank,token,count\n";
  for (std::size_t i = 0; i < report.counts.size() && i < limit; ++i) {
    out += std::to_string(i + 1) + "," + csv_field(report.counts[i].first) + "," +
           std::to_string(report.counts[i].second) + "\n";
  }
  return out;
}

}  // namespace battle
