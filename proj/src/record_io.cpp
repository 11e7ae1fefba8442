#include <sstream>

#include "battle/errors.hpp"
#include "battle/record.hpp"

namespace battle {

using nlohmann::json;

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::running: return "running";
    case Termination::annihilation: return "annihilation";
    case Termination::converged: return "converged";
    case Termination::max_ticks: return "max_ticks";
  }
  return "running";
}

std::optional<Termination> parse_termination(std::string_view text) {
  for (auto t : {Termination::running, Termination::annihilation, Termination::converged, Termination::max_ticks}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::int64_t RunRecord::final_casualties(const std::string& side) const {
  auto it = casualties.find(side);
  if (it == casualties.end() || it->second.empty()) return 0;
  return it->second.back();
}

namespace {

json point(Coordinate c) { return json::array({c.x, c.y}); }

Coordinate read_point(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json composition(const ForceComposition& c) {
  json out = json::object();
  for (const auto& [type, n] : c.counts()) out[type.name()] = n;
  return out;
}

ForceComposition read_composition(const json& j) {
  ForceComposition c;
  for (const auto& [name, n] : j.items()) {
    auto type = TroopType::parse(name);
    if (!type) throw std::invalid_argument("unknown troop type " + name);
    c.add(*type, n.get<std::int64_t>());
  }
  return c;
}

json optional_id(const std::optional<ArmyId>& id) { return id ? json(id->str()) : json(nullptr); }

std::optional<ArmyId> read_optional_id(const json& j) {
  if (j.is_null()) return std::nullopt;
  return ArmyId(j.get<std::string>());
}

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<int> read_optional_int(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

json frame_json(const Frame& f) {
  json agents = json::array();
  for (const auto& a : f.agents) {
    agents.push_back({{"id", a.id.str()},
                      {"side", a.side},
                      {"status", to_string(a.status)},
                      {"location", point(a.location)},
                      {"composition", composition(a.composition)},
                      {"initial_total", a.initial_total},
                      {"cumulative_losses", a.cumulative_losses},
                      {"received_via_merge", a.received_via_merge},
                      {"forked_out", a.forked_out},
                      {"morale_score", a.morale_score},
                      {"fortified", a.fortified},
                      {"parent", optional_id(a.parent)},
                      {"created_tick", a.created_tick},
                      {"aliases", a.aliases},
                      {"mission", a.mission}});
  }
  return {{"type", "frame"}, {"tick", f.tick}, {"agents", agents}};
}

Frame read_frame(const json& j) {
  Frame f;
  f.tick = j.at("tick").get<int>();
  for (const auto& a : j.at("agents")) {
    AgentFrame af;
    af.id = ArmyId(a.at("id").get<std::string>());
    af.side = a.at("side").get<std::string>();
    auto status = parse_agent_status(a.at("status").get<std::string>());
    if (!status) throw std::invalid_argument("unknown agent status");
    af.status = *status;
    af.location = read_point(a.at("location"));
    af.composition = read_composition(a.at("composition"));
    af.initial_total = a.at("initial_total").get<std::int64_t>();
    af.cumulative_losses = a.at("cumulative_losses").get<std::int64_t>();
    af.received_via_merge = a.at("received_via_merge").get<std::int64_t>();
    af.forked_out = a.at("forked_out").get<std::int64_t>();
    af.morale_score = a.at("morale_score").get<double>();
    af.fortified = a.at("fortified").get<bool>();
    af.parent = read_optional_id(a.at("parent"));
    af.created_tick = a.at("created_tick").get<int>();
    af.aliases = a.at("aliases").get<std::vector<std::string>>();
    af.mission = a.at("mission").get<std::string>();
    f.agents.push_back(std::move(af));
  }
  return f;
}

TrajectoryEntry read_trajectory(const json& j) {
  TrajectoryEntry e;
  e.tick = j.at("tick").get<int>();
  e.agent = ArmyId(j.at("agent").get<std::string>());
  e.side = j.at("side").get<std::string>();
  for (const auto& o : j.at("orders")) {
    e.orders.push_back({o.at("action").get<std::string>(), o.at("category").get<std::string>(),
                        read_point(o.at("location")), read_optional_id(o.at("recipient")),
                        o.at("description").get<std::string>()});
  }
  e.structure = j.at("structure").get<std::vector<std::string>>();
  if (const auto& m = j.at("movement"); !m.is_null()) {
    e.movement = MovementRecord{read_point(m.at("from")), read_point(m.at("to")), read_point(m.at("target")),
                                m.at("distance").get<double>(), m.at("clamped").get<bool>(),
                                m.at("blocked").get<bool>()};
  }
  e.location = read_point(j.at("location"));
  e.original = j.at("original").get<std::int64_t>();
  e.losses = j.at("losses").get<std::int64_t>();
  e.remaining = j.at("remaining").get<std::int64_t>();
  e.action_description = j.at("action_description").get<std::string>();
  return e;
}

ExperienceEpisode read_episode(const json& j) {
  ExperienceEpisode e;
  e.soldier = j.at("soldier").get<std::string>();
  e.side = j.at("side").get<std::string>();
  e.tick = j.at("tick").get<int>();
  e.agent = j.at("agent").get<std::string>();
  e.action = j.at("action").get<std::string>();
  e.location = read_point(j.at("location"));
  e.losses_witnessed = j.at("losses_witnessed").get<std::int64_t>();
  auto w = parse_wound_state(j.at("wound_state").get<std::string>());
  if (!w) throw std::invalid_argument("unknown wound state");
  e.wound_state = *w;
  e.emotions = j.at("emotions").get<std::vector<std::string>>();
  e.text = j.at("text").get<std::string>();
  return e;
}

}  // namespace

json to_json(const TrajectoryEntry& e) {
  json orders = json::array();
  for (const auto& o : e.orders) {
    orders.push_back({{"action", o.action},
                      {"category", o.category},
                      {"location", point(o.location)},
                      {"recipient", optional_id(o.recipient)},
                      {"description", o.description}});
  }
  json movement = nullptr;
  if (e.movement) {
    movement = {{"from", point(e.movement->from)},     {"to", point(e.movement->to)},
                {"target", point(e.movement->target)}, {"distance", e.movement->distance},
                {"clamped", e.movement->clamped},      {"blocked", e.movement->blocked}};
  }
  return {{"tick", e.tick},
          {"agent", e.agent.str()},
          {"side", e.side},
          {"orders", orders},
          {"structure", e.structure},
          {"movement", movement},
          {"location", point(e.location)},
          {"original", e.original},
          {"losses", e.losses},
          {"remaining", e.remaining},
          {"action_description", e.action_description}};
}

json to_json(const ExperienceEpisode& e) {
  return {{"soldier", e.soldier},
          {"side", e.side},
          {"tick", e.tick},
          {"agent", e.agent},
          {"action", e.action},
          {"location", point(e.location)},
          {"losses_witnessed", e.losses_witnessed},
          {"wound_state", to_string(e.wound_state)},
          {"emotions", e.emotions},
          {"text", e.text}};
}

std::string serialize(const RunRecord& r) {
  std::string out;
  auto line = [&out](json j, const char* type) {
    j["type"] = type;
    out += j.dump();
    out += '\n';
  };
  line({{"scenario_id", r.scenario_id},
        {"seed", r.seed},
        {"policies", r.policies},
        {"sides", r.sides},
        {"initial", r.initial}},
       "header");
  for (const auto& f : r.frames) line(frame_json(f), "frame");
  for (const auto& e : r.trajectory) line(to_json(e), "trajectory");
  for (const auto& e : r.engagements) {
    line({{"tick", e.tick},
          {"attacker", e.attacker.str()},
          {"defender", e.defender.str()},
          {"action", e.action},
          {"description", e.description},
          {"distance", e.distance},
          {"attacker_losses", e.attacker_losses},
          {"defender_losses", e.defender_losses},
          {"rationale", e.rationale}},
         "engagement");
  }
  for (const auto& e : r.events) {
    line({{"tick", e.tick}, {"kind", e.kind}, {"agent", e.agent}, {"message", e.message}}, "event");
  }
  for (const auto& e : r.episodes) line(to_json(e), "episode");
  for (const auto& s : r.soldiers) {
    line({{"id", s.id},
          {"side", s.side},
          {"name", s.name},
          {"wound", to_string(s.wound)},
          {"death_tick", optional_int(s.death_tick)},
          {"assigned_agent", s.assigned_agent}},
         "soldier");
  }
  line({{"casualties", r.casualties}, {"termination", to_string(r.termination)}, {"ticks", r.ticks}}, "summary");
  return out;
}

RunRecord parse_record(std::string_view text) {
  RunRecord r;
  bool header = false;
  bool summary = false;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(number);
    try {
      const json j = json::parse(raw);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        r.scenario_id = j.at("scenario_id").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.policies = j.at("policies").get<std::vector<std::string>>();
        r.sides = j.at("sides").get<std::vector<std::string>>();
        r.initial = j.at("initial").get<std::map<std::string, std::int64_t>>();
        header = true;
      } else if (type == "frame") {
        r.frames.push_back(read_frame(j));
      } else if (type == "trajectory") {
        r.trajectory.push_back(read_trajectory(j));
      } else if (type == "engagement") {
        r.engagements.push_back({j.at("tick").get<int>(), ArmyId(j.at("attacker").get<std::string>()),
                                 ArmyId(j.at("defender").get<std::string>()), j.at("action").get<std::string>(),
                                 j.at("description").get<std::string>(), j.at("distance").get<double>(),
                                 j.at("attacker_losses").get<std::int64_t>(),
                                 j.at("defender_losses").get<std::int64_t>(), j.at("rationale").get<std::string>()});
      } else if (type == "event") {
        r.events.push_back({j.at("tick").get<int>(), j.at("kind").get<std::string>(), j.at("agent").get<std::string>(),
                            j.at("message").get<std::string>()});
      } else if (type == "episode") {
        r.episodes.push_back(read_episode(j));
      } else if (type == "soldier") {
        auto w = parse_wound_state(j.at("wound").get<std::string>());
        if (!w) throw std::invalid_argument("unknown wound state");
        r.soldiers.push_back({j.at("id").get<std::string>(), j.at("side").get<std::string>(),
                              j.at("name").get<std::string>(), *w, read_optional_int(j.at("death_tick")),
                              j.at("assigned_agent").get<std::string>()});
      } else if (type == "summary") {
        r.casualties = j.at("casualties").get<std::map<std::string, std::vector<std::int64_t>>>();
        auto t = parse_termination(j.at("termination").get<std::string>());
        if (!t) throw std::invalid_argument("unknown termination");
        r.termination = *t;
        r.ticks = j.at("ticks").get<int>();
        summary = true;
      } else {
        throw std::invalid_argument("unknown line type '" + type + "'");
      }
    } catch (const LoadError&) {
      throw;
    } catch (const std::exception& e) {
      throw LoadError(where, e.what());
    }
  }
  if (!header) throw LoadError("record", "missing header line");
  if (!summary) throw LoadError("record", "missing summary line");
  return r;
}

}  // namespace battle
