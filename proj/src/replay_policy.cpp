#include "battle/decision.hpp"

#include "battle/errors.hpp"

namespace battle {

using nlohmann::json;

bool operator==(const Order& a, const Order& b) {
  return a.initiator == b.initiator && a.kind == b.kind && a.location == b.location && a.recipient == b.recipient &&
         a.description == b.description;
}

bool operator==(const PolicyDecision& a, const PolicyDecision& b) {
  return a.orders == b.orders && a.forks == b.forks && a.merge_with == b.merge_with && a.retreat == b.retreat;
}

json to_json(const ForkDirective& f) {
  return {{"subAgent_NextActionType", f.next_action},
          {"troopType", f.troop_type.name()},
          {"deployedNum", f.deployed},
          {"target_position", {f.target_position.x, f.target_position.y}},
          {"target_agent_id", f.target_agent_id ? json(*f.target_agent_id) : json(nullptr)},
          {"agent_id", f.agent_id ? json(*f.agent_id) : json(nullptr)},
          {"remarks", f.remarks}};
}

json to_json(const PolicyDecision& d) {
  json orders = json::array();
  for (const auto& o : d.orders) {
    orders.push_back({{"action", o.kind ? std::string(o.kind->name) : std::string()},
                      {"location", {o.location.x, o.location.y}},
                      {"recipient", o.recipient ? json(o.recipient->str()) : json(nullptr)},
                      {"description", o.description}});
  }
  json forks = json::array();
  for (const auto& f : d.forks) forks.push_back(to_json(f));
  return {{"orders", orders},
          {"fork", forks},
          {"merge_with", d.merge_with ? json(d.merge_with->str()) : json(nullptr)},
          {"retreat", d.retreat}};
}

namespace {

Coordinate read_point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw LoadError(where, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

// Recorded output writes "None" for an absent id.
std::optional<std::string> read_optional_id(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw LoadError(key, "expected a string or null");
  const std::string s = *it;
  if (s.empty() || s == "None" || s == "null") return std::nullopt;
  return s;
}

ArmyId read_army_id(const std::string& text, const std::string& where) {
  auto id = ArmyId::parse(text);
  if (!id) throw LoadError(where, "malformed agent id '" + text + "'");
  return *id;
}

}  // namespace

PolicyDecision parse_decision(const json& decision, const ArmyId& initiator) {
  if (!decision.is_object()) throw LoadError("decision", "expected an object");
  PolicyDecision d;
  if (auto it = decision.find("orders"); it != decision.end()) {
    if (!it->is_array()) throw LoadError("orders", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "orders[" + std::to_string(i) + "]";
      const json& o = (*it)[i];
      if (!o.is_object() || !o.contains("action") || !o["action"].is_string()) {
        throw LoadError(where, "expected an object with an action name");
      }
      const std::string name = o["action"];
      const ActionKind* kind = find_action(name);
      if (kind == nullptr) throw LoadError(where, "unknown action '" + name + "'");
      Order order{initiator, kind, {}, std::nullopt, {}};
      if (!o.contains("location")) throw LoadError(where, "missing location");
      order.location = read_point(o["location"], where + ".location");
      if (auto r = read_optional_id(o, "recipient")) order.recipient = read_army_id(*r, where + ".recipient");
      if (auto desc = o.find("description"); desc != o.end() && desc->is_string()) order.description = *desc;
      d.orders.push_back(std::move(order));
    }
  }
  if (auto it = decision.find("fork"); it != decision.end()) {
    if (!it->is_array()) throw LoadError("fork", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "fork[" + std::to_string(i) + "]";
      const json& f = (*it)[i];
      if (!f.is_object()) throw LoadError(where, "expected an object");
      ForkDirective fd;
      try {
        fd.next_action = f.at("subAgent_NextActionType").get<std::string>();
        const std::string troop = f.at("troopType").get<std::string>();
        auto type = TroopType::parse(troop);
        if (!type) throw LoadError(where + ".troopType", "unknown troop type '" + troop + "'");
        fd.troop_type = *type;
        fd.deployed = f.at("deployedNum").get<std::int64_t>();
        fd.target_position = read_point(f.at("target_position"), where + ".target_position");
        if (auto r = f.find("remarks"); r != f.end() && r->is_string()) fd.remarks = *r;
      } catch (const json::exception& e) {
        throw LoadError(where, e.what());
      }
      if (find_action(fd.next_action) == nullptr) {
        throw LoadError(where + ".subAgent_NextActionType", "unknown action '" + fd.next_action + "'");
      }
      if (fd.deployed <= 0) throw LoadError(where + ".deployedNum", "must be positive");
      fd.target_agent_id = read_optional_id(f, "target_agent_id");
      fd.agent_id = read_optional_id(f, "agent_id");
      d.forks.push_back(std::move(fd));
    }
  }
  if (auto m = read_optional_id(decision, "merge_with")) d.merge_with = read_army_id(*m, "merge_with");
  if (auto r = decision.find("retreat"); r != decision.end()) {
    if (!r->is_boolean()) throw LoadError("retreat", "expected a boolean");
    d.retreat = *r;
  }
  return d;
}

ReplayPolicy ReplayPolicy::parse(std::string_view text) {
  ReplayPolicy p;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "decision transcript line " + std::to_string(line_no);
    const json entry = json::parse(line, nullptr, false);
    try {
      if (entry.is_discarded() || !entry.is_object()) throw LoadError("", "not a JSON object");
      const int tick = entry.at("tick").get<int>();
      const ArmyId agent = read_army_id(entry.at("agent_id").get<std::string>(), "agent_id");
      PolicyDecision d = parse_decision(entry.at("decision"), agent);
      if (!p.entries_.emplace(std::make_pair(tick, agent.str()), std::move(d)).second) {
        throw LoadError("", "duplicate entry for tick " + std::to_string(tick) + " " + agent.str());
      }
    } catch (const LoadError& e) {
      p.load_warnings_.push_back(where + " skipped: " + e.what());
    } catch (const json::exception& e) {
      p.load_warnings_.push_back(where + " skipped: " + e.what());
    }
  }
  return p;
}

PolicyDecision ReplayPolicy::decide(const Observation& obs, std::span<const TrajectoryEntry>) const {
  auto it = entries_.find({obs.tick, obs.self.id.str()});
  for (std::size_t i = 0; it == entries_.end() && i < obs.self.aliases.size(); ++i) {
    it = entries_.find({obs.tick, obs.self.aliases[i]});
  }
  if (it == entries_.end()) {
    PolicyDecision empty;
    empty.warnings.push_back("replay: no recorded decision for " + obs.self.id.str() + " at tick " +
                             std::to_string(obs.tick));
    return empty;
  }
  PolicyDecision d = it->second;
  for (auto& o : d.orders) o.initiator = obs.self.id;
  return d;
}

}  // namespace battle
