#include "battle/observation.hpp"

#include <algorithm>

#include "battle/errors.hpp"

namespace battle {

bool Observation::knows(const ArmyId& id) const {
  auto match = [&](const VisibleAgent& v) { return v.id == id; };
  if (std::any_of(agents.begin(), agents.end(), match)) return true;
  return std::any_of(relayed_intel.begin(), relayed_intel.end(),
                     [&](const IntelReport& r) { return std::any_of(r.agents.begin(), r.agents.end(), match); });
}

Observation observe(const WorldMap& world, const AgentTable& agents, const ArmyId& self, double sight_range_m,
                    int tick, const std::map<ArmyId, std::string>& current_actions,
                    const std::map<ArmyId, Observation>& previous) {
  auto it = agents.find(self);
  if (it == agents.end()) throw LookupError("observe: unknown agent " + self.str());
  const AgentState& me = it->second;

  Observation obs;
  obs.tick = tick;
  SelfSnapshot& s = obs.self;
  s.id = me.id();
  s.aliases = me.aliases;
  s.side = me.side();
  s.mission = me.mission;
  s.location = me.location;
  s.composition = me.composition;
  s.initial_total = me.initial_total;
  s.cumulative_losses = me.cumulative_losses;
  s.morale_score = me.morale_score;
  s.fortified = me.fortified;
  s.parent = me.parent;
  s.terrain = terrain_at(world, me.location);

  const double range_units = meters_to_units(sight_range_m);
  for (const auto& f : world.features()) {
    const double d = distance(me.location, nearest_point(f, me.location));
    if (d <= range_units) obs.features.push_back({f.id, f.kind, d, f.description});
  }

  std::vector<Candidate> candidates;
  std::vector<const AgentState*> others;
  for (const auto& [id, a] : agents) {
    if (id == self || !a.active()) continue;
    if (a.parent == self) s.children.push_back(id);
    candidates.emplace_back(id.str(), a.location);
    others.push_back(&a);
  }
  const auto sightings = visible_entities(world, me.location, candidates, sight_range_m);
  std::size_t j = 0;
  for (const auto& sighting : sightings) {
    while (others[j]->id().str() != sighting.id) ++j;
    const AgentState& a = *others[j];
    VisibleAgent v;
    v.id = a.id();
    v.friendly = a.side() == me.side();
    v.side = a.side();
    auto act = current_actions.find(a.id());
    v.current_action = act != current_actions.end() ? act->second : std::string();
    v.distance = sighting.distance;
    v.bearing = sighting.bearing;
    v.location = a.location;
    v.composition = a.composition;
    obs.agents.push_back(std::move(v));
  }
  std::stable_sort(obs.agents.begin(), obs.agents.end(),
                   [](const VisibleAgent& a, const VisibleAgent& b) { return a.distance < b.distance; });

  for (const auto& child : s.children) {
    auto p = previous.find(child);
    if (p == previous.end()) continue;
    IntelReport r{child, p->second.tick, {}};
    for (const auto& v : p->second.agents) {
      // Drop sightings of agents that have since left the field.
      auto a = agents.find(v.id);
      if (a != agents.end() && a->second.active() && v.id != self) r.agents.push_back(v);
    }
    obs.relayed_intel.push_back(std::move(r));
  }
  return obs;
}

}  // namespace battle
