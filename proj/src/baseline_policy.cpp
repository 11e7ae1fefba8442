#include "battle/decision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace battle {

BaselineSettings BaselineSettings::for_side(const Scenario& scenario, std::size_t side_index) {
  const SideConfig& side = scenario.sides.at(side_index);
  BaselineSettings s;
  s.posture = side.posture;
  s.home_edge = side.home_edge;
  s.bounds = scenario.map.bounds();
  s.casualty = scenario.casualty;
  s.speeds = scenario.engine.speeds;
  s.retreat_fraction = scenario.engine.retreat_fraction;
  s.broken_morale = scenario.engine.broken_morale;
  s.fork_threshold = scenario.engine.fork_threshold;
  s.fork_fraction = scenario.engine.fork_fraction;
  s.cluster_linkage = scenario.engine.cluster_linkage;
  s.merge_radius = scenario.engine.merge_radius;
  return s;
}

std::vector<std::vector<std::size_t>> BaselinePolicy::clusters(std::span<const Coordinate> points, double linkage) {
  std::vector<std::size_t> root(points.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (distance(points[i], points[j]) <= linkage) {
        const auto a = find(i);
        const auto b = find(j);
        if (a != b) root[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(points.size(), -1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

namespace {

Order make_order(const Observation& obs, std::string_view action_name, Coordinate where,
                 std::optional<ArmyId> recipient, std::string description) {
  return Order{obs.self.id, &action(action_name), where, std::move(recipient), std::move(description)};
}

// Point `stop_short` units before `to` on the way from `from`.
Coordinate approach(Coordinate from, Coordinate to, double stop_short) {
  const double d = distance(from, to);
  if (d <= stop_short) return from;
  const double t = (d - stop_short) / d;
  return {from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t};
}

}  // namespace

PolicyDecision BaselinePolicy::decide(const Observation& obs, std::span<const TrajectoryEntry>) const {
  PolicyDecision d;
  const SelfSnapshot& me = obs.self;
  const std::int64_t total = me.composition.total();
  if (total == 0) return d;

  std::vector<const VisibleAgent*> enemies;
  std::vector<const VisibleAgent*> friends;
  for (const auto& v : obs.agents) (v.friendly ? friends : enemies).push_back(&v);
  auto closer = [](const VisibleAgent* a, const VisibleAgent* b) {
    return a->distance < b->distance || (a->distance == b->distance && a->id < b->id);
  };
  std::sort(enemies.begin(), enemies.end(), closer);
  std::sort(friends.begin(), friends.end(), closer);

  // Rule 1: withdraw when spent or broken.
  const bool spent = static_cast<double>(total) < s_.retreat_fraction * static_cast<double>(me.initial_total);
  const bool broken = me.morale_score <= s_.broken_morale;
  if ((spent || broken) && !enemies.empty()) {
    d.retreat = true;
    d.orders.push_back(make_order(obs, "Tactical Retreat", edge_point(s_.bounds, s_.home_edge, me.location),
                                  std::nullopt, spent ? "Withdrawing the remnant toward our lines"
                                                      : "Morale has broken; falling back toward our lines"));
    return d;
  }

  double ranged_reach_m = 0.0;
  bool has_longbow = false;
  bool has_cavalry = false;
  bool has_foot_melee = false;
  for (const auto& [type, n] : me.composition.counts()) {
    if (n <= 0) continue;
    const WeaponStats* w = s_.casualty.weapon_for(type);
    if (w != nullptr && s_.casualty.is_ranged(*w)) {
      ranged_reach_m = std::max(ranged_reach_m, w->effective_range_m);
      has_longbow = has_longbow || type.kind() == TroopType::Kind::longbowman;
    } else if (type.is_cavalry()) {
      has_cavalry = true;
    } else {
      has_foot_melee = true;
    }
  }
  const bool offensive = s_.posture == Posture::offensive;
  const double melee_stop = meters_to_units(s_.casualty.melee_radius_m) / 2.0;

  if (!enemies.empty()) {
    const VisibleAgent& target = *enemies.front();
    const double dist_m = units_to_meters(target.distance);
    const bool ranged_ok = ranged_reach_m > 0.0 && dist_m <= ranged_reach_m;
    const bool melee_capable = has_cavalry || has_foot_melee;
    const bool melee_ok = melee_capable && dist_m <= s_.casualty.melee_radius_m;

    // Rules 2 and 3.
    if (ranged_ok) {
      d.orders.push_back(make_order(obs, has_longbow ? "Deploy Longbows" : "Employ Archers Strategically",
                                    target.location, target.id, "Volleys on the nearest enemy formation"));
    }
    if (melee_ok && (offensive || !ranged_ok)) {
      if (has_cavalry) {
        d.orders.push_back(make_order(obs, "Charge Cavalry", target.location, target.id,
                                      "Mounted charge into the nearest enemy formation"));
      }
      if (has_foot_melee) {
        d.orders.push_back(make_order(obs, "Hand-to-Hand Combat", target.location, target.id,
                                      "Closing with the nearest enemy on foot"));
      }
    } else if (offensive && melee_capable && !melee_ok) {
      d.orders.push_back(make_order(obs, "Reposition Forces",
                                    s_.bounds.clamp(approach(me.location, target.location, melee_stop)),
                                    std::nullopt, "Advancing on the nearest enemy formation"));
    }
    if (!d.orders.empty() && !offensive) return d;

    // Rule 4: detach a skirmishing force toward a second enemy group.
    if (d.orders.empty() || offensive) {
      if (total > s_.fork_threshold && me.children.empty()) {
        std::vector<Coordinate> points;
        for (const auto* e : enemies) points.push_back(e->location);
        const auto groups = clusters(points, s_.cluster_linkage);
        if (groups.size() >= 2) {
          // Groups come out ordered by their closest member.
          const VisibleAgent& second = *enemies[groups[1].front()];
          const auto largest = std::max_element(
              me.composition.counts().begin(), me.composition.counts().end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
          const auto wanted = static_cast<std::int64_t>(std::llround(s_.fork_fraction * static_cast<double>(total)));
          const std::int64_t n = std::min(wanted, largest->second);
          if (n > 0) {
            ForkDirective f;
            f.next_action = "Initiate Skirmish";
            f.troop_type = largest->first;
            f.deployed = n;
            f.target_position = s_.bounds.clamp(approach(me.location, second.location, melee_stop));
            f.target_agent_id = second.id.str();
            f.remarks = "Detachment to engage the second enemy group";
            d.forks.push_back(std::move(f));
          }
        }
      }
    }
    if (!d.orders.empty() || !d.forks.empty()) return d;

    // Rule 5: offensive ranged-only forces still close to their weapon range.
    if (offensive) {
      const double stop = ranged_reach_m > 0.0 ? meters_to_units(ranged_reach_m) * 0.9 : melee_stop;
      d.orders.push_back(make_order(obs, "Reposition Forces",
                                    s_.bounds.clamp(approach(me.location, target.location, stop)), std::nullopt,
                                    "Advancing on the nearest enemy formation"));
      return d;
    }
  } else {
    // Rule 6: act on relayed intelligence.
    const VisibleAgent* best = nullptr;
    double best_d = 0.0;
    for (const auto& report : obs.relayed_intel) {
      for (const auto& v : report.agents) {
        if (v.side == me.side) continue;
        const double dd = distance(me.location, v.location);
        if (best == nullptr || dd < best_d || (dd == best_d && v.id < best->id)) {
          best = &v;
          best_d = dd;
        }
      }
    }
    if (best != nullptr) {
      d.orders.push_back(make_order(obs, "Reposition Forces",
                                    s_.bounds.clamp(approach(me.location, best->location, melee_stop)),
                                    std::nullopt, "Moving on an enemy position reported by our detachment"));
      return d;
    }
  }

  // Consolidate a weakened force with a nearby ally before digging in.
  const bool weakened = 2 * total < me.initial_total;
  if (weakened) {
    for (const auto* f : friends) {
      if (f->distance <= s_.merge_radius) {
        d.merge_with = f->id;
        break;
      }
    }
  }
  d.orders.push_back(make_order(obs, "Fortify Position", me.location, std::nullopt, "Holding and fortifying our ground"));
  return d;
}

}  // namespace battle
