#pragma once

// Randomized property suites shared by the unit tests and the acceptance
// binary. Each returns a list of human-readable violations; empty means pass.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "battle/actions.hpp"
#include "battle/agents.hpp"
#include "battle/casualty.hpp"
#include "battle/errors.hpp"
#include "battle/world.hpp"
#include "oracles.hpp"

namespace props {

using namespace battle;
using Violations = std::vector<std::string>;

/// Count and the first few entries, for failure messages.
inline std::string summary(const Violations& v) {
  std::string s = std::to_string(v.size()) + " violation(s)";
  for (std::size_t i = 0; i < v.size() && i < 5; ++i) s += "\n  " + v[i];
  return s;
}

// --- visibility ------------------------------------------------------------

/// Random world of circles, star-shaped (often concave) polygons and buffered
/// polylines on a 200 x 200 map.
inline WorldMap random_world(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> pos(-80, 80), size(3, 15), unit(0, 1);
  std::vector<LandscapeFeature> features;
  const int n = 2 + static_cast<int>(gen() % 5);
  for (int i = 0; i < n; ++i) {
    LandscapeFeature f;
    f.id = "F" + std::to_string(i);
    f.blocks_sight = unit(gen) < 0.8;
    const Coordinate c{pos(gen), pos(gen)};
    switch (gen() % 3) {
      case 0:
        f.kind = FeatureKind::village;
        f.geometry = CircleGeometry{c, size(gen)};
        break;
      case 1: {
        f.kind = FeatureKind::forest;
        const int k = 3 + static_cast<int>(gen() % 6);
        std::vector<Coordinate> v;
        for (int j = 0; j < k; ++j) {
          const double a = 2 * M_PI * (j + 0.3 * unit(gen)) / k;
          const double r = size(gen);
          v.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
        }
        f.geometry = PolygonGeometry{v};
        break;
      }
      default: {
        f.kind = FeatureKind::river;
        std::vector<Coordinate> pts{c};
        const int k = 1 + static_cast<int>(gen() % 3);
        for (int j = 0; j < k; ++j) pts.push_back({pts.back().x + size(gen) * 2 - 18, pts.back().y + size(gen) * 2 - 18});
        f.geometry = PolylineGeometry{pts, 1 + 5 * unit(gen)};
      }
    }
    features.push_back(std::move(f));
  }
  return WorldMap({{-100, -100}, {100, 100}}, std::move(features), "");
}

/// Analytic sight against 1,000 samples per segment, boundary tolerance 1e-6.
/// The library's own inside intervals are resampled as witness windows: a
/// "blocked" verdict must be confirmed by an oracle sample, a "clear" verdict
/// must survive every uniform sample.
inline Violations sight_oracle(std::uint64_t seed, int worlds, int segments_per_world) {
  Violations v;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> pos(-100, 100);
  for (int w = 0; w < worlds; ++w) {
    const WorldMap world = random_world(gen);
    for (int s = 0; s < segments_per_world; ++s) {
      const Coordinate a{pos(gen), pos(gen)}, b{pos(gen), pos(gen)};
      const bool clear = line_of_sight(world, a, b);
      std::vector<std::pair<double, double>> windows;
      for (const auto& f : world.features()) {
        if (!f.blocks_sight) continue;
        for (const auto& iv : inside_intervals(f, a, b)) windows.emplace_back(iv.t0, iv.t1);
      }
      const auto o = oracle::sample_sight(world, a, b, 1000, 1e-6, windows);
      const bool agree = clear ? !o.strict_blocked : o.loose_blocked;
      if (!agree) v.push_back("world " + std::to_string(w) + " segment " + std::to_string(s));
    }
  }
  return v;
}

// --- casualty model ---------------------------------------------------------

inline std::vector<const ActionKind*> offensive_kinds() {
  std::vector<const ActionKind*> out;
  for (const auto& k : catalog()) {
    if (k.offensive) out.push_back(&k);
  }
  return out;
}

inline EngagementContext random_context(std::mt19937_64& gen) {
  using K = TroopType::Kind;
  static const K kinds[] = {K::longbowman, K::man_at_arms, K::light_cavalry, K::heavy_cavalry, K::spearman,
                            K::hobelar,    K::crossbowman, K::infantry,      K::archer};
  static const auto offensive = offensive_kinds();
  std::uniform_real_distribution<double> unit(0, 1);
  auto army = [&] {
    ForceComposition c;
    for (K k : kinds) {
      if (gen() % 3 == 0) c.add(k, static_cast<std::int64_t>(gen() % 8000));
    }
    return c;
  };
  EngagementContext ctx;
  ctx.tick = static_cast<int>(gen() % 50);
  ctx.attacker.id = ArmyId("ARMY-00000001");
  ctx.attacker.side = "A";
  ctx.attacker.composition = army();
  ctx.attacker.morale_score = unit(gen);
  ctx.defender.id = ArmyId("ARMY-00000002");
  ctx.defender.side = "B";
  ctx.defender.composition = army();
  ctx.defender.morale_score = unit(gen);
  ctx.defender.fortified = gen() % 4 == 0;
  if (gen() % 4 == 0) ctx.defender.terrain.push_back({"Wood", FeatureKind::forest});
  if (gen() % 6 == 0) ctx.defender.terrain.push_back({"Hill", FeatureKind::hill});
  ctx.crosses_river = gen() % 4 == 0;
  ctx.kind = offensive[gen() % offensive.size()];
  ctx.distance = 40 * unit(gen) * unit(gen);  // map units, denser near contact
  return ctx;
}

/// The attrition formula evaluated term by term with unit noise.
inline oracle::ExpectedLosses closed_form(const EngagementContext& ctx, const CasualtyConfig& cfg) {
  const double meters = ctx.distance * 9.144;
  double raw = 0, weighted = 0;
  std::int64_t engaged = 0;
  bool melee = false;
  const bool forest = oracle::has_tag(ctx.defender, FeatureKind::forest);
  for (const auto& [type, n] : ctx.attacker.composition.counts()) {
    const WeaponStats* w = nullptr;
    if (auto it = cfg.troop_weapons.find(type); it != cfg.troop_weapons.end()) {
      for (const auto& x : cfg.weapons) {
        if (x.name == it->second) w = &x;
      }
    }
    if (w == nullptr) {
      for (const auto& x : cfg.weapons) {
        if (x.effective_range_m <= cfg.melee_radius_m) {
          w = &x;
          break;
        }
      }
    }
    if (w == nullptr) continue;
    const bool ranged = w->effective_range_m > cfg.melee_radius_m;
    if (!oracle::mode_admits(ctx.kind->mode, type, ranged)) continue;
    if (meters > (ranged ? w->effective_range_m : cfg.melee_radius_m)) continue;
    double site = 1;
    if (ranged && forest) site *= cfg.forest_ranged_factor;
    if (!ranged && type.is_cavalry() && ctx.crosses_river) site *= cfg.river_cavalry_factor;
    raw += n * w->attrition_coefficient;
    weighted += n * w->attrition_coefficient * site;
    engaged += n;
    melee = melee || !ranged;
  }
  const double intensity = ctx.kind->offensive ? ctx.kind->base_intensity : 0.0;
  oracle::ExpectedLosses out;
  if (engaged == 0 || raw == 0 || intensity == 0) return out;
  const double fort = ctx.defender.fortified ? cfg.fortified_factor : 1.0;
  const double counter = melee ? cfg.counter_melee : cfg.counter_ranged;
  const auto dt = ctx.defender.composition.total();
  const auto at = ctx.attacker.composition.total();
  const double dl = std::round(weighted * fort * intensity * (0.5 + ctx.attacker.morale_score));
  const double al = std::round(static_cast<double>(dt) * (raw / static_cast<double>(engaged)) * counter * intensity *
                               (0.5 + ctx.defender.morale_score));
  out.defender = std::clamp<std::int64_t>(static_cast<std::int64_t>(dl), 0, dt);
  out.attacker = std::clamp<std::int64_t>(static_cast<std::int64_t>(al), 0, at);
  return out;
}

/// Monotonicity, range gate, zero cases, clamping and the pinned-noise exact
/// match, over `cases` fuzzed contexts.
inline Violations casualty_properties(std::uint64_t seed, int cases) {
  Violations v;
  std::mt19937_64 gen(seed);
  const CasualtyConfig cfg = CasualtyConfig::defaults();
  double longest = 0;
  for (const auto& w : cfg.weapons) longest = std::max(longest, w.effective_range_m);
  auto fail = [&](int i, const std::string& what) { v.push_back("case " + std::to_string(i) + ": " + what); };

  for (int i = 0; i < cases; ++i) {
    const EngagementContext ctx = random_context(gen);
    const EngagementOutcome pinned = assess(ctx, cfg, nullptr);
    const auto expected = closed_form(ctx, cfg);
    if (pinned.defender_losses != expected.defender || pinned.attacker_losses != expected.attacker) {
      fail(i, "closed form mismatch");
    }

    // Clamping, with and without noise.
    Rng rng(seed + static_cast<std::uint64_t>(i));
    for (const auto& o : {pinned, assess(ctx, cfg, &rng)}) {
      if (o.defender_losses < 0 || o.defender_losses > ctx.defender.composition.total() || o.attacker_losses < 0 ||
          o.attacker_losses > ctx.attacker.composition.total()) {
        fail(i, "losses outside [0, total]");
      }
    }

    // Range gate: beyond every weapon nothing happens.
    EngagementContext far = ctx;
    far.distance = (longest + 1) / 9.144;
    const auto gated = assess(far, cfg, nullptr);
    if (gated.defender_losses != 0 || gated.attacker_losses != 0) fail(i, "range gate");

    // Zero cases.
    EngagementContext empty = ctx;
    empty.attacker.composition = {};
    const auto z = assess(empty, cfg, nullptr);
    if (z.defender_losses != 0 || z.attacker_losses != 0) fail(i, "empty attacker");
    EngagementContext nobody = ctx;
    nobody.defender.composition = {};
    const auto zd = assess(nobody, cfg, nullptr);
    if (zd.defender_losses != 0 || zd.attacker_losses != 0) fail(i, "empty defender");

    // Monotonicity in attacker strength, attacker morale, defender protection,
    // proximity and defender strength.
    EngagementContext more = ctx;
    for (const auto& [t, n] : ctx.attacker.composition.counts()) more.attacker.composition.add(t, 1 + n / 2);
    if (assess(more, cfg, nullptr).defender_losses < pinned.defender_losses) fail(i, "attacker strength");
    EngagementContext bold = ctx;
    bold.attacker.morale_score = std::min(1.0, ctx.attacker.morale_score + 0.25);
    if (assess(bold, cfg, nullptr).defender_losses < pinned.defender_losses) fail(i, "attacker morale");
    EngagementContext dug_in = ctx;
    dug_in.defender.fortified = true;
    if (assess(dug_in, cfg, nullptr).defender_losses > pinned.defender_losses) fail(i, "fortification");
    EngagementContext wooded = ctx;
    wooded.defender.terrain.push_back({"Wood", FeatureKind::forest});
    if (assess(wooded, cfg, nullptr).defender_losses > pinned.defender_losses) fail(i, "forest cover");
    EngagementContext closer = ctx;
    closer.distance = ctx.distance / 2;
    if (assess(closer, cfg, nullptr).defender_losses < pinned.defender_losses) fail(i, "proximity");
    EngagementContext bigger = ctx;
    for (const auto& [t, n] : ctx.defender.composition.counts()) bigger.defender.composition.add(t, 1 + n);
    if (assess(bigger, cfg, nullptr).attacker_losses < pinned.attacker_losses) fail(i, "defender strength");

    // Non-offensive kinds are rejected.
    EngagementContext idle = ctx;
    idle.kind = &action("Fortify Position");
    try {
      assess(idle, cfg, nullptr);
      fail(i, "non-offensive accepted");
    } catch (const std::invalid_argument&) {
    }
  }
  return v;
}

// --- topology ---------------------------------------------------------------

inline AgentState root_agent(const ArmyId& id, const std::string& side, ForceComposition c) {
  CommanderProfile p;
  p.identity = side;
  p.id = id;
  p.composition = std::move(c);
  return make_root_agent(p);
}

using Digest = std::vector<std::tuple<ArmyId, AgentStatus, std::int64_t, std::int64_t, std::int64_t, std::int64_t>>;

inline Digest digest(const std::map<ArmyId, AgentState>& table) {
  Digest d;
  for (const auto& [id, a] : table) {
    d.emplace_back(id, a.status, a.total(), a.cumulative_losses, a.forked_out, a.received_via_merge);
  }
  return d;
}

/// Random fork / merge / prune / loss sequences. Checks, after every step:
/// per-agent ledgers, per-side conservation over agents not folded into
/// another, a lineage forest (parents exist, same side, created no later,
/// acyclic), statuses only ever leaving `active`, and that rejected
/// operations leave the table untouched. Returns violations; `steps` counts
/// the cases run.
inline Violations topology_algebra(std::uint64_t seed, int sequences, int length, int& steps) {
  using K = TroopType::Kind;
  Violations v;
  std::mt19937_64 gen(seed);
  const K kinds[] = {K::longbowman, K::man_at_arms, K::heavy_cavalry, K::spearman};
  steps = 0;
  for (int run = 0; run < sequences; ++run) {
    IdIssuer ids(Rng(seed ^ static_cast<std::uint64_t>(run)));
    std::map<ArmyId, AgentState> table;
    std::map<std::string, std::int64_t> initial;
    for (const std::string side : {"A", "B"}) {
      ForceComposition c;
      for (K k : kinds) c.add(k, 1 + static_cast<std::int64_t>(gen() % 3000));
      AgentState a = root_agent(ids.issue(), side, c);
      initial[side] = c.total();
      table[a.id()] = a;
    }
    for (int step = 0; step < length; ++step, ++steps) {
      auto fail = [&](const std::string& what) {
        v.push_back("sequence " + std::to_string(run) + " step " + std::to_string(step) + ": " + what);
      };
      std::vector<ArmyId> keys;
      for (const auto& [id, a] : table) keys.push_back(id);
      const ArmyId pick = keys[gen() % keys.size()];
      const AgentState a = table.at(pick);
      const std::map<ArmyId, AgentState> before = table;
      const Digest before_digest = digest(table);
      bool rejected = false;
      switch (gen() % 4) {
        case 0: {
          std::vector<ForkRequest> req;
          for (const auto& [t, n] : a.composition.counts()) {
            if (gen() % 2) req.push_back({t, static_cast<std::int64_t>(gen() % (n + n / 4 + 2)), "", {}, {}});
          }
          try {
            ForkResult r = fork(a, req, ids, step);
            if (!a.active()) fail("fork of inactive agent accepted");
            std::map<TroopType, std::int64_t> asked;
            for (const auto& q : req) {
              if (q.count <= 0) fail("non-positive fork accepted");
              asked[q.troop_type] += q.count;
            }
            for (const auto& [t, n] : asked) {
              if (n > a.composition.count(t)) fail("over-allocation accepted");
            }
            table[pick] = r.parent;
            for (auto& c : r.children) {
              if (table.contains(c.id())) fail("duplicate child id");
              table[c.id()] = c;
            }
          } catch (const TopologyError&) {
            rejected = true;
          }
          break;
        }
        case 1: {
          const ArmyId other = keys[gen() % keys.size()];
          try {
            MergeResult m = merge(a, table.at(other), gen() % 3 ? 1e9 : 0.0);
            if (a.side() != table.at(other).side()) fail("cross-side merge accepted");
            table[m.merged.id()] = m.merged;
            table[m.absorbed.id()] = m.absorbed;
          } catch (const TopologyError&) {
            rejected = true;
          }
          break;
        }
        case 2: {
          if (gen() % 4) break;
          try {
            table[pick] = prune(a, gen() % 2 ? PruneReason::destroyed : PruneReason::retreated_off_map);
          } catch (const TopologyError&) {
            rejected = true;
            if (a.active()) fail("prune of active agent rejected");
          }
          break;
        }
        default: {
          if (!a.active()) break;
          AgentState& m = table.at(pick);
          m.cumulative_losses += m.composition.apply_losses(static_cast<std::int64_t>(gen() % 400)).total();
        }
      }
      if (rejected && digest(table) != before_digest) fail("rejected operation changed state");

      std::map<std::string, std::int64_t> sum;
      for (const auto& [id, x] : table) {
        if (!x.ledger_balanced()) fail("ledger of " + id.str());
        if (x.status != AgentStatus::merged) sum[x.side()] += x.total() + x.cumulative_losses;
        if (x.parent) {
          auto p = table.find(*x.parent);
          if (p == table.end()) {
            fail("dangling parent");
          } else if (p->second.created_tick > x.created_tick || p->second.side() != x.side()) {
            fail("parent created later or on another side");
          }
          // Walking up must reach a root within table-size steps.
          std::optional<ArmyId> cur = x.parent;
          std::size_t hops = 0;
          while (cur && hops <= table.size()) {
            auto it = table.find(*cur);
            cur = it == table.end() ? std::nullopt : it->second.parent;
            ++hops;
          }
          if (hops > table.size()) fail("lineage cycle");
        }
        if (auto it = before.find(id); it != before.end() && it->second.status != x.status &&
                                       !valid_transition(it->second.status, x.status)) {
          fail("invalid status transition");
        }
      }
      if (sum != initial) fail("side conservation");
    }
  }
  return v;
}

}  // namespace props
