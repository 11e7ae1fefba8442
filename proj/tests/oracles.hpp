#pragma once

// Reference implementations used only by tests. They share no code with the
// library: containment is recomputed from raw geometry, and the casualty
// formula is re-evaluated term by term.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "battle/casualty.hpp"
#include "battle/world.hpp"

namespace oracle {

using battle::Coordinate;

inline double dist(Coordinate a, Coordinate b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double dist_to_segment(Coordinate p, Coordinate a, Coordinate b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, {a.x + t * dx, a.y + t * dy});
}

/// Crossing-number test.
inline bool in_polygon(Coordinate p, const std::vector<Coordinate>& v) {
  bool in = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

/// Signed depth of `p` inside the feature: positive inside, negative outside,
/// zero on the boundary.
inline double depth(const battle::LandscapeFeature& f, Coordinate p) {
  if (const auto* c = std::get_if<battle::CircleGeometry>(&f.geometry)) return c->radius - dist(p, c->center);
  if (const auto* l = std::get_if<battle::PolylineGeometry>(&f.geometry)) {
    double d = INFINITY;
    for (std::size_t i = 0; i + 1 < l->points.size(); ++i) d = std::min(d, dist_to_segment(p, l->points[i], l->points[i + 1]));
    return l->width / 2 - d;
  }
  const auto& v = std::get<battle::PolygonGeometry>(f.geometry).vertices;
  double d = INFINITY;
  for (std::size_t i = 0; i < v.size(); ++i) d = std::min(d, dist_to_segment(p, v[i], v[(i + 1) % v.size()]));
  return in_polygon(p, v) ? d : -d;
}

/// Outcome of sampling a sight line: whether some sample lies inside a
/// blocking feature by more than `tol` (strict) or by more than -tol (loose).
struct SightSamples {
  bool strict_blocked = false;
  bool loose_blocked = false;
};

/// Samples `samples` evenly spaced points over the trimmed segment. Uniform
/// sampling cannot see a chord shorter than the spacing (a segment clipping a
/// polygon corner), so each `witness` window [t0, t1] is sampled again with
/// the same count. Windows only add sample points; every verdict still comes
/// from this file's own containment test.
inline SightSamples sample_sight(const battle::WorldMap& world, Coordinate a, Coordinate b, int samples = 1000,
                                 double tol = 1e-6, const std::vector<std::pair<double, double>>& witness = {}) {
  SightSamples out;
  const double len = dist(a, b);
  if (len <= 2 * battle::kSightEpsilon) return out;
  const double te = battle::kSightEpsilon / len;
  auto probe = [&](double t) {
    const Coordinate p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    for (const auto& f : world.features()) {
      if (!f.blocks_sight) continue;
      const double d = depth(f, p);
      if (d > tol) out.strict_blocked = true;
      if (d > -tol) out.loose_blocked = true;
    }
  };
  for (int k = 0; k < samples; ++k) probe(te + (1 - 2 * te) * (k + 0.5) / samples);
  for (auto [t0, t1] : witness) {
    t0 = std::max(t0, te);
    t1 = std::min(t1, 1 - te);
    for (int k = 0; k < samples && t0 < t1; ++k) probe(t0 + (t1 - t0) * (k + 0.5) / samples);
  }
  return out;
}

/// Term-by-term re-evaluation of the attrition formula with unit noise.
struct ExpectedLosses {
  std::int64_t attacker = 0;
  std::int64_t defender = 0;
};

inline bool mode_admits(battle::EngagementMode mode, const battle::TroopType& t, bool ranged) {
  using battle::EngagementMode;
  switch (mode) {
    case EngagementMode::none: return false;
    case EngagementMode::ranged: return ranged;
    case EngagementMode::cavalry: return t.is_cavalry();
    case EngagementMode::melee: return !ranged && !t.is_cavalry();
    case EngagementMode::combined: return true;
  }
  return false;
}

inline bool has_tag(const battle::CombatantSnapshot& c, battle::FeatureKind kind) {
  return std::any_of(c.terrain.begin(), c.terrain.end(), [&](const auto& t) { return t.kind == kind; });
}

}  // namespace oracle
