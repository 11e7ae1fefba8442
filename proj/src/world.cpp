#include "battle/world.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>

#include "battle/errors.hpp"

namespace battle {

namespace {

struct Vec {
  double x, y;
};

Vec operator-(Coordinate a, Coordinate b) { return {a.x - b.x, a.y - b.y}; }
Coordinate operator+(Coordinate a, Vec v) { return {a.x + v.x, a.y + v.y}; }
Vec operator*(Vec v, double s) { return {v.x * s, v.y * s}; }
double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y; }
double cross(Vec a, Vec b) { return a.x * b.y - a.y * b.x; }
double norm(Vec v) { return std::hypot(v.x, v.y); }

Coordinate lerp(Coordinate a, Coordinate b, double t) { return a + (b - a) * t; }

Coordinate closest_on_segment(Coordinate p, Coordinate a, Coordinate b) {
  const Vec d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return a + d * t;
}

double distance_to_segment(Coordinate p, Coordinate a, Coordinate b) {
  return distance(p, closest_on_segment(p, a, b));
}

bool on_polygon_boundary(const std::vector<Coordinate>& v, Coordinate p, double tol) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (distance_to_segment(p, v[i], v[(i + 1) % v.size()]) <= tol) return true;
  }
  return false;
}

// Even-odd ray cast; boundary points are classified arbitrarily.
bool ray_cast_inside(const std::vector<Coordinate>& v, Coordinate p) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Coordinate& a = v[i];
    const Coordinate& b = v[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool polygon_interior(const std::vector<Coordinate>& v, Coordinate p) {
  return !on_polygon_boundary(v, p, 1e-12) && ray_cast_inside(v, p);
}

std::vector<Interval> merge_intervals(std::vector<Interval> in) {
  std::sort(in.begin(), in.end(), [](const Interval& l, const Interval& r) { return l.t0 < r.t0; });
  std::vector<Interval> out;
  for (const Interval& iv : in) {
    if (!out.empty() && iv.t0 <= out.back().t1) {
      out.back().t1 = std::max(out.back().t1, iv.t1);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

std::vector<Interval> circle_intervals(Coordinate c, double r, Coordinate a, Coordinate b) {
  const Vec d = b - a;
  const Vec f = a - c;
  const double qa = dot(d, d);
  if (qa == 0.0) {
    if (norm(f) < r) return {{0.0, 1.0}};
    return {};
  }
  const double qb = 2.0 * dot(f, d);
  const double qc = dot(f, f) - r * r;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0) return {};
  const double s = std::sqrt(disc);
  const double t0 = std::max(0.0, (-qb - s) / (2.0 * qa));
  const double t1 = std::min(1.0, (-qb + s) / (2.0 * qa));
  if (t0 >= t1) return {};
  return {{t0, t1}};
}

std::vector<Interval> polygon_intervals(const std::vector<Coordinate>& v, Coordinate a, Coordinate b) {
  const Vec d = b - a;
  if (dot(d, d) == 0.0) {
    if (polygon_interior(v, a)) return {{0.0, 1.0}};
    return {};
  }
  std::vector<double> ts{0.0, 1.0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Coordinate p = v[i];
    const Vec e = v[(i + 1) % v.size()] - p;
    const double denom = cross(d, e);
    const Vec ap = p - a;
    if (std::abs(denom) < 1e-15 * norm(d) * norm(e)) {
      // Parallel: only collinear edges matter, and only their endpoints.
      if (std::abs(cross(ap, d)) <= 1e-12 * norm(d) * std::max(1.0, norm(ap))) {
        const double dd = dot(d, d);
        for (Coordinate q : {p, v[(i + 1) % v.size()]}) {
          const double t = dot(q - a, d) / dd;
          if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
      }
      continue;
    }
    const double t = cross(ap, e) / denom;
    const double s = cross(ap, d) / denom;
    if (s >= 0.0 && s <= 1.0 && t > 0.0 && t < 1.0) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] <= 0.0) continue;
    if (polygon_interior(v, lerp(a, b, 0.5 * (ts[i] + ts[i + 1])))) out.push_back({ts[i], ts[i + 1]});
  }
  return merge_intervals(std::move(out));
}

std::vector<Interval> polyline_intervals(const PolylineGeometry& g, Coordinate a, Coordinate b) {
  const double h = 0.5 * g.width;
  std::vector<Interval> all;
  for (const Coordinate& p : g.points) {
    auto iv = circle_intervals(p, h, a, b);
    all.insert(all.end(), iv.begin(), iv.end());
  }
  for (std::size_t i = 0; i + 1 < g.points.size(); ++i) {
    const Coordinate p = g.points[i];
    const Coordinate q = g.points[i + 1];
    const Vec d = q - p;
    const double len = norm(d);
    if (len == 0.0) continue;
    const Vec n{-d.y / len * h, d.x / len * h};
    const std::vector<Coordinate> rect{p + n, q + n, q + n * -1.0, p + n * -1.0};
    auto iv = polygon_intervals(rect, a, b);
    all.insert(all.end(), iv.begin(), iv.end());
  }
  return merge_intervals(std::move(all));
}

double polyline_distance(const PolylineGeometry& g, Coordinate p, Coordinate* closest = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < g.points.size(); ++i) {
    const Coordinate c = closest_on_segment(p, g.points[i], g.points[i + 1]);
    const double d = distance(p, c);
    if (d < best) {
      best = d;
      if (closest) *closest = c;
    }
  }
  return best;
}

bool clear_sight(const WorldMap& world, Coordinate from, Coordinate to) {
  for (const LandscapeFeature& f : world.features()) {
    if (f.blocks_sight && occludes(f, from, to)) return false;
  }
  return true;
}

// --- loading -------------------------------------------------------------

Coordinate parse_point(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw LoadError(where, "expected a coordinate [x, y]");
  }
  const Coordinate c{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(c.x) || !std::isfinite(c.y)) throw LoadError(where, "non-finite coordinate");
  return c;
}

double polygon_area(const std::vector<Coordinate>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Coordinate& p = v[i];
    const Coordinate& q = v[(i + 1) % v.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(a);
}

bool default_blocks_sight(FeatureKind k) { return k == FeatureKind::forest || k == FeatureKind::village; }

double default_movement_factor(FeatureKind k) {
  switch (k) {
    case FeatureKind::river: return 0.0;
    case FeatureKind::forest: return 0.5;
    case FeatureKind::village: return 0.5;
    case FeatureKind::hill: return 0.75;
    case FeatureKind::road:
    case FeatureKind::other: return 1.0;
  }
  return 1.0;
}

LandscapeFeature parse_feature(const nlohmann::json& j, const std::set<FeatureKind>& impassable) {
  if (!j.is_object()) throw LoadError("features", "feature entries must be objects");
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
    throw LoadError("features", "feature without a string id");
  }
  LandscapeFeature f;
  f.id = j["id"].get<std::string>();
  const std::string& where = f.id;

  if (j.contains("properties") && j["properties"].contains("type")) {
    f.kind = parse_feature_kind(j["properties"]["type"].get<std::string>());
  }
  f.description = j.value("description", "");
  f.blocks_sight = j.value("blocks_sight", default_blocks_sight(f.kind));
  f.movement_factor = j.value("movement_factor", default_movement_factor(f.kind));
  if (!(f.movement_factor >= 0.0) || !std::isfinite(f.movement_factor)) {
    throw LoadError(where, "movement_factor must be a finite value >= 0");
  }
  if (f.movement_factor == 0.0 && !impassable.contains(f.kind)) {
    throw LoadError(where, "movement_factor 0 is reserved for impassable kinds");
  }

  const bool has_path = j.contains("path");
  const bool has_region = j.contains("region");
  if (has_path == has_region) throw LoadError(where, "feature needs exactly one of `path` or `region`");

  if (has_path) {
    const auto& p = j["path"];
    if (!p.contains("start") || !p.contains("end")) throw LoadError(where, "path needs start and end");
    PolylineGeometry g;
    g.points.push_back(parse_point(p["start"], where));
    if (p.contains("waypoints")) {
      for (const auto& w : p["waypoints"]) g.points.push_back(parse_point(w, where));
    }
    g.points.push_back(parse_point(p["end"], where));
    g.width = j.value("width", 2.0);
    if (!(g.width > 0.0)) throw LoadError(where, "path width must be positive");
    std::set<std::pair<double, double>> distinct;
    for (const auto& c : g.points) distinct.insert({c.x, c.y});
    if (distinct.size() < 2) throw LoadError(where, "degenerate path: needs two distinct points");
    f.path_description = p.value("description", "");
    f.geometry = std::move(g);
  } else {
    const auto& r = j["region"];
    if (r.contains("polygon")) {
      PolygonGeometry g;
      for (const auto& v : r["polygon"]) g.vertices.push_back(parse_point(v, where));
      if (g.vertices.size() < 3 || polygon_area(g.vertices) <= 0.0) {
        throw LoadError(where, "degenerate polygon: needs positive area");
      }
      f.geometry = std::move(g);
    } else if (r.contains("center") && r.contains("radius")) {
      CircleGeometry g{parse_point(r["center"], where), r["radius"].get<double>()};
      if (!(g.radius > 0.0)) throw LoadError(where, "degenerate circle: radius must be positive");
      f.geometry = g;
    } else {
      throw LoadError(where, "region needs `polygon` or `center` + `radius`");
    }
  }
  return f;
}

}  // namespace

double distance(Coordinate a, Coordinate b) { return std::hypot(a.x - b.x, a.y - b.y); }

double units_to_meters(double units) {
  if (units < 0.0) throw std::invalid_argument("units_to_meters: negative distance");
  return units * kMetersPerUnit;
}

double meters_to_units(double meters) {
  if (meters < 0.0) throw std::invalid_argument("meters_to_units: negative distance");
  return meters / kMetersPerUnit;
}

double bearing_degrees(Coordinate from, Coordinate to) {
  if (from == to) return 0.0;
  double deg = std::atan2(to.x - from.x, to.y - from.y) * 180.0 / M_PI;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::river: return "river";
    case FeatureKind::forest: return "forest";
    case FeatureKind::village: return "village";
    case FeatureKind::hill: return "hill";
    case FeatureKind::road: return "road";
    case FeatureKind::other: return "other";
  }
  return "other";
}

FeatureKind parse_feature_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (FeatureKind k : {FeatureKind::river, FeatureKind::forest, FeatureKind::village, FeatureKind::hill,
                        FeatureKind::road}) {
    if (s == to_string(k)) return k;
  }
  return FeatureKind::other;
}

bool Bounds::contains(Coordinate p) const {
  return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
}

Coordinate Bounds::clamp(Coordinate p) const {
  return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
}

bool Bounds::on_edge(Coordinate p, double tolerance) const {
  return contains(p) && (std::abs(p.x - min.x) <= tolerance || std::abs(p.x - max.x) <= tolerance ||
                         std::abs(p.y - min.y) <= tolerance || std::abs(p.y - max.y) <= tolerance);
}

std::vector<Interval> inside_intervals(const LandscapeFeature& feature, Coordinate a, Coordinate b) {
  return std::visit(
      [&](const auto& g) -> std::vector<Interval> {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, CircleGeometry>) {
          return circle_intervals(g.center, g.radius, a, b);
        } else if constexpr (std::is_same_v<G, PolygonGeometry>) {
          return polygon_intervals(g.vertices, a, b);
        } else {
          return polyline_intervals(g, a, b);
        }
      },
      feature.geometry);
}

bool contains(const LandscapeFeature& feature, Coordinate p) {
  return std::visit(
      [&](const auto& g) -> bool {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, CircleGeometry>) {
          return distance(p, g.center) <= g.radius;
        } else if constexpr (std::is_same_v<G, PolygonGeometry>) {
          return on_polygon_boundary(g.vertices, p, 1e-12) || ray_cast_inside(g.vertices, p);
        } else {
          return polyline_distance(g, p) <= 0.5 * g.width;
        }
      },
      feature.geometry);
}

Coordinate nearest_point(const LandscapeFeature& feature, Coordinate p) {
  if (contains(feature, p)) return p;
  return std::visit(
      [&](const auto& g) -> Coordinate {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, CircleGeometry>) {
          return g.center + (p - g.center) * (g.radius / distance(p, g.center));
        } else if constexpr (std::is_same_v<G, PolygonGeometry>) {
          Coordinate best = g.vertices.front();
          double best_d = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < g.vertices.size(); ++i) {
            const Coordinate c = closest_on_segment(p, g.vertices[i], g.vertices[(i + 1) % g.vertices.size()]);
            if (distance(p, c) < best_d) {
              best_d = distance(p, c);
              best = c;
            }
          }
          return best;
        } else {
          Coordinate c = g.points.front();
          const double d = polyline_distance(g, p, &c);
          return c + (p - c) * (0.5 * g.width / d);
        }
      },
      feature.geometry);
}

bool occludes(const LandscapeFeature& feature, Coordinate from, Coordinate to) {
  const double len = distance(from, to);
  if (len <= 2.0 * kSightEpsilon) return false;
  const double te = kSightEpsilon / len;
  for (const Interval& iv : inside_intervals(feature, from, to)) {
    if (std::max(iv.t0, te) < std::min(iv.t1, 1.0 - te)) return true;
  }
  return false;
}

WorldMap::WorldMap(Bounds bounds, std::vector<LandscapeFeature> features, std::string origin_note)
    : bounds_(bounds), features_(std::move(features)), origin_note_(std::move(origin_note)) {}

const LandscapeFeature* WorldMap::find(std::string_view id) const {
  for (const auto& f : features_) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

bool line_of_sight(const WorldMap& world, Coordinate from, Coordinate to) {
  if (!world.bounds().contains(from) || !world.bounds().contains(to)) {
    throw std::out_of_range("line_of_sight: point outside map bounds");
  }
  return clear_sight(world, from, to);
}

std::vector<Sighting> visible_entities(const WorldMap& world, Coordinate observer,
                                       std::span<const Candidate> candidates, double sight_range_m) {
  if (!(sight_range_m > 0.0)) throw std::invalid_argument("visible_entities: sight range must be positive");
  const double range = meters_to_units(sight_range_m);
  std::vector<Sighting> out;
  for (const auto& [id, pos] : candidates) {
    const double d = distance(observer, pos);
    if (d <= range && clear_sight(world, observer, pos)) {
      out.push_back({id, d, bearing_degrees(observer, pos)});
    }
  }
  return out;
}

std::vector<std::string> terrain_at(const WorldMap& world, Coordinate p) {
  std::vector<std::string> out;
  for (const auto& f : world.features()) {
    if (contains(f, p)) out.push_back(f.id);
  }
  return out;
}

WorldMap load_map(const nlohmann::json& document) {
  if (!document.is_object()) throw LoadError("map", "map section must be an object");
  if (!document.contains("bounds")) throw LoadError("bounds", "missing bounds");
  const auto& b = document["bounds"];
  if (!b.contains("min") || !b.contains("max")) throw LoadError("bounds", "bounds need min and max");
  const Bounds bounds{parse_point(b["min"], "bounds"), parse_point(b["max"], "bounds")};
  if (!(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y)) {
    throw LoadError("bounds", "min must be strictly below max");
  }
  if (!bounds.contains({0.0, 0.0})) throw LoadError("bounds", "origin (0,0) must lie inside bounds");

  std::set<FeatureKind> impassable{FeatureKind::river};
  if (document.contains("impassable_kinds")) {
    impassable.clear();
    for (const auto& k : document["impassable_kinds"]) impassable.insert(parse_feature_kind(k.get<std::string>()));
  }

  std::vector<LandscapeFeature> features;
  std::set<std::string> ids;
  if (document.contains("features")) {
    if (!document["features"].is_array()) throw LoadError("features", "features must be an array");
    for (const auto& fj : document["features"]) {
      try {
        LandscapeFeature f = parse_feature(fj, impassable);
        if (!ids.insert(f.id).second) throw LoadError(f.id, "duplicate feature id");
        features.push_back(std::move(f));
      } catch (const nlohmann::json::exception& e) {
        throw LoadError(fj.is_object() ? fj.value("id", std::string("features")) : "features", e.what());
      }
    }
  }
  return WorldMap(bounds, std::move(features), document.value("origin_note", ""));
}

}  // namespace battle
