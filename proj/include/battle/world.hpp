#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace battle {

/// One map unit is 10 yards.
inline constexpr double kMetersPerUnit = 9.144;

/// Length trimmed from each end of a sight line before testing occlusion, so
/// an observer standing inside or on the edge of a forest is not blinded by it.
inline constexpr double kSightEpsilon = 1e-6;

struct Coordinate {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

double distance(Coordinate a, Coordinate b);

/// Throws std::invalid_argument for negative input.
double units_to_meters(double units);
double meters_to_units(double meters);

/// Degrees clockwise from +y (map north), in [0, 360).
double bearing_degrees(Coordinate from, Coordinate to);

enum class FeatureKind { river, forest, village, hill, road, other };

std::string_view to_string(FeatureKind kind);
/// Case-insensitive; unknown names map to `other`.
FeatureKind parse_feature_kind(std::string_view name);

struct PolylineGeometry {
  std::vector<Coordinate> points;  // start, waypoints..., end
  double width = 2.0;              // full width; the buffer is width / 2 each side
};

struct PolygonGeometry {
  std::vector<Coordinate> vertices;
};

struct CircleGeometry {
  Coordinate center;
  double radius = 0.0;
};

using FeatureGeometry = std::variant<PolylineGeometry, PolygonGeometry, CircleGeometry>;

struct LandscapeFeature {
  std::string id;
  FeatureKind kind = FeatureKind::other;
  FeatureGeometry geometry;
  std::string description;
  std::string path_description;
  bool blocks_sight = false;
  double movement_factor = 1.0;  // 0 = impassable
};

struct Bounds {
  Coordinate min;
  Coordinate max;

  bool contains(Coordinate p) const;
  Coordinate clamp(Coordinate p) const;
  bool on_edge(Coordinate p, double tolerance = 1e-9) const;
};

/// Parameter interval [t0, t1] along a segment a + t (b - a), t in [0, 1].
struct Interval {
  double t0;
  double t1;
};

/// Parameter intervals where the segment lies inside the (closed) feature,
/// sorted and disjoint.
std::vector<Interval> inside_intervals(const LandscapeFeature& feature, Coordinate a, Coordinate b);

/// Closed containment.
bool contains(const LandscapeFeature& feature, Coordinate p);

/// Closest point of the feature's area to `p` (p itself when inside).
Coordinate nearest_point(const LandscapeFeature& feature, Coordinate p);

/// True when the segment, trimmed by kSightEpsilon at both ends, passes through
/// the feature's interior.
bool occludes(const LandscapeFeature& feature, Coordinate from, Coordinate to);

class WorldMap {
 public:
  WorldMap() = default;
  WorldMap(Bounds bounds, std::vector<LandscapeFeature> features, std::string origin_note);

  const Bounds& bounds() const { return bounds_; }
  const std::vector<LandscapeFeature>& features() const { return features_; }
  const std::string& origin_note() const { return origin_note_; }
  const LandscapeFeature* find(std::string_view id) const;

 private:
  Bounds bounds_{{-1000, -1000}, {1000, 1000}};
  std::vector<LandscapeFeature> features_;
  std::string origin_note_;
};

/// Throws std::out_of_range when either point is outside the map bounds.
bool line_of_sight(const WorldMap& world, Coordinate from, Coordinate to);

struct Sighting {
  std::string id;
  double distance = 0.0;  // map units
  double bearing = 0.0;   // degrees
};

using Candidate = std::pair<std::string, Coordinate>;

/// Candidates within `sight_range_m` and in line of sight, in input order.
std::vector<Sighting> visible_entities(const WorldMap& world, Coordinate observer,
                                       std::span<const Candidate> candidates,
                                       double sight_range_m);

/// Ids of features containing `p`, in map order.
std::vector<std::string> terrain_at(const WorldMap& world, Coordinate p);

/// Parses the `map` section of a scenario document (the section itself). Throws LoadError naming the
/// offending feature (or "bounds").
WorldMap load_map(const nlohmann::json& document);

}  // namespace battle
