#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nspf/grid.hpp"

namespace nspf {

/// Obstacle boundary, counterclockwise, star-shaped with respect to `center`.
struct Polygon {
  Point center;
  std::vector<Point> vertices;

  bool operator==(const Polygon&) const = default;
};

/// Placement rules for obstacles inside the channel.
struct ObstacleLimits {
  double clearance = 0.75;      // minimum distance to every channel side
  double max_extent_ratio = 0.5;  // bounding box side <= ratio * channel height
  double min_angle_deg = 10.0;

  bool operator==(const ObstacleLimits&) const = default;
};

struct StarPolygonOptions {
  double min_radius = 0.15;
  double max_radius = 0.75;
  int max_attempts = 10000;
  ObstacleLimits limits;

  bool operator==(const StarPolygonOptions&) const = default;
};

/// Samples a star-shaped polygon with `n_edges` vertices. Deterministic in
/// (seed, n_edges). Candidates are rejected until the polygon satisfies all
/// placement rules and rasterizes to a non-empty, 4-connected obstacle.
Polygon generate_star_polygon(std::uint64_t seed, int n_edges, const ChannelSpec& spec,
                              const StarPolygonOptions& options = {});

enum class ObstacleKind { circle, ellipse, flower };

std::string to_string(ObstacleKind kind);
ObstacleKind obstacle_kind_from_string(const std::string& name);

struct ParametricObstacle {
  ObstacleKind kind = ObstacleKind::circle;
  Point center{3.0, 1.5};
  double radius = 0.4;      // circle radius; flower base radius r0
  double radius_x = 0.45;   // ellipse
  double radius_y = 0.25;   // ellipse
  double amplitude = 0.1;   // flower: r(t) = radius + amplitude * cos(lobes * t)
  int lobes = 5;

  bool operator==(const ParametricObstacle&) const = default;
};

/// Polyline approximation of a parametric obstacle with `n_segments` vertices.
/// Throws ValidationError listing violated placement rules.
Polygon generate_parametric_obstacle(const ParametricObstacle& obstacle, int n_segments = 256,
                                     const ChannelSpec& spec = {}, const ObstacleLimits& limits = {});

/// Every violated invariant as "<constraint>: <measure> <op> <limit>". Empty
/// iff the polygon is a valid obstacle.
std::vector<std::string> validate_geometry(const Polygon& polygon, const ChannelSpec& spec,
                                           const ObstacleLimits& limits = {});

/// Interior angle at every vertex, in degrees.
std::vector<double> interior_angles_deg(const Polygon& polygon);
double signed_area(const Polygon& polygon);

/// Even-odd point-in-polygon test.
bool contains_point(const Polygon& polygon, Point p);

/// Pixel is 0 iff its center lies inside the polygon.
GeometryImage rasterize(const Polygon& polygon, const ChannelSpec& spec);

/// Inflow column 1, top/bottom rows and solid pixels 2, outflow column 3,
/// remaining fluid pixels 0, or a one-sided code if an orthogonal neighbor is
/// a velocity-Dirichlet pixel (code 1 or 2).
BoundaryImage encode_boundary(const GeometryImage& geom);

/// True if the solid pixels form a single 4-connected region (or none).
bool solid_region_connected(const GeometryImage& geom);
std::size_t solid_pixel_count(const GeometryImage& geom);

}  // namespace nspf
