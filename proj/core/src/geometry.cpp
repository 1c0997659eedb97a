#include "nspf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>

#include "nspf/error.hpp"
#include "nspf/random.hpp"

namespace nspf {
namespace {

constexpr double kPi = std::numbers::pi;

std::string measure(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

struct Box {
  double x0, y0, x1, y1;
};

Box bounding_box(const std::vector<Point>& pts) {
  Box b{pts.front().x, pts.front().y, pts.front().x, pts.front().y};
  for (const auto& p : pts) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace

double signed_area(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  double twice = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& a = v[k];
    const auto& b = v[(k + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

std::vector<double> interior_angles_deg(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  if (n < 3) return out;
  const double orientation = signed_area(polygon) >= 0.0 ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point prev = v[(k + n - 1) % n];
    const Point cur = v[k];
    const Point next = v[(k + 1) % n];
    const double ax = cur.x - prev.x, ay = cur.y - prev.y;
    const double bx = next.x - cur.x, by = next.y - cur.y;
    // signed turning angle; interior = pi - turn for a counterclockwise walk
    const double turn = std::atan2(ax * by - ay * bx, ax * bx + ay * by) * orientation;
    out[k] = (kPi - turn) * 180.0 / kPi;
  }
  return out;
}

bool contains_point(const Polygon& polygon, Point p) {
  const auto& v = polygon.vertices;
  bool inside = false;
  for (std::size_t a = 0, b = v.size() - 1; a < v.size(); b = a++) {
    const bool crosses = (v[a].y > p.y) != (v[b].y > p.y);
    if (crosses) {
      const double x_at = v[b].x + (p.y - v[b].y) * (v[a].x - v[b].x) / (v[a].y - v[b].y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

std::vector<std::string> validate_geometry(const Polygon& polygon, const ChannelSpec& spec,
                                           const ObstacleLimits& limits) {
  std::vector<std::string> out;
  const auto& v = polygon.vertices;
  if (v.size() < 3) {
    out.push_back("vertex_count: " + std::to_string(v.size()) + " < 3");
    return out;
  }
  for (const auto& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      out.push_back("finite: vertex coordinates must be finite");
      return out;
    }
  }

  if (signed_area(polygon) <= 0.0) out.push_back("orientation: polygon is not counterclockwise");

  const auto angles = interior_angles_deg(polygon);
  const double min_angle = *std::min_element(angles.begin(), angles.end());
  if (min_angle < limits.min_angle_deg) {
    out.push_back("min_angle: " + measure(min_angle) + " < " + measure(limits.min_angle_deg));
  }

  // Star-shaped about the center: every edge seen counterclockwise from it.
  bool star = true;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (cross(polygon.center, v[k], v[(k + 1) % v.size()]) <= 0.0) {
      star = false;
      break;
    }
  }
  if (!star) out.push_back("star_shaped: boundary is not visible from the center");

  const Box box = bounding_box(v);
  const double clearance = std::min({box.x0, spec.width_m - box.x1, box.y0, spec.height_m - box.y1});
  if (clearance < limits.clearance) {
    out.push_back("clearance: " + measure(clearance) + " < " + measure(limits.clearance));
  }
  const double extent = std::max(box.x1 - box.x0, box.y1 - box.y0);
  const double max_extent = limits.max_extent_ratio * spec.height_m;
  if (extent > max_extent) {
    out.push_back("size: " + measure(extent) + " > " + measure(max_extent));
  }
  return out;
}

GeometryImage rasterize(const Polygon& polygon, const ChannelSpec& spec) {
  GeometryImage img(spec.res_w, spec.res_h, 1);
  if (polygon.vertices.size() < 3) return img;
  const Box box = bounding_box(polygon.vertices);
  const double h = spec.h();
  const int i0 = std::max(0, static_cast<int>(std::floor(box.x0 / h)) - 1);
  const int i1 = std::min(spec.res_w - 1, static_cast<int>(std::ceil(box.x1 / h)) + 1);
  const int j0 = std::max(0, static_cast<int>(std::floor(box.y0 / h)) - 1);
  const int j1 = std::min(spec.res_h - 1, static_cast<int>(std::ceil(box.y1 / h)) + 1);
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      if (contains_point(polygon, spec.pixel_center(i, j))) img(i, j) = 0;
    }
  }
  return img;
}

BoundaryImage encode_boundary(const GeometryImage& geom) {
  const int w = geom.width();
  const int h = geom.height();
  BoundaryImage bnd(w, h, code::interior);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      std::uint8_t c = code::interior;
      if (!geom.fluid(i, j) || j == 0 || j == h - 1) {
        c = code::wall;
      } else if (i == 0) {
        c = code::inflow;
      } else if (i == w - 1) {
        c = code::outflow;
      }
      bnd(i, j) = c;
    }
  }
  auto dirichlet = [&](int i, int j) { return bnd.contains(i, j) && code::velocity_dirichlet(bnd(i, j)); };
  for (int j = 1; j < h - 1; ++j) {
    for (int i = 1; i < w - 1; ++i) {
      if (bnd(i, j) != code::interior) continue;
      unsigned mask = 0;
      if (dirichlet(i - 1, j)) mask |= code::minus_x;
      if (dirichlet(i + 1, j)) mask |= code::plus_x;
      if (dirichlet(i, j - 1)) mask |= code::minus_y;
      if (dirichlet(i, j + 1)) mask |= code::plus_y;
      if (mask != 0) bnd(i, j) = code::from_mask(mask);
    }
  }
  return bnd;
}

std::size_t solid_pixel_count(const GeometryImage& geom) { return geom.size() - geom.fluid_count(); }

bool solid_region_connected(const GeometryImage& geom) {
  const int w = geom.width();
  const int h = geom.height();
  const std::size_t solids = solid_pixel_count(geom);
  if (solids == 0) return true;
  std::vector<std::uint8_t> seen(geom.size(), 0);
  std::queue<std::pair<int, int>> todo;
  for (int j = 0; j < h && todo.empty(); ++j) {
    for (int i = 0; i < w; ++i) {
      if (!geom.fluid(i, j)) {
        todo.emplace(i, j);
        seen[geom.index(i, j)] = 1;
        break;
      }
    }
  }
  std::size_t reached = 0;
  while (!todo.empty()) {
    auto [i, j] = todo.front();
    todo.pop();
    ++reached;
    const int di[] = {1, -1, 0, 0};
    const int dj[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      if (!geom.contains(a, b) || geom.fluid(a, b)) continue;
      auto& s = seen[geom.index(a, b)];
      if (s) continue;
      s = 1;
      todo.emplace(a, b);
    }
  }
  return reached == solids;
}

Polygon generate_star_polygon(std::uint64_t seed, int n_edges, const ChannelSpec& spec,
                              const StarPolygonOptions& options) {
  if (n_edges < 3) throw ValidationError("n_edges must be >= 3, got " + std::to_string(n_edges));
  Rng rng(seed);
  const auto& lim = options.limits;
  const double max_extent = lim.max_extent_ratio * spec.height_m;
  std::vector<double> angles(static_cast<std::size_t>(n_edges));
  std::vector<Point> rel(static_cast<std::size_t>(n_edges));

  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    for (auto& a : angles) a = rng.uniform(0.0, 2.0 * kPi);
    std::sort(angles.begin(), angles.end());
    for (std::size_t k = 0; k < rel.size(); ++k) {
      const double r = rng.uniform(options.min_radius, options.max_radius);
      rel[k] = {r * std::cos(angles[k]), r * std::sin(angles[k])};
    }
    const double cx_u = rng.uniform();
    const double cy_u = rng.uniform();

    const Box box = bounding_box(rel);
    if (box.x1 - box.x0 > max_extent || box.y1 - box.y0 > max_extent) continue;
    const double cx_lo = lim.clearance - box.x0, cx_hi = spec.width_m - lim.clearance - box.x1;
    const double cy_lo = lim.clearance - box.y0, cy_hi = spec.height_m - lim.clearance - box.y1;
    if (cx_lo > cx_hi || cy_lo > cy_hi) continue;

    Polygon poly;
    poly.center = {cx_lo + (cx_hi - cx_lo) * cx_u, cy_lo + (cy_hi - cy_lo) * cy_u};
    poly.vertices.reserve(rel.size());
    for (const auto& p : rel) poly.vertices.push_back({poly.center.x + p.x, poly.center.y + p.y});

    if (!validate_geometry(poly, spec, lim).empty()) continue;
    const GeometryImage img = rasterize(poly, spec);
    if (solid_pixel_count(img) == 0 || !solid_region_connected(img)) continue;
    return poly;
  }
  throw ValidationError("constraints unsatisfiable: no valid " + std::to_string(n_edges) +
                        "-gon after " + std::to_string(options.max_attempts) + " attempts");
}

std::string to_string(ObstacleKind kind) {
  switch (kind) {
    case ObstacleKind::circle: return "circle";
    case ObstacleKind::ellipse: return "ellipse";
    case ObstacleKind::flower: return "flower";
  }
  return "unknown";
}

ObstacleKind obstacle_kind_from_string(const std::string& name) {
  if (name == "circle") return ObstacleKind::circle;
  if (name == "ellipse") return ObstacleKind::ellipse;
  if (name == "flower") return ObstacleKind::flower;
  throw ValidationError("unknown obstacle kind '" + name + "'");
}

Polygon generate_parametric_obstacle(const ParametricObstacle& obstacle, int n_segments,
                                     const ChannelSpec& spec, const ObstacleLimits& limits) {
  if (n_segments < 3) throw ValidationError("n_segments must be >= 3");
  Polygon poly;
  poly.center = obstacle.center;
  poly.vertices.reserve(static_cast<std::size_t>(n_segments));
  for (int k = 0; k < n_segments; ++k) {
    const double t = 2.0 * kPi * k / n_segments;
    double rx = 0.0, ry = 0.0;
    switch (obstacle.kind) {
      case ObstacleKind::circle:
        rx = ry = obstacle.radius;
        break;
      case ObstacleKind::ellipse:
        rx = obstacle.radius_x;
        ry = obstacle.radius_y;
        break;
      case ObstacleKind::flower:
        rx = ry = obstacle.radius + obstacle.amplitude * std::cos(obstacle.lobes * t);
        break;
    }
    poly.vertices.push_back({obstacle.center.x + rx * std::cos(t), obstacle.center.y + ry * std::sin(t)});
  }
  auto problems = validate_geometry(poly, spec, limits);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return poly;
}

}  // namespace nspf
