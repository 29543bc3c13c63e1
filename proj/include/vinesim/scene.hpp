#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "vinesim/common.hpp"

namespace vinesim {

/// Planar environments: circular and convex-polygon obstacles with exact
/// signed distances (negative inside), a start pose, a circular goal region
/// and a rectangular workspace. Scenes are immutable once validated.

struct Circle {
  Vec2 center;
  double radius = 0;
};

struct ConvexPolygon {
  std::vector<Vec2> vertices;  // CCW

  Vec2 centroid() const {
    Vec2 c{0, 0};
    for (auto& v : vertices) c = c + v;
    return c * (1.0 / double(vertices.size()));
  }
};

struct Obstacle {
  std::variant<Circle, ConvexPolygon> shape;

  bool is_circle() const { return std::holds_alternative<Circle>(shape); }

  /// Signed distance, negative inside. Exact for both shapes.
  double sdf(Vec2 p) const {
    if (auto* c = std::get_if<Circle>(&shape)) return (p - c->center).norm() - c->radius;
    const auto& poly = std::get<ConvexPolygon>(shape).vertices;
    double min_edge = 1e300;
    bool inside = true;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 a = poly[i], b = poly[(i + 1) % n];
      Vec2 e = b - a, d = p - a;
      if (e.cross(d) < 0) inside = false;  // CCW: inside means left of every edge
      double t = clamp(d.dot(e) / e.norm2(), 0.0, 1.0);
      min_edge = std::min(min_edge, (d - e * t).norm());
    }
    return inside ? -min_edge : min_edge;
  }

  /// Gradient of the signed distance (unit outward direction a.e.).
  Vec2 sdf_gradient(Vec2 p) const {
    if (auto* c = std::get_if<Circle>(&shape)) {
      Vec2 d = p - c->center;
      double n = d.norm();
      return n > 1e-12 ? d * (1.0 / n) : Vec2{1, 0};
    }
    const auto& poly = std::get<ConvexPolygon>(shape).vertices;
    size_t n = poly.size();
    double best = 1e300;
    Vec2 best_dir{1, 0};
    bool inside = true;
    for (size_t i = 0; i < n; ++i) {
      Vec2 a = poly[i], b = poly[(i + 1) % n];
      Vec2 e = b - a, d = p - a;
      if (e.cross(d) < 0) inside = false;
      double t = clamp(d.dot(e) / e.norm2(), 0.0, 1.0);
      Vec2 diff = d - e * t;
      double dist = diff.norm();
      if (dist < best) {
        best = dist;
        if (dist > 1e-12) {
          best_dir = diff * (1.0 / dist);
        } else {
          best_dir = Vec2{-e.y, e.x}.normalized() * -1.0;  // outward edge normal
        }
      }
    }
    return inside ? -best_dir : best_dir;
  }

  /// Loose axis-aligned bounding box, for culling.
  void aabb(Vec2& lo, Vec2& hi) const {
    if (auto* c = std::get_if<Circle>(&shape)) {
      lo = {c->center.x - c->radius, c->center.y - c->radius};
      hi = {c->center.x + c->radius, c->center.y + c->radius};
      return;
    }
    const auto& poly = std::get<ConvexPolygon>(shape).vertices;
    lo = {1e300, 1e300};
    hi = {-1e300, -1e300};
    for (auto& v : poly) {
      lo.x = std::min(lo.x, v.x);
      lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x);
      hi.y = std::max(hi.y, v.y);
    }
  }
};

struct GoalRegion {
  Vec2 center;
  double radius = 0;
};

struct Bounds {
  Vec2 lo;
  Vec2 hi;

  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  double diagonal() const { return (hi - lo).norm(); }
};

struct Scene {
  std::string name;
  std::vector<Obstacle> obstacles;
  Pose2 start;
  GoalRegion goal;
  Bounds bounds;

  void validate() const {
    if (!bounds.contains(goal.center)) throw DomainError("scene: goal outside bounds");
    if (!bounds.contains(start.position())) throw DomainError("scene: start outside bounds");
    for (auto& ob : obstacles) {
      if (ob.sdf(start.position()) <= 0.0)
        throw DomainError("scene: start pose inside an obstacle");
      if (auto* c = std::get_if<Circle>(&ob.shape)) {
        if (!(c->radius > 0)) throw DomainError("scene: circle radius must be positive");
      } else {
        const auto& poly = std::get<ConvexPolygon>(ob.shape).vertices;
        if (poly.size() < 3) throw DomainError("scene: polygon needs >= 3 vertices");
        size_t n = poly.size();
        for (size_t i = 0; i < n; ++i) {
          Vec2 a = poly[i], b = poly[(i + 1) % n], c2 = poly[(i + 2) % n];
          if ((b - a).cross(c2 - b) < -1e-12)
            throw DomainError("scene: polygon must be convex and CCW");
        }
      }
    }
  }

  double sdf(Vec2 p) const {
    double d = 1e300;
    for (auto& ob : obstacles) d = std::min(d, ob.sdf(p));
    return d;
  }
};

/// Tip-in-goal test; the goal disc is closed (boundary counts as reached).
inline bool goal_reached(Vec2 tip, const Scene& scene) {
  if (!scene.bounds.contains(tip)) return false;
  return (tip - scene.goal.center).norm() <= scene.goal.radius;
}

// ---------------------------------------------------------------------------
// benchmark environments

namespace detail {

inline Obstacle rect(double x0, double y0, double x1, double y1) {
  return Obstacle{ConvexPolygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}};
}

}  // namespace detail

/// Six benchmark environments. All geometry is proportional to `scale`
/// (workspace is [0, scale] x [0, scale]); the vine itself keeps its physical
/// radius, so `scale` should stay near the default 2 m for the default
/// actuator catalog (minimum turn radius ~0.45 m).
inline Scene make_env(const std::string& name, double scale = 2.0) {
  using detail::rect;
  if (!(scale > 0)) throw DomainError("make_env: scale must be positive");
  const double s = scale;
  Scene sc;
  sc.name = name;
  sc.bounds = {{0, 0}, {s, s}};
  sc.start = {0.5 * s, 0.04 * s, kPi / 2};

  if (name == "tube") {
    // minimal environment: a straight channel; the goal sits past the exit,
    // offset sideways so the optimum needs one gentle curved section
    sc.obstacles.push_back(rect(0.28 * s, 0.05 * s, 0.38 * s, 0.60 * s));
    sc.obstacles.push_back(rect(0.62 * s, 0.05 * s, 0.72 * s, 0.60 * s));
    sc.goal = {{0.67 * s, 0.88 * s}, 0.09 * s};
  } else if (name == "plus") {
    // uniform 3x3 grid of plus-shaped obstacles (each one = two crossed bars)
    for (int gx = 0; gx < 3; ++gx) {
      for (int gy = 0; gy < 3; ++gy) {
        double cx = (0.25 + 0.25 * gx) * s;
        double cy = (0.30 + 0.22 * gy) * s;
        double half = 0.085 * s, thick = 0.025 * s;
        sc.obstacles.push_back(rect(cx - half, cy - thick, cx + half, cy + thick));
        sc.obstacles.push_back(rect(cx - thick, cy - half, cx + thick, cy + half));
      }
    }
    sc.goal = {{0.5 * s, 0.92 * s}, 0.07 * s};
  } else if (name == "maze") {
    // S-shaped corridor with dead-end stubs
    sc.obstacles.push_back(rect(0.00 * s, 0.28 * s, 0.62 * s, 0.34 * s));
    sc.obstacles.push_back(rect(0.38 * s, 0.58 * s, 1.00 * s, 0.64 * s));
    sc.obstacles.push_back(rect(0.00 * s, 0.58 * s, 0.18 * s, 0.64 * s));   // dead-end lip
    sc.obstacles.push_back(rect(0.50 * s, 0.80 * s, 0.56 * s, 1.00 * s));   // top divider
    sc.start = {0.20 * s, 0.04 * s, kPi / 2};
    sc.goal = {{0.24 * s, 0.90 * s}, 0.08 * s};
  } else if (name == "pickone") {
    // four congruent corridors; only the third connects to the goal chamber
    double wall_w = 0.02 * s;
    double xs[3] = {0.305 * s, 0.50 * s, 0.695 * s};
    for (double x : xs) sc.obstacles.push_back(rect(x - wall_w, 0.30 * s, x + wall_w, 0.72 * s));
    sc.obstacles.push_back(rect(0.090 * s, 0.30 * s, 0.130 * s, 0.72 * s));
    sc.obstacles.push_back(rect(0.870 * s, 0.30 * s, 0.910 * s, 0.72 * s));
    // caps close corridors 1, 2 and 4 just below their exits
    sc.obstacles.push_back(rect(0.130 * s, 0.66 * s, 0.285 * s, 0.72 * s));
    sc.obstacles.push_back(rect(0.325 * s, 0.66 * s, 0.480 * s, 0.72 * s));
    sc.obstacles.push_back(rect(0.715 * s, 0.66 * s, 0.870 * s, 0.72 * s));
    sc.goal = {{0.61 * s, 0.90 * s}, 0.08 * s};
  } else if (name == "needle") {
    // staggered narrow gaps in successive walls
    double t = 0.03 * s, gap = 0.09 * s;
    auto wall_with_gap = [&](double y, double gx) {
      sc.obstacles.push_back(rect(0.02 * s, y, gx - gap / 2, y + t));
      sc.obstacles.push_back(rect(gx + gap / 2, y, 0.98 * s, y + t));
    };
    wall_with_gap(0.30 * s, 0.42 * s);
    wall_with_gap(0.55 * s, 0.62 * s);
    wall_with_gap(0.80 * s, 0.42 * s);
    sc.start = {0.42 * s, 0.04 * s, kPi / 2};
    sc.goal = {{0.42 * s, 0.93 * s}, 0.06 * s};
  } else if (name == "long") {
    // vertical corridor into a T; the left arm dead-ends, the goal sits at
    // the far right; the T's top wall is the contact that must be exploited
    sc.obstacles.push_back(rect(0.00 * s, 0.30 * s, 0.38 * s, 0.60 * s));
    sc.obstacles.push_back(rect(0.62 * s, 0.30 * s, 1.00 * s, 0.60 * s));
    sc.obstacles.push_back(rect(0.00 * s, 0.82 * s, 1.00 * s, 0.88 * s));  // T top wall
    sc.obstacles.push_back(rect(0.06 * s, 0.60 * s, 0.12 * s, 0.82 * s));  // dead-end cap
    sc.goal = {{0.88 * s, 0.74 * s}, 0.07 * s};
  } else {
    throw DomainError("make_env: unknown environment '" + name + "'");
  }
  sc.validate();
  return sc;
}

inline const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names = {"plus", "maze",  "pickone",
                                                 "needle", "long", "tube"};
  return names;
}

// ---------------------------------------------------------------------------
// scene file format (structured text, exact round-trip)

inline std::string print_scene(const Scene& sc) {
  using detail::fmt_g17;
  std::ostringstream os;
  os << "vinesim-scene v1\n";
  os << "units m\n";
  os << "name " << (sc.name.empty() ? "unnamed" : sc.name) << "\n";
  os << "bounds " << fmt_g17(sc.bounds.lo.x) << " " << fmt_g17(sc.bounds.lo.y) << " "
     << fmt_g17(sc.bounds.hi.x) << " " << fmt_g17(sc.bounds.hi.y) << "\n";
  os << "start " << fmt_g17(sc.start.x) << " " << fmt_g17(sc.start.y) << " "
     << fmt_g17(sc.start.heading) << "\n";
  os << "goal " << fmt_g17(sc.goal.center.x) << " " << fmt_g17(sc.goal.center.y) << " "
     << fmt_g17(sc.goal.radius) << "\n";
  for (auto& ob : sc.obstacles) {
    if (auto* c = std::get_if<Circle>(&ob.shape)) {
      os << "circle " << fmt_g17(c->center.x) << " " << fmt_g17(c->center.y) << " "
         << fmt_g17(c->radius) << "\n";
    } else {
      os << "poly";
      for (auto& v : std::get<ConvexPolygon>(ob.shape).vertices)
        os << " " << fmt_g17(v.x) << " " << fmt_g17(v.y);
      os << "\n";
    }
  }
  return os.str();
}

inline Scene parse_scene(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  Scene sc;
  double unit = 1.0;
  bool have_header = false;
  auto fail = [&](const std::string& what) {
    throw ParseError("scene parse error at line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (!have_header) {
      if (tag != "vinesim-scene") fail("expected 'vinesim-scene v1' header");
      std::string ver;
      ls >> ver;
      if (ver != "v1") fail("unsupported scene version '" + ver + "'");
      have_header = true;
      continue;
    }
    if (tag == "units") {
      std::string u;
      ls >> u;
      if (u == "m") unit = 1.0;
      else if (u == "mm") unit = 1e-3;
      else fail("unknown units '" + u + "'");
    } else if (tag == "name") {
      ls >> sc.name;
    } else if (tag == "bounds") {
      double a, b, c, d;
      if (!(ls >> a >> b >> c >> d)) fail("bounds needs 4 numbers");
      sc.bounds = {{a * unit, b * unit}, {c * unit, d * unit}};
    } else if (tag == "start") {
      double x, y, h;
      if (!(ls >> x >> y >> h)) fail("start needs x y heading");
      sc.start = {x * unit, y * unit, h};
    } else if (tag == "goal") {
      double x, y, r;
      if (!(ls >> x >> y >> r)) fail("goal needs x y radius");
      sc.goal = {{x * unit, y * unit}, r * unit};
    } else if (tag == "circle") {
      double x, y, r;
      if (!(ls >> x >> y >> r)) fail("circle needs x y radius");
      sc.obstacles.push_back(Obstacle{Circle{{x * unit, y * unit}, r * unit}});
    } else if (tag == "poly") {
      std::vector<Vec2> vs;
      double x, y;
      while (ls >> x >> y) vs.push_back({x * unit, y * unit});
      if (vs.size() < 3) fail("poly needs at least 3 vertices");
      sc.obstacles.push_back(Obstacle{ConvexPolygon{std::move(vs)}});
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!have_header) throw ParseError("scene parse error at line 1: empty scene file");
  sc.validate();
  return sc;
}

inline Scene load_scene(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open scene file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scene(ss.str());
}

inline void save_scene(const Scene& sc, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write scene file: " + path);
  f << print_scene(sc);
}

}  // namespace vinesim
