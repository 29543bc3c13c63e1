#pragma once

#include <cmath>
#include <optional>

#include "vinesim/common.hpp"

namespace vinesim {

/// Circular-arc primitives and biarc interpolation between planar poses.
/// A biarc is two tangentially continuous arcs; the equal-parameter member
/// of the one-parameter family is used throughout.

struct Arc {
  Vec2 start;
  double heading = 0;    // tangent direction at start
  double curvature = 0;  // signed, 0 = straight
  double length = 0;     // arc length, >= 0

  Pose2 pose_at(double s) const {
    if (std::fabs(curvature) < 1e-12) {
      Vec2 p = start + Vec2{std::cos(heading), std::sin(heading)} * s;
      return {p.x, p.y, heading};
    }
    double turn = curvature * s;
    double r = 1.0 / curvature;
    // rotate about the center at start + r * normal
    Vec2 n{-std::sin(heading), std::cos(heading)};
    Vec2 center = start + n * r;
    double a0 = std::atan2(start.y - center.y, start.x - center.x);
    double a = a0 + turn;
    Vec2 p = center + Vec2{std::cos(a), std::sin(a)} * std::fabs(r);
    return {p.x, p.y, heading + turn};
  }

  Pose2 end_pose() const { return pose_at(length); }
  double turn_angle() const { return curvature * length; }
};

/// Unique arc leaving pose `from` tangentially and passing through point
/// `target`. Degenerates to a straight segment when the point lies ahead on
/// the tangent line. Returns nullopt when the target is behind the pose
/// (the arc would have to turn more than ~pi).
inline std::optional<Arc> arc_to_point(const Pose2& from, Vec2 target) {
  Vec2 c = target - from.position();
  double dist = c.norm();
  if (dist < 1e-12) return std::nullopt;
  Vec2 t = from.direction();
  double cross = t.cross(c);
  double dot = t.dot(c);
  double alpha = std::atan2(cross, dot);  // half the turn angle
  if (std::fabs(alpha) > kPi / 2 * 0.999) return std::nullopt;
  Arc arc;
  arc.start = from.position();
  arc.heading = from.heading;
  if (std::fabs(alpha) < 1e-9) {
    arc.curvature = 0.0;
    arc.length = dist;
  } else {
    arc.curvature = 2.0 * std::sin(alpha) / dist;
    arc.length = dist * alpha / std::sin(alpha);
  }
  return arc;
}

struct BiarcPath {
  Arc first;
  Arc second;

  double length() const { return first.length + second.length; }
};

/// Equal-parameter biarc from pose p0 to pose p1. Returns nullopt for
/// degenerate configurations (coincident points, no positive-parameter
/// solution).
inline std::optional<BiarcPath> biarc_fit(const Pose2& p0, const Pose2& p1) {
  Vec2 v = p1.position() - p0.position();
  if (v.norm() < 1e-12) return std::nullopt;
  Vec2 t0 = p0.direction(), t1 = p1.direction();
  Vec2 t = t0 + t1;
  double denom = 2.0 * (1.0 - t0.dot(t1));
  double d;
  if (std::fabs(denom) < 1e-12) {
    // parallel tangents
    double vt = v.dot(t);
    if (std::fabs(vt) < 1e-12) return std::nullopt;
    d = v.norm2() / (2.0 * vt);
  } else {
    double vt = v.dot(t);
    double disc = vt * vt + denom * v.norm2();
    if (disc < 0) return std::nullopt;
    d = (-vt + std::sqrt(disc)) / denom;
  }
  if (!(d > 1e-12)) return std::nullopt;

  Vec2 junction = (p0.position() + p1.position() + (t0 - t1) * d) * 0.5;

  auto arc_between = [](Vec2 a, double heading, Vec2 b) -> std::optional<Arc> {
    return arc_to_point({a.x, a.y, heading}, b);
  };
  auto a1 = arc_between(p0.position(), p0.heading, junction);
  if (!a1) return std::nullopt;
  double h_mid = a1->end_pose().heading;
  auto a2 = arc_between(junction, h_mid, p1.position());
  if (!a2) return std::nullopt;
  // arrival tangent must match the requested heading
  double h_end = a2->end_pose().heading;
  if (std::fabs(wrap_angle(h_end - p1.heading)) > 1e-6) return std::nullopt;
  return BiarcPath{*a1, *a2};
}

}  // namespace vinesim
