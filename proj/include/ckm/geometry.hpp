// SPDX-License-Identifier: Apache-2.0
//
// Exact 2D vector/segment geometry used throughout the simulator: link
// bearings, point-to-line projection, mirror images for single-bounce
// reflections, and segment intersection for blockage tests.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace ckm {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// Wraps an angle into (-180, 180] degrees.
inline double normalize_deg(double deg) {
  double r = std::fmod(deg + 180.0, 360.0);
  if (r <= 0.0) {
    r += 360.0;
  }
  return r - 180.0;
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Directed segment; a != b wherever a wall/reflector/link is expected.
struct Segment2 {
  Point2 a;
  Point2 b;

  friend constexpr bool operator==(const Segment2&, const Segment2&) = default;
};

// Full-circle bearing of rx as seen from tx, degrees versus the +x axis,
// in (-180, 180].
inline double link_angle_deg(Point2 tx, Point2 rx) {
  const Point2 d = rx - tx;
  if (d.x == 0.0 && d.y == 0.0) {
    throw std::invalid_argument("degenerate link");
  }
  return normalize_deg(rad_to_deg(std::atan2(d.y, d.x)));
}

// Normalized projection of the obstacle onto the tx->rx link:
// r = dot(TO, TR) / |TR|^2. r in (0,1) iff the foot of the perpendicular
// lies strictly between tx and rx.
inline double project_ratio(Point2 tx, Point2 rx, Point2 obs) {
  const Point2 tr = rx - tx;
  const double len2 = dot(tr, tr);
  if (len2 == 0.0) {
    throw std::invalid_argument("degenerate link");
  }
  return dot(obs - tx, tr) / len2;
}

// Perpendicular distance from obs to the infinite line through tx->rx,
// |TO - r*TR|.
inline double perp_distance(Point2 tx, Point2 rx, Point2 obs) {
  const double r = project_ratio(tx, rx, obs);
  const Point2 tr = rx - tx;
  const Point2 to = obs - tx;
  return norm(to - r * tr);
}

// Reflection of p across the infinite line through the reflector segment.
// Applying twice returns p.
inline Point2 mirror_point(Point2 p, const Segment2& reflector) {
  const Point2 d = reflector.b - reflector.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) {
    throw std::invalid_argument("degenerate reflector");
  }
  const double t = dot(p - reflector.a, d) / len2;
  const Point2 foot = reflector.a + t * d;
  return {2.0 * foot.x - p.x, 2.0 * foot.y - p.y};
}

// Segment-segment intersection; endpoint touching counts. For collinear
// overlaps the returned point is the overlap end closest to s.a.
inline std::optional<Point2> segment_intersection(const Segment2& s, const Segment2& t) {
  const Point2 r = s.b - s.a;
  const Point2 q = t.b - t.a;
  const Point2 d = t.a - s.a;
  const double denom = cross(r, q);
  if (denom != 0.0) {
    const double u = cross(d, q) / denom;  // along s
    const double v = cross(d, r) / denom;  // along t
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) {
      return std::nullopt;
    }
    return s.a + u * r;
  }
  // Parallel: intersect only if collinear and the parameter ranges overlap.
  if (cross(d, r) != 0.0) {
    return std::nullopt;
  }
  const double rr = dot(r, r);
  double t0 = dot(d, r) / rr;
  double t1 = dot(t.b - s.a, r) / rr;
  if (t0 > t1) {
    std::swap(t0, t1);
  }
  const double lo = std::max(t0, 0.0);
  const double hi = std::min(t1, 1.0);
  if (lo > hi) {
    return std::nullopt;
  }
  return s.a + lo * r;
}

inline bool segments_intersect(const Segment2& s, const Segment2& t) {
  return segment_intersection(s, t).has_value();
}

}  // namespace ckm
