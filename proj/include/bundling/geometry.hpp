#pragma once

// Planar primitives shared by the whole library: points/vectors, segments,
// circles, convex polygons and the predicates the routing and rendering
// stages are built on. All values are immutable after construction and all
// functions are pure, so everything here is safe for concurrent reads.
//
// Tolerance policy: predicates (intersection, containment) use an absolute
// epsilon of 1e-12 in drawing units; fitted-curve checks (tangent
// continuity) use 1e-9. See kGeomEps / kCurveEps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bundling {

inline constexpr double kGeomEps = 1e-12;   // exact-ish predicates
inline constexpr double kCurveEps = 1e-9;   // fitted-curve / tangency checks
inline constexpr double kPi = 3.14159265358979323846;

struct InvalidGeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double px, double py) : x(px), y(py) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
  constexpr bool operator!=(const Vec2& o) const { return !(*this == o); }

  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
  Vec2 normalized() const {
    double n = norm();
    if (n < kGeomEps) throw InvalidGeometryError("cannot normalize near-zero vector");
    return {x / n, y / n};
  }
  constexpr Vec2 rot90() const { return {-y, x}; }  // counterclockwise quarter turn
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

using Point = Vec2;

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (b - a).norm(); }

// Counterclockwise angle of v in [0, 2*pi).
inline double angle_of(Vec2 v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0) a += 2.0 * kPi;
  return a;
}

// Counterclockwise angle from `from` to `to` in [0, 2*pi).
inline double ccw_angle(Vec2 from, Vec2 to) {
  double a = angle_of(to) - angle_of(from);
  if (a < 0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

struct Segment {
  Vec2 a;
  Vec2 b;

  Vec2 dir() const { return b - a; }
  double length() const { return distance(a, b); }
  Vec2 at(double t) const { return a + (b - a) * t; }
};

struct Circle {
  Vec2 center;
  double radius = 0.0;  // >= 0
};

struct Box {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void expand(Vec2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void expand(const Box& o) {
    min_x = std::min(min_x, o.min_x);
    min_y = std::min(min_y, o.min_y);
    max_x = std::max(max_x, o.max_x);
    max_y = std::max(max_y, o.max_y);
  }
  void inflate(double m) {
    min_x -= m; min_y -= m; max_x += m; max_y += m;
  }
  bool overlaps(const Box& o) const {
    return min_x <= o.max_x && o.min_x <= max_x &&
           min_y <= o.max_y && o.min_y <= max_y;
  }
  bool empty() const { return min_x > max_x; }
  static Box of(Vec2 a, Vec2 b) {
    Box box;
    box.expand(a);
    box.expand(b);
    return box;
  }
};

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 < kGeomEps * kGeomEps) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

inline double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  // Proper crossing => 0.
  double d1 = cross(b - a, c - a);
  double d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c);
  double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return 0.0;
  return std::min(std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)),
                  std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)));
}

// True when open segments (a,b) and (c,d) cross at a single interior point of
// both. Shared endpoints and endpoint grazing within kGeomEps do not count.
inline bool segments_properly_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  double lab = distance(a, b), lcd = distance(c, d);
  if (lab < kGeomEps || lcd < kGeomEps) return false;
  double d1 = cross(b - a, c - a) / lab;  // signed distance of c from line ab
  double d2 = cross(b - a, d - a) / lab;
  double d3 = cross(d - c, a - c) / lcd;
  double d4 = cross(d - c, b - c) / lcd;
  bool cd_straddles_ab = (d1 > kGeomEps && d2 < -kGeomEps) || (d1 < -kGeomEps && d2 > kGeomEps);
  bool ab_straddles_cd = (d3 > kGeomEps && d4 < -kGeomEps) || (d3 < -kGeomEps && d4 > kGeomEps);
  return cd_straddles_ab && ab_straddles_cd;
}

// A strictly convex polygon with counterclockwise vertex order.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  // Validates vertex count, strict convexity and orientation.
  explicit ConvexPolygon(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
    validate();
    cache_box();
  }

  const std::vector<Vec2>& vertices() const { return verts_; }
  std::size_t size() const { return verts_.size(); }
  const Vec2& operator[](std::size_t i) const { return verts_[i]; }
  const Box& bounding_box() const { return box_; }

  Vec2 centroid() const {
    // Area centroid via the shoelace formula.
    double a2 = 0.0;
    Vec2 c{0, 0};
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      const Vec2& p = verts_[i];
      const Vec2& q = verts_[(i + 1) % verts_.size()];
      double w = cross(p, q);
      a2 += w;
      c = c + (p + q) * w;
    }
    if (std::abs(a2) < kGeomEps) throw InvalidGeometryError("degenerate polygon");
    return c / (3.0 * a2);
  }

  double area() const {
    double a2 = 0.0;
    for (std::size_t i = 0; i < verts_.size(); ++i)
      a2 += cross(verts_[i], verts_[(i + 1) % verts_.size()]);
    return 0.5 * a2;
  }

  // Signed distance of p to the boundary: negative inside, positive outside.
  double signed_distance(Vec2 p) const {
    double max_side = -std::numeric_limits<double>::infinity();
    double min_edge = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      const Vec2& a = verts_[i];
      const Vec2& b = verts_[(i + 1) % verts_.size()];
      Vec2 e = b - a;
      double len = e.norm();
      // Inside is where the cross product is positive (CCW polygon).
      double side = -cross(e, p - a) / len;
      max_side = std::max(max_side, side);
      min_edge = std::min(min_edge, point_segment_distance(p, a, b));
    }
    return max_side <= 0.0 ? max_side : min_edge;
  }

  bool contains(Vec2 p, double tol = kGeomEps) const { return signed_distance(p) <= tol; }

  // Scale about a fixed point. factor in (0, 1] shrinks toward `about`.
  ConvexPolygon scaled_about(Vec2 about, double factor) const {
    std::vector<Vec2> vs;
    vs.reserve(verts_.size());
    for (const Vec2& v : verts_) vs.push_back(about + (v - about) * factor);
    return ConvexPolygon(std::move(vs));
  }

 private:
  void validate() const {
    if (verts_.size() < 3) throw InvalidGeometryError("polygon needs >= 3 vertices");
    for (const Vec2& v : verts_)
      if (!v.finite()) throw InvalidGeometryError("non-finite polygon vertex");
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = verts_[i];
      const Vec2& b = verts_[(i + 1) % n];
      const Vec2& c = verts_[(i + 2) % n];
      if (distance(a, b) < kGeomEps) throw InvalidGeometryError("repeated polygon vertex");
      if (cross(b - a, c - b) <= kGeomEps)
        throw InvalidGeometryError("polygon is not strictly convex counterclockwise");
    }
  }
  void cache_box() {
    for (const Vec2& v : verts_) box_.expand(v);
  }

  std::vector<Vec2> verts_;
  Box box_;
};

// Euclidean distance from p to the closed polygonal region (0 when inside).
inline double distance_point_to_polygon(Vec2 p, const ConvexPolygon& poly) {
  double sd = poly.signed_distance(p);
  return sd <= 0.0 ? 0.0 : sd;
}

// Distance between a closed segment and the closed polygonal region.
inline double distance_segment_to_polygon(Vec2 a, Vec2 b, const ConvexPolygon& poly) {
  if (poly.contains(a, 0.0) || poly.contains(b, 0.0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto& vs = poly.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    best = std::min(best, segment_segment_distance(a, b, vs[i], vs[(i + 1) % vs.size()]));
    if (best == 0.0) return 0.0;
  }
  return best;
}

// Closed-region intersection tests. Boundary contact within tol counts.
inline bool intersects(const Segment& s, const ConvexPolygon& poly, double tol = kGeomEps) {
  return distance_segment_to_polygon(s.a, s.b, poly) <= tol;
}

inline bool intersects(const Circle& c, const ConvexPolygon& poly, double tol = kGeomEps) {
  return distance_point_to_polygon(c.center, poly) <= c.radius + tol;
}

// Clips the parametric segment a + t*(b-a), t in [0,1], against the polygon
// and reports whether the segment passes through the open interior. A segment
// that merely grazes the boundary (touches within kCurveEps) does not count.
inline bool segment_crosses_interior(Vec2 a, Vec2 b, const ConvexPolygon& poly,
                                     double depth_tol = kCurveEps) {
  const Box sbox = Box::of(a, b);
  if (!sbox.overlaps(poly.bounding_box())) return false;
  double lo = 0.0, hi = 1.0;
  Vec2 d = b - a;
  const auto& vs = poly.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    Vec2 e = vs[(i + 1) % vs.size()] - vs[i];
    Vec2 n{e.y, -e.x};  // outward normal of a CCW polygon
    double denom = dot(n, d);
    double num = dot(n, vs[i] - a);
    if (std::abs(denom) < kGeomEps) {
      if (dot(n, a - vs[i]) > 0) return false;  // parallel and fully outside
      continue;
    }
    double t = num / denom;
    if (denom < 0) lo = std::max(lo, t);
    else hi = std::min(hi, t);
    if (lo > hi) return false;
  }
  if (hi - lo < kGeomEps) return false;
  Vec2 mid = a + d * (0.5 * (lo + hi));
  return poly.signed_distance(mid) < -depth_tol;
}

// Convex hull (Andrew monotone chain), counterclockwise, no collinear points.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= kGeomEps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= kGeomEps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Offsets a convex polygon outward: every edge line moves out by `margin`,
// vertices become the intersections of consecutive offset lines.
inline ConvexPolygon offset_convex(const ConvexPolygon& poly, double margin) {
  const auto& vs = poly.vertices();
  const std::size_t n = vs.size();
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = vs[(i + n - 1) % n];
    const Vec2 cur = vs[i];
    const Vec2 next = vs[(i + 1) % n];
    Vec2 n0 = Vec2{(cur - prev).y, -(cur - prev).x}.normalized();
    Vec2 n1 = Vec2{(next - cur).y, -(next - cur).x}.normalized();
    // Intersect the two offset edge lines through cur + margin*n.
    Vec2 p0 = prev + n0 * margin, d0 = cur - prev;
    Vec2 p1 = cur + n1 * margin, d1 = next - cur;
    double denom = cross(d0, d1);
    if (std::abs(denom) < kGeomEps) {
      out[i] = cur + n0 * margin;  // near-collinear edges
    } else {
      double t = cross(p1 - p0, d1) / denom;
      out[i] = p0 + d0 * t;
    }
  }
  return ConvexPolygon(std::move(out));
}

}  // namespace bundling
