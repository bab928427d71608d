#pragma once

// Tangent-continuous biarcs: two circular arcs (either of which may
// degenerate to a straight segment) joined with a common tangent. Used for
// the hub segments of rendered paths.
//
// The fit uses the equal tangent-length family member: with unit end
// tangents t0, t1 the tangent lines at both ends are cut at the same length
// d, which satisfies  2(t0.t1 - 1) d^2 - 2(v.t) d + v.v = 0  for
// v = p1 - p0, t = t0 + t1, and the join point is the midpoint of the two
// cut points. Degenerate (infinite-radius) arcs are represented explicitly
// as straight pieces.

#include <cmath>
#include <optional>
#include <vector>

#include "bundling/geometry.hpp"

namespace bundling {

// One circular arc or straight segment with an explicit parameterization.
struct ArcPiece {
  Vec2 start;
  Vec2 end;
  bool is_arc = false;
  Vec2 center{};        // arc only
  double radius = 0.0;  // arc only
  double start_angle = 0.0;
  double sweep = 0.0;  // signed, counterclockwise positive; arc only

  static ArcPiece line(Vec2 a, Vec2 b) {
    ArcPiece p;
    p.start = a;
    p.end = b;
    p.is_arc = false;
    return p;
  }

  // Circle through `a` and `b` whose tangent at `a` is `tan` (unit).
  // Returns nullopt when the chord is antiparallel to the tangent.
  static std::optional<ArcPiece> from_start_tangent(Vec2 a, Vec2 tan, Vec2 b) {
    Vec2 w = b - a;
    double chord = w.norm();
    if (chord < kGeomEps) return line(a, b);
    if (std::abs(cross(tan, w)) < kCurveEps * chord) {
      if (dot(tan, w) > 0) return line(a, b);
      return std::nullopt;  // u-turn along the chord has no single-arc solution
    }
    Vec2 n = tan.rot90();
    double s = w.norm2() / (2.0 * dot(n, w));
    ArcPiece p;
    p.start = a;
    p.end = b;
    p.is_arc = true;
    p.center = a + n * s;
    p.radius = std::abs(s);
    p.start_angle = angle_of(a - p.center);
    double end_angle = angle_of(b - p.center);
    double raw = end_angle - p.start_angle;
    bool ccw = cross(a - p.center, tan) > 0;
    if (ccw) {
      while (raw <= 0) raw += 2.0 * kPi;
    } else {
      while (raw >= 0) raw -= 2.0 * kPi;
    }
    p.sweep = raw;
    return p;
  }

  double length() const {
    return is_arc ? radius * std::abs(sweep) : distance(start, end);
  }

  // Signed curvature; 0 for straight pieces.
  double curvature() const {
    if (!is_arc) return 0.0;
    return (sweep >= 0 ? 1.0 : -1.0) / radius;
  }

  Vec2 at(double t) const {
    if (!is_arc) return start + (end - start) * t;
    double a = start_angle + sweep * t;
    return center + Vec2{std::cos(a), std::sin(a)} * radius;
  }

  Vec2 tangent_at(double t) const {
    if (!is_arc) return (end - start).normalized();
    double a = start_angle + sweep * t;
    Vec2 d{-std::sin(a), std::cos(a)};
    return sweep >= 0 ? d : -d;
  }
};

struct Biarc {
  ArcPiece first;
  ArcPiece second;

  Vec2 start() const { return first.start; }
  Vec2 end() const { return second.end; }
  Vec2 join() const { return first.end; }
  Vec2 start_tangent() const { return tangent_at(0.0); }  // robust to a degenerate piece
  Vec2 end_tangent() const { return tangent_at(1.0); }
  double length() const { return first.length() + second.length(); }

  Vec2 at(double t) const {
    double l1 = first.length(), l2 = second.length();
    double s = t * (l1 + l2);
    if (s <= l1) return l1 < kGeomEps ? first.end : first.at(s / l1);
    return l2 < kGeomEps ? second.end : second.at((s - l1) / l2);
  }

  Vec2 tangent_at(double t) const {
    double l1 = first.length(), l2 = second.length();
    double s = t * (l1 + l2);
    if (s <= l1 && l1 >= kGeomEps) return first.tangent_at(s / l1);
    if (l2 >= kGeomEps) return second.tangent_at((s - l1) / l2);
    return first.tangent_at(1.0);
  }
};

// Fits a biarc from (p0, t0) to (p1, t1); t0 and t1 must be unit vectors.
// Returns nullopt for configurations with no equal-tangent-length solution
// (antiparallel tangents with no usable lateral offset, or a target directly
// behind parallel tangents).
inline std::optional<Biarc> fit_biarc(Vec2 p0, Vec2 t0, Vec2 p1, Vec2 t1) {
  Vec2 v = p1 - p0;
  if (v.norm() < kGeomEps) throw InvalidGeometryError("biarc endpoints coincide");
  t0 = t0.normalized();
  t1 = t1.normalized();
  Vec2 t = t0 + t1;

  double a = 2.0 * (dot(t0, t1) - 1.0);
  double b = -2.0 * dot(v, t);
  double c = v.norm2();
  double d;
  if (std::abs(a) < kGeomEps) {
    // Parallel tangents: the equation degenerates to a linear one.
    if (b >= -kGeomEps) return std::nullopt;
    d = -c / b;
  } else {
    double disc = b * b - 4.0 * a * c;  // > 0: a < 0, c > 0
    double root = std::sqrt(std::max(disc, 0.0));
    double q = -0.5 * (b + (b >= 0 ? root : -root));
    double d1 = q / a;
    double d2 = (std::abs(q) < kGeomEps) ? -1.0 : c / q;
    d = std::max(d1, d2);
    if (d <= 0) return std::nullopt;
  }

  Vec2 q0 = p0 + t0 * d;
  Vec2 q1 = p1 - t1 * d;
  Vec2 m = (q0 + q1) * 0.5;

  auto a1 = ArcPiece::from_start_tangent(p0, t0, m);
  if (!a1) return std::nullopt;
  // Second piece built backward from p1 so its end tangent is exact.
  auto a2r = ArcPiece::from_start_tangent(p1, -t1, m);
  if (!a2r) return std::nullopt;
  ArcPiece a2 = *a2r;
  std::swap(a2.start, a2.end);
  if (a2.is_arc) {
    a2.start_angle = a2.start_angle + a2.sweep;
    a2.sweep = -a2.sweep;
  }
  Biarc out{*a1, a2};
  // Degenerate configurations (a u-turn hiding in a zero-length piece) can
  // satisfy the tangent-length equation without being a real fit; verify the
  // assembled curve before returning it.
  if ((out.start_tangent() - t0).norm() > kCurveEps) return std::nullopt;
  if ((out.end_tangent() - t1).norm() > kCurveEps) return std::nullopt;
  if (out.first.length() > kGeomEps && out.second.length() > kGeomEps &&
      (out.first.tangent_at(1.0) - out.second.tangent_at(0.0)).norm() > kCurveEps)
    return std::nullopt;
  return out;
}

// Like fit_biarc but falls back to two sub-biarcs through an intermediate
// tangent point when the direct fit has no solution. Throws on total failure
// (exactly antiparallel tangents with zero lateral offset can still be split).
inline std::vector<Biarc> fit_biarc_chain(Vec2 p0, Vec2 t0, Vec2 p1, Vec2 t1) {
  t0 = t0.normalized();
  t1 = t1.normalized();
  if (auto direct = fit_biarc(p0, t0, p1, t1)) return {*direct};
  Vec2 m = (p0 + p1) * 0.5;
  Vec2 sum = t0 + t1;
  Vec2 tm = sum.norm() > kGeomEps ? -sum.normalized() : t0.rot90();
  auto h1 = fit_biarc(p0, t0, m, tm);
  auto h2 = fit_biarc(m, tm, p1, t1);
  if (!h1 || !h2) throw InvalidGeometryError("biarc fit failed for tangent configuration");
  return {*h1, *h2};
}

}  // namespace bundling
