#pragma once

// Obstacle construction: every input node's boundary curve is wrapped in a
// disjoint convex polygon (its hull) with a bounded corner count, the hull
// boundary is augmented so no angular cone from the center is empty, and
// after the visibility graph is built the hulls are shrunk until no
// visibility edge touches them.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"
#include "bundling/rtree.hpp"

namespace bundling {

struct BoundaryCurve {
  enum class Kind { Rectangle, Ellipse, Polygon };
  Kind kind = Kind::Rectangle;
  double half_w = 0.5;        // rectangle half extents / ellipse radii
  double half_h = 0.5;
  std::vector<Vec2> polygon;  // simple polygon, relative to the node position

  // Sample points on the curve, absolute coordinates.
  std::vector<Vec2> sample(Vec2 center, int density = 32) const {
    std::vector<Vec2> out;
    switch (kind) {
      case Kind::Rectangle:
        out = {center + Vec2{half_w, half_h}, center + Vec2{-half_w, half_h},
               center + Vec2{-half_w, -half_h}, center + Vec2{half_w, -half_h}};
        break;
      case Kind::Ellipse:
        out.reserve(density);
        for (int i = 0; i < density; ++i) {
          double a = 2.0 * kPi * i / density;
          out.push_back(center + Vec2{half_w * std::cos(a), half_h * std::sin(a)});
        }
        break;
      case Kind::Polygon:
        out.reserve(polygon.size());
        for (const Vec2& p : polygon) out.push_back(center + p);
        break;
    }
    return out;
  }

  bool contains(Vec2 p, Vec2 center) const {
    switch (kind) {
      case Kind::Rectangle:
        return std::abs(p.x - center.x) <= half_w && std::abs(p.y - center.y) <= half_h;
      case Kind::Ellipse: {
        Vec2 d = p - center;
        return (d.x * d.x) / (half_w * half_w) + (d.y * d.y) / (half_h * half_h) <= 1.0;
      }
      case Kind::Polygon: {
        // Ray casting; adequate for validation of simple polygons.
        bool in = false;
        const std::size_t n = polygon.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
          Vec2 a = center + polygon[i], b = center + polygon[j];
          if ((a.y > p.y) != (b.y > p.y) &&
              p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
            in = !in;
        }
        return in;
      }
    }
    return false;
  }
};

struct InputNode {
  std::string id;
  Vec2 pos;
  BoundaryCurve boundary;
};

struct InputEdge {
  int source = -1;  // node indices
  int target = -1;
  double width = -1.0;  // <= 0: use the configured default
};

struct InputGraph {
  std::vector<InputNode> nodes;
  std::vector<InputEdge> edges;
};

struct BoundaryPoint {
  Vec2 pos;
  bool is_corner = false;
};

struct Obstacle {
  int node_id = -1;
  Vec2 center;
  std::vector<Vec2> boundary_samples;        // points on the boundary curve
  ConvexPolygon hull;                        // as built (pre-shrink)
  double padding = 0.0;                      // applied clearance
  std::vector<BoundaryPoint> boundary_points;  // CCW on the hull boundary
  double shrink_factor = 1.0;
  std::optional<ConvexPolygon> shrunk_hull;

  const ConvexPolygon& shrunk() const { return shrunk_hull ? *shrunk_hull : hull; }
  Vec2 shrunk_boundary_point(std::size_t i) const {
    return center + (boundary_points[i].pos - center) * shrink_factor;
  }
};

struct ObstacleParams {
  double padding = 0.25;  // pipeline default: 0.5 * path separation
  int max_corners = 8;    // K_max
  double min_pad_scale = 1e-6;
  double boundary_clearance = 1e-6;  // kept between boundary and shrunk hull
};

// Removes duplicate and collinear vertices, then validates.
inline ConvexPolygon make_convex_clean(std::vector<Vec2> vs) {
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<Vec2> out;
    const std::size_t n = vs.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 prev = vs[(i + n - 1) % n], cur = vs[i], next = vs[(i + 1) % n];
      if (distance(prev, cur) < 1e-9) continue;
      if (cross(cur - prev, next - cur) <= kGeomEps * (distance(prev, cur) + 1.0)) continue;
      out.push_back(cur);
    }
    vs = std::move(out);
    if (vs.size() < 3) throw InvalidGeometryError("polygon degenerates after cleanup");
  }
  return ConvexPolygon(std::move(vs));
}

// Smallest polygon with <= k sides supporting `region` offset outward by pad,
// using k evenly spaced outward normals.
inline ConvexPolygon supporting_kgon(const std::vector<Vec2>& region, int k, double pad) {
  std::vector<double> support(k);
  std::vector<Vec2> dirs(k);
  for (int i = 0; i < k; ++i) {
    double a = 2.0 * kPi * i / k;
    dirs[i] = {std::cos(a), std::sin(a)};
    double s = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : region) s = std::max(s, dot(p, dirs[i]));
    support[i] = s + pad;
  }
  std::vector<Vec2> verts(k);
  for (int i = 0; i < k; ++i) {
    // Intersection of support lines i and i+1.
    Vec2 n1 = dirs[i], n2 = dirs[(i + 1) % k];
    double c1 = support[i], c2 = support[(i + 1) % k];
    double det = n1.x * n2.y - n1.y * n2.x;
    verts[i] = {(c1 * n2.y - c2 * n1.y) / det, (n1.x * c2 - n2.x * c1) / det};
  }
  return make_convex_clean(std::move(verts));
}

namespace detail {

// Padded hull with at most max_corners corners. Prefers discarding
// minimal-turn corners of the padded sample hull; falls back to the
// supporting k-gon when a chord cut would eat into the boundary clearance.
inline ConvexPolygon build_hull(const std::vector<Vec2>& samples, double pad,
                                int max_corners, double clearance) {
  std::vector<Vec2> hull0 = convex_hull(samples);
  if (hull0.size() < 3) {
    // Thin or tiny boundaries still get a proper 2D hull from the k-gon.
    return supporting_kgon(samples, std::max(3, max_corners), std::max(pad, 1e-9));
  }
  ConvexPolygon padded = offset_convex(ConvexPolygon(hull0), pad);
  std::vector<Vec2> vs(padded.vertices());

  auto contains_all = [&](const std::vector<Vec2>& poly) {
    ConvexPolygon p(poly);
    for (const Vec2& s : samples)
      if (p.signed_distance(s) > -clearance) return false;
    return true;
  };

  while (static_cast<int>(vs.size()) > max_corners) {
    const std::size_t n = vs.size();
    // Candidates ordered by turn angle (flattest corners first).
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 a = vs[(i + n - 1) % n], b = vs[i], c = vs[(i + 1) % n];
      double turn = ccw_angle(b - a, c - b);
      order.emplace_back(turn, i);
    }
    std::sort(order.begin(), order.end());
    bool removed = false;
    for (const auto& [turn, i] : order) {
      std::vector<Vec2> cut;
      cut.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) cut.push_back(vs[j]);
      try {
        if (contains_all(cut)) {
          vs = std::move(cut);
          removed = true;
          break;
        }
      } catch (const InvalidGeometryError&) {
        // cut would be degenerate; try next corner
      }
    }
    if (!removed)
      return supporting_kgon(samples, max_corners, std::max(pad, 1e-9));
  }
  return make_convex_clean(std::move(vs));
}

inline double polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  for (const Vec2& v : a.vertices())
    if (b.contains(v, 0.0)) return 0.0;
  for (const Vec2& v : b.vertices())
    if (a.contains(v, 0.0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i)
    for (std::size_t j = 0; j < vb.size(); ++j)
      best = std::min(best, segment_segment_distance(va[i], va[(i + 1) % va.size()],
                                                     vb[j], vb[(j + 1) % vb.size()]));
  return best;
}

}  // namespace detail

// Builds one obstacle per input node. Hulls contain their boundary curves
// with the requested padding and are pairwise disjoint; when two padded
// hulls would overlap, the padding of both offenders is binary-searched
// down toward zero.
inline std::vector<Obstacle> build_obstacles(const std::vector<InputNode>& nodes,
                                             const ObstacleParams& params = {}) {
  std::vector<Obstacle> obs(nodes.size());
  std::vector<double> pad(nodes.size(), params.padding);

  auto rebuild = [&](std::size_t i) {
    obs[i].node_id = static_cast<int>(i);
    obs[i].center = nodes[i].pos;
    obs[i].boundary_samples = nodes[i].boundary.sample(nodes[i].pos);
    if (!nodes[i].boundary.contains(nodes[i].pos, nodes[i].pos))
      throw InputError("node '" + nodes[i].id + "': position is outside its boundary curve");
    obs[i].padding = pad[i];
    obs[i].hull = detail::build_hull(obs[i].boundary_samples, pad[i], params.max_corners,
                                     std::min(params.boundary_clearance, 0.5 * pad[i] + 1e-9));
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) rebuild(i);

  // Disjointness repair.
  for (int round = 0; round < 64; ++round) {
    bool any_overlap = false;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t j = i + 1; j < obs.size(); ++j) {
        if (!obs[i].hull.bounding_box().overlaps(obs[j].hull.bounding_box())) continue;
        if (detail::polygon_distance(obs[i].hull, obs[j].hull) > kGeomEps) continue;
        any_overlap = true;
        // Largest common pad scale that separates the pair.
        double lo = params.min_pad_scale, hi = 1.0, ok = -1.0;
        double base_i = pad[i], base_j = pad[j];
        for (int it = 0; it < 24; ++it) {
          double midf = 0.5 * (lo + hi);
          pad[i] = base_i * midf;
          pad[j] = base_j * midf;
          rebuild(i);
          rebuild(j);
          if (detail::polygon_distance(obs[i].hull, obs[j].hull) > kGeomEps) {
            ok = midf;
            lo = midf;
          } else {
            hi = midf;
          }
        }
        if (ok < 0.0) {
          throw InputError("node boundaries of '" + nodes[i].id + "' and '" + nodes[j].id +
                           "' are too close: cannot build disjoint obstacles");
        }
        pad[i] = base_i * ok;
        pad[j] = base_j * ok;
        rebuild(i);
        rebuild(j);
      }
    }
    if (!any_overlap) break;
    if (round == 63)
      throw InputError("obstacle disjointness repair did not converge");
  }
  return obs;
}

// Adds boundary points on the hull so that, seen from the center, the
// angular gap between consecutive points is at most cone_angle.
inline void augment_boundary_points(Obstacle& ob, double cone_angle) {
  const auto& vs = ob.hull.vertices();
  const std::size_t n = vs.size();
  ob.boundary_points.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vs[i];
    const Vec2 b = vs[(i + 1) % n];
    ob.boundary_points.push_back({a, true});
    double gap = ccw_angle(a - ob.center, b - ob.center);
    int extra = static_cast<int>(std::ceil(gap / cone_angle - 1e-9)) - 1;
    for (int k = 1; k <= extra; ++k) {
      double theta = angle_of(a - ob.center) + gap * k / (extra + 1);
      Vec2 d{std::cos(theta), std::sin(theta)};
      // Ray from the center hits the hull edge (a, b) exactly once.
      Vec2 e = b - a;
      double denom = cross(d, e);
      if (std::abs(denom) < kGeomEps) continue;
      double s = cross(a - ob.center, e) / denom;
      ob.boundary_points.push_back({ob.center + d * s, false});
    }
  }
}

}  // namespace bundling
