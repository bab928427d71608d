#pragma once

// Constrained Delaunay triangulation. Plain incremental Bowyer-Watson over a
// super-triangle, followed by constraint segment insertion that carves the
// crossed triangles and retriangulates the two pseudo-polygon cavities.
//
// Scale note: point location is a linear scan, so construction is O(n^2).
// That is comfortable for the graph sizes this library targets; swap in a
// walk-based locator if inputs ever grow past tens of thousands of points.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bundling/geometry.hpp"

namespace bundling {

class ConstrainedDelaunay {
 public:
  using Edge = std::pair<int, int>;  // canonical: first < second

  // Builds the CDT of `pts` with `constraints` (index pairs) forced as edges.
  // Exact duplicate points are merged; duplicate_count() reports how many.
  static ConstrainedDelaunay build(const std::vector<Vec2>& pts,
                                   const std::vector<Edge>& constraints = {}) {
    ConstrainedDelaunay cdt;
    cdt.dedupe(pts);
    cdt.triangulate();
    for (const Edge& c : constraints) {
      int a = cdt.remap_[c.first];
      int b = cdt.remap_[c.second];
      if (a != b) cdt.insert_constraint(a, b);
    }
    cdt.strip_super_triangle();
    return cdt;
  }

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<std::array<int, 3>>& triangles() const { return final_tris_; }
  int duplicate_count() const { return duplicates_; }
  int remap(int original_index) const { return remap_[original_index]; }

  bool is_constrained(int a, int b) const {
    return constrained_.count(canonical(a, b)) > 0;
  }

  // All triangulation edges, canonical and sorted.
  std::vector<Edge> edges() const {
    std::set<Edge> set;
    for (const auto& t : final_tris_)
      for (int k = 0; k < 3; ++k) set.insert(canonical(t[k], t[(k + 1) % 3]));
    return {set.begin(), set.end()};
  }

  // For each edge, the 1 or 2 opposite triangle vertices (for local
  // Delaunay verification).
  std::map<Edge, std::vector<int>> edge_opposites() const {
    std::map<Edge, std::vector<int>> out;
    for (const auto& t : final_tris_)
      for (int k = 0; k < 3; ++k)
        out[canonical(t[k], t[(k + 1) % 3])].push_back(t[(k + 2) % 3]);
    return out;
  }

  // Positive when p lies strictly inside the circumcircle of CCW (a, b, c).
  static double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    double ax = a.x - p.x, ay = a.y - p.y;
    double bx = b.x - p.x, by = b.y - p.y;
    double cx = c.x - p.x, cy = c.y - p.y;
    double a2 = ax * ax + ay * ay;
    double b2 = bx * bx + by * by;
    double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
  }

 private:
  static Edge canonical(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

  void dedupe(const std::vector<Vec2>& pts) {
    std::map<std::pair<double, double>, int> seen;
    remap_.reserve(pts.size());
    for (const Vec2& p : pts) {
      if (!p.finite()) throw InvalidGeometryError("non-finite triangulation point");
      auto key = std::make_pair(p.x, p.y);
      auto it = seen.find(key);
      if (it != seen.end()) {
        remap_.push_back(it->second);
        ++duplicates_;
      } else {
        int id = static_cast<int>(points_.size());
        seen.emplace(key, id);
        points_.push_back(p);
        remap_.push_back(id);
      }
    }
  }

  bool in_circumcircle(const std::array<int, 3>& t, Vec2 p) const {
    Vec2 a = points_[t[0]], b = points_[t[1]], c = points_[t[2]];
    double det = incircle(a, b, c, p);
    double m = std::max({(a - p).norm2(), (b - p).norm2(), (c - p).norm2(), 1.0});
    return det > kGeomEps * m * m;
  }

  void triangulate() {
    const std::size_t n = points_.size();
    if (n < 3) throw InvalidGeometryError("triangulation needs >= 3 distinct points");
    Box box;
    for (const Vec2& p : points_) box.expand(p);
    double span = std::max({box.max_x - box.min_x, box.max_y - box.min_y, 1.0});
    Vec2 mid{0.5 * (box.min_x + box.max_x), 0.5 * (box.min_y + box.max_y)};
    super_ = static_cast<int>(points_.size());
    points_.push_back(mid + Vec2{0.0, 64.0 * span});
    points_.push_back(mid + Vec2{-64.0 * span, -32.0 * span});
    points_.push_back(mid + Vec2{64.0 * span, -32.0 * span});
    tris_.push_back({super_, super_ + 1, super_ + 2});

    for (int p = 0; p < static_cast<int>(n); ++p) insert_point(p);
  }

  void insert_point(int p) {
    Vec2 pos = points_[p];
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < tris_.size(); ++i)
      if (in_circumcircle(tris_[i], pos)) bad.push_back(i);
    // Boundary of the carved region: edges that belong to exactly one bad
    // triangle, kept with the triangle's CCW orientation.
    std::map<Edge, std::pair<int, int>> count;  // canonical -> (hits, oriented a)
    for (std::size_t i : bad) {
      const auto& t = tris_[i];
      for (int k = 0; k < 3; ++k) {
        Edge e = canonical(t[k], t[(k + 1) % 3]);
        auto& slot = count[e];
        slot.first++;
        slot.second = t[k];
      }
    }
    remove_triangles(bad);
    for (const auto& [e, slot] : count) {
      if (slot.first != 1) continue;
      int a = slot.second;
      int b = (e.first == a) ? e.second : e.first;
      tris_.push_back({a, b, p});
    }
  }

  void remove_triangles(std::vector<std::size_t>& dying) {
    std::sort(dying.begin(), dying.end());
    for (std::size_t k = dying.size(); k-- > 0;) {
      tris_[dying[k]] = tris_.back();
      tris_.pop_back();
    }
  }

  static bool on_open_segment(Vec2 p, Vec2 a, Vec2 b) {
    double len = distance(a, b);
    if (len < kGeomEps) return false;
    if (std::abs(cross(b - a, p - a)) > kGeomEps * len) return false;
    double t = dot(p - a, b - a) / (len * len);
    return t > kGeomEps && t < 1.0 - kGeomEps;
  }

  void insert_constraint(int a, int b) {
    if (edge_exists(a, b)) {
      constrained_.insert(canonical(a, b));
      return;
    }
    // A vertex exactly on the segment splits the constraint.
    for (int v = 0; v < super_; ++v) {
      if (v == a || v == b) continue;
      if (on_open_segment(points_[v], points_[a], points_[b])) {
        insert_constraint(a, v);
        insert_constraint(v, b);
        return;
      }
    }

    // Carve every triangle the open segment passes through.
    std::vector<std::size_t> crossed;
    for (std::size_t i = 0; i < tris_.size(); ++i)
      if (triangle_blocks(tris_[i], a, b)) crossed.push_back(i);
    if (crossed.empty())
      throw InvalidGeometryError("constraint insertion found no crossed triangles");

    // Boundary edges of the carved region, oriented CCW per owning triangle.
    std::map<Edge, std::pair<int, int>> count;
    for (std::size_t i : crossed) {
      const auto& t = tris_[i];
      for (int k = 0; k < 3; ++k) {
        Edge e = canonical(t[k], t[(k + 1) % 3]);
        auto& slot = count[e];
        slot.first++;
        slot.second = t[k];
      }
    }
    std::map<int, int> next;  // CCW boundary walk
    for (const auto& [e, slot] : count) {
      if (slot.first != 1) continue;
      int u = slot.second;
      int w = (e.first == u) ? e.second : e.first;
      if (next.count(u))
        throw InvalidGeometryError("constraint cavity is not a simple polygon");
      next[u] = w;
    }
    remove_triangles(crossed);

    // Walk from a: one chain reaches b (left side), the rest returns (right).
    std::vector<int> left, right;
    int cur = a;
    while (cur != b) {
      auto it = next.find(cur);
      if (it == next.end()) throw InvalidGeometryError("broken constraint cavity walk");
      cur = it->second;
      if (cur != b) left.push_back(cur);
    }
    cur = b;
    while (cur != a) {
      auto it = next.find(cur);
      if (it == next.end()) throw InvalidGeometryError("broken constraint cavity walk");
      cur = it->second;
      if (cur != a) right.push_back(cur);
    }
    triangulate_pseudo(a, b, left);   // CCW sub-polygon [a, left..., b]
    triangulate_pseudo(b, a, right);  // CCW sub-polygon [b, right..., a]
    constrained_.insert(canonical(a, b));
  }

  bool edge_exists(int a, int b) const {
    for (const auto& t : tris_)
      for (int k = 0; k < 3; ++k)
        if ((t[k] == a && t[(k + 1) % 3] == b) || (t[k] == b && t[(k + 1) % 3] == a))
          return true;
    return false;
  }

  // True when the open segment (a, b) passes through the triangle's closed
  // region in a way that must be carved: it properly crosses an edge, or a
  // segment endpoint vertex sees the segment enter the triangle.
  bool triangle_blocks(const std::array<int, 3>& t, int a, int b) const {
    Vec2 pa = points_[a], pb = points_[b];
    bool has_a = (t[0] == a || t[1] == a || t[2] == a);
    bool has_b = (t[0] == b || t[1] == b || t[2] == b);
    if (has_a && has_b) return false;  // would be the edge itself
    for (int k = 0; k < 3; ++k) {
      Vec2 u = points_[t[k]], v = points_[t[(k + 1) % 3]];
      if (segments_properly_cross(pa, pb, u, v)) return true;
    }
    if (has_a || has_b) {
      // The segment may leave through the opposite edge without properly
      // crossing the incident ones: test the midpoint side.
      int self = has_a ? a : b;
      for (int k = 0; k < 3; ++k) {
        if (t[k] == self) continue;
        if (on_open_segment(points_[t[k]], pa, pb)) return false;  // split earlier
      }
      Vec2 other = has_a ? pb : pa;
      Vec2 p0 = points_[self];
      // Entering direction must point into the triangle's interior wedge.
      int i = (t[0] == self) ? 0 : (t[1] == self ? 1 : 2);
      Vec2 left = points_[t[(i + 1) % 3]] - p0;
      Vec2 rightv = points_[t[(i + 2) % 3]] - p0;
      Vec2 d = other - p0;
      double c1 = cross(left, d), c2 = cross(d, rightv);
      return c1 > kGeomEps && c2 > kGeomEps;
    }
    return false;
  }

  // Retriangulates the pseudo-polygon bounded by base edge (a, b) and the
  // vertex chain (ordered from a to b along the old cavity boundary).
  void triangulate_pseudo(int a, int b, const std::vector<int>& chain) {
    if (chain.empty()) return;
    std::size_t pick = 0;
    if (chain.size() > 1) {
      for (std::size_t i = 0; i < chain.size(); ++i) {
        bool empty = true;
        for (std::size_t j = 0; j < chain.size() && empty; ++j) {
          if (j == i) continue;
          if (incircle(points_[a], points_[chain[i]], points_[b], points_[chain[j]]) >
              kGeomEps)
            empty = false;
        }
        if (empty) {
          pick = i;
          break;
        }
      }
    }
    int c = chain[pick];
    tris_.push_back({a, c, b});
    triangulate_pseudo(a, c, {chain.begin(), chain.begin() + pick});
    triangulate_pseudo(c, b, {chain.begin() + pick + 1, chain.end()});
  }

  void strip_super_triangle() {
    final_tris_.clear();
    for (const auto& t : tris_)
      if (t[0] < super_ && t[1] < super_ && t[2] < super_) final_tris_.push_back(t);
    points_.resize(super_);
  }

  std::vector<Vec2> points_;
  std::vector<int> remap_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<std::array<int, 3>> final_tris_;
  std::set<Edge> constrained_;
  int duplicates_ = 0;
  int super_ = 0;
};

}  // namespace bundling
