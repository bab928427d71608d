#pragma once

// Step 4: turn ordered bundles into drawable curves. Every edge of the
// routing graph gets a bundle base at each endpoint (a chord on the hub);
// paths occupy parallel offset slots on the base in bundle order, and
// consecutive bundle segments are joined by tangent-continuous biarc hub
// segments. When a hub cannot accommodate the full bundle extent, slot
// widths and separations are scaled down by a common per-edge factor.

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bundling/biarc.hpp"
#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"
#include "bundling/nudger.hpp"
#include "bundling/obstacles.hpp"
#include "bundling/ordering.hpp"
#include "bundling/router.hpp"
#include "bundling/routing_graph.hpp"

namespace bundling {

struct BundleBase {
  int edge = -1;
  int node = -1;
  Vec2 anchor;      // chord midpoint
  Vec2 left;        // unit vector: left of the canonical edge direction
  double scale = 1.0;
  std::map<int, double> slot;  // path id -> signed centerline offset (scaled)
};

struct RenderedPath {
  int path_id = -1;
  int input_edge = -1;
  double width = 1.0;
  std::vector<ArcPiece> pieces;  // bundle segments and hub-segment arcs

  Vec2 at(double t) const {
    double total = 0.0;
    for (const auto& p : pieces) total += p.length();
    double s = t * total;
    for (const auto& p : pieces) {
      double l = p.length();
      if (s <= l || &p == &pieces.back()) return l < kGeomEps ? p.end : p.at(std::min(s / std::max(l, kGeomEps), 1.0));
      s -= l;
    }
    return pieces.back().end;
  }
};

// Ordering of path ids on an edge, read left-to-right along the canonical
// direction, restricted to paths that actually use the edge.
using EdgeOrderLookup = std::function<std::vector<int>(int edge)>;

namespace detail {

// Intersection of the segment (inside -> outside) with the boundary curve.
inline Vec2 boundary_exit_point(const BoundaryCurve& curve, Vec2 center, Vec2 toward) {
  double lo = 0.0, hi = 1.0;
  if (curve.contains(toward, center)) return toward;  // target inside: degenerate
  for (int i = 0; i < 48; ++i) {
    double mid = 0.5 * (lo + hi);
    Vec2 p = center + (toward - center) * mid;
    (curve.contains(p, center) ? lo : hi) = mid;
  }
  return center + (toward - center) * (0.5 * (lo + hi));
}

}  // namespace detail

class BaseBuilder {
 public:
  BaseBuilder(const RoutingGraph& g, const std::vector<RoutedPath>& paths,
              const BundleOrdering& ordering, const Nudger& nudger,
              const std::vector<Obstacle>& obstacles, const std::vector<InputNode>& nodes,
              double separation)
      : g_(&g), ordering_(&ordering), nudger_(&nudger), obstacles_(&obstacles),
        input_nodes_(&nodes), separation_(separation) {
    for (const auto& p : paths) width_of_[p.id] = p.width;
  }

  // Builds the two bases of an edge; both ends share one degradation scale
  // so the slots stay parallel.
  std::pair<BundleBase, BundleBase> build(int e) {
    const RoutingEdge& edge = g_->edge(e);
    const std::vector<int>& order = ordering_->order[e];
    Vec2 pa = g_->node(edge.a).pos;
    Vec2 pb = g_->node(edge.b).pos;
    Vec2 dir = (pb - pa).normalized();
    Vec2 left = dir.rot90();

    double extent = 0.0;
    for (int p : order) extent += width_of_.at(p);
    if (order.size() > 1) extent += separation_ * static_cast<double>(order.size() - 1);

    BundleBase base_a = make_base(e, edge.a, pb, left, extent);
    BundleBase base_b = make_base(e, edge.b, pa, left, extent);
    double scale = std::min(base_a.scale, base_b.scale);
    base_a.scale = base_b.scale = scale;

    double cursor = 0.5 * extent;
    for (int p : order) {
      double w = width_of_.at(p);
      double offset = (cursor - 0.5 * w) * scale;
      base_a.slot[p] = offset;
      base_b.slot[p] = offset;
      cursor -= w + separation_;
    }
    return {std::move(base_a), std::move(base_b)};
  }

  Vec2 slot_point(const BundleBase& b, int path) const {
    return b.anchor + b.left * b.slot.at(path);
  }

 private:
  BundleBase make_base(int e, int node, Vec2 toward, Vec2 left, double extent) {
    BundleBase b;
    b.edge = e;
    b.node = node;
    b.left = left;
    const RoutingNode& n = g_->node(node);
    if (n.kind == NodeKind::Center) {
      const InputNode& in = (*input_nodes_)[(*obstacles_)[n.obstacle].node_id];
      b.anchor = detail::boundary_exit_point(in.boundary, n.pos, toward);
      double avail = 0.0;
      for (const Vec2& s : in.boundary.sample(n.pos))
        avail = std::max(avail, std::abs(dot(s - n.pos, left)));
      b.scale = extent > 2.0 * avail && extent > 0.0 ? 2.0 * avail / extent : 1.0;
    } else {
      double r = nudger_->effective_radius(node);
      Vec2 dir = (toward - n.pos).normalized();
      if (extent > 0.0 && extent > 2.0 * r) {
        b.scale = std::max(0.0, 2.0 * r / extent);
        b.anchor = n.pos;  // diameter chord
      } else {
        b.scale = 1.0;
        double half = 0.5 * extent;
        double d = std::sqrt(std::max(r * r - half * half, 0.0));
        b.anchor = n.pos + dir * d;
      }
    }
    return b;
  }

  const RoutingGraph* g_;
  const BundleOrdering* ordering_;
  const Nudger* nudger_;
  const std::vector<Obstacle>* obstacles_;
  const std::vector<InputNode>* input_nodes_;
  double separation_;
  std::map<int, double> width_of_;
};

// Biarc connector between two bundle segments inside a hub; falls back to a
// two-biarc chain when the direct fit has no solution.
inline std::vector<ArcPiece> build_hub_segment(Vec2 in_end, Vec2 in_dir, Vec2 out_start,
                                               Vec2 out_dir) {
  std::vector<ArcPiece> pieces;
  if (distance(in_end, out_start) < kGeomEps) return pieces;
  for (const Biarc& b : fit_biarc_chain(in_end, in_dir, out_start, out_dir)) {
    pieces.push_back(b.first);
    pieces.push_back(b.second);
  }
  return pieces;
}

// Assembles the full curve of every routed path: alternating straight bundle
// segments and biarc hub segments.
inline std::vector<RenderedPath> build_rendered_paths(
    const RoutingGraph& g, const std::vector<RoutedPath>& paths,
    const BundleOrdering& ordering, const Nudger& nudger,
    const std::vector<Obstacle>& obstacles, const std::vector<InputNode>& input_nodes,
    double separation) {
  BaseBuilder builder(g, paths, ordering, nudger, obstacles, input_nodes, separation);
  // Bases per edge, built once.
  std::map<int, std::pair<BundleBase, BundleBase>> bases;
  for (const auto& p : paths)
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
      int e = g.find_edge(p.nodes[i], p.nodes[i + 1]);
      if (!bases.count(e)) bases.emplace(e, builder.build(e));
    }

  std::vector<RenderedPath> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    RenderedPath rp;
    rp.path_id = p.id;
    rp.input_edge = p.input_edge;
    rp.width = p.width;

    // Slot endpoints of every bundle segment along the travel direction.
    std::vector<Vec2> seg_start, seg_end;
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
      int u = p.nodes[i], v = p.nodes[i + 1];
      int e = g.find_edge(u, v);
      const auto& [ba, bb] = bases.at(e);
      const BundleBase& at_u = (g.edge(e).a == u) ? ba : bb;
      const BundleBase& at_v = (g.edge(e).a == u) ? bb : ba;
      seg_start.push_back(builder.slot_point(at_u, p.id));
      seg_end.push_back(builder.slot_point(at_v, p.id));
    }
    for (std::size_t i = 0; i < seg_start.size(); ++i) {
      Vec2 a = seg_start[i], b = seg_end[i];
      if (distance(a, b) >= kGeomEps) rp.pieces.push_back(ArcPiece::line(a, b));
      if (i + 1 < seg_start.size()) {
        Vec2 dir_in = (b - a).norm() > kGeomEps
                          ? (b - a).normalized()
                          : (seg_end[i + 1] - seg_start[i + 1]).normalized();
        Vec2 dir_out = (seg_end[i + 1] - seg_start[i + 1]).norm() > kGeomEps
                           ? (seg_end[i + 1] - seg_start[i + 1]).normalized()
                           : dir_in;
        for (ArcPiece piece : build_hub_segment(b, dir_in, seg_start[i + 1], dir_out))
          rp.pieces.push_back(piece);
      }
    }
    if (rp.pieces.empty() && !seg_start.empty())
      rp.pieces.push_back(ArcPiece::line(seg_start.front(), seg_end.back()));
    out.push_back(std::move(rp));
  }
  return out;
}

// ---- drawing -----------------------------------------------------------------

struct RenderOptions {
  bool debug_layers = false;
  bool timestamp = true;
  std::string timestamp_value;  // stamped verbatim when nonempty
  double margin = 10.0;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline void append_piece_svg(std::string& d, const ArcPiece& p) {
  if (p.is_arc) {
    int large = std::abs(p.sweep) > kPi ? 1 : 0;
    int sweep = p.sweep > 0 ? 1 : 0;
    d += " A " + fmt(p.radius) + " " + fmt(p.radius) + " 0 " + std::to_string(large) +
         " " + std::to_string(sweep) + " " + fmt(p.end.x) + " " + fmt(p.end.y);
  } else {
    d += " L " + fmt(p.end.x) + " " + fmt(p.end.y);
  }
}

inline std::string curve_path_data(const std::vector<ArcPiece>& pieces) {
  if (pieces.empty()) return "";
  std::string d = "M " + fmt(pieces.front().start.x) + " " + fmt(pieces.front().start.y);
  for (const auto& p : pieces) append_piece_svg(d, p);
  return d;
}

inline std::string polygon_points(const ConvexPolygon& poly) {
  std::string s;
  for (const Vec2& v : poly.vertices()) {
    if (!s.empty()) s += " ";
    s += fmt(v.x) + "," + fmt(v.y);
  }
  return s;
}

}  // namespace detail

// Emits the drawing: one group per layer (obstacles and hubs when debugging,
// node boundaries, one stroked curve per input edge in bundle order).
inline std::string render_svg(const std::vector<InputNode>& nodes,
                              const std::vector<Obstacle>& obstacles,
                              const Nudger* nudger,
                              const std::vector<RenderedPath>& paths,
                              const RenderOptions& opt = {}) {
  Box box;
  for (const auto& n : nodes)
    for (const Vec2& s : n.boundary.sample(n.pos)) box.expand(s);
  for (const auto& p : paths)
    for (const auto& piece : p.pieces) {
      box.expand(piece.start);
      box.expand(piece.end);
      if (piece.is_arc) {
        Box ab;
        ab.expand(piece.center);
        ab.inflate(piece.radius);
        box.expand(ab);
      }
    }
  if (box.empty()) {
    box = Box{};
    box.expand(Vec2{0, 0});
  }
  box.inflate(opt.margin);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << detail::fmt(box.min_x)
      << " " << detail::fmt(-box.max_y) << " " << detail::fmt(box.max_x - box.min_x) << " "
      << detail::fmt(box.max_y - box.min_y) << "\">\n";
  if (opt.timestamp)
    svg << "<!-- generated " << (opt.timestamp_value.empty() ? "at an unspecified time" : opt.timestamp_value)
        << " -->\n";
  svg << "<g transform=\"scale(1,-1)\">\n";

  if (opt.debug_layers) {
    svg << "  <g id=\"obstacles\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.4\">\n";
    for (const auto& ob : obstacles) {
      svg << "    <polygon points=\"" << detail::polygon_points(ob.hull) << "\"/>\n";
      svg << "    <polygon points=\"" << detail::polygon_points(ob.shrunk())
          << "\" stroke-dasharray=\"2,2\"/>\n";
    }
    svg << "  </g>\n";
    if (nudger) {
      svg << "  <g id=\"hubs\" fill=\"none\" stroke=\"#99ccff\" stroke-width=\"0.4\">\n";
      for (const auto& h : nudger->hubs()) {
        if (h.node < 0 || h.effective() <= 0.0) continue;
        const RoutingNode& n = nudger->graph().node(h.node);
        if (!n.alive) continue;
        svg << "    <circle cx=\"" << detail::fmt(n.pos.x) << "\" cy=\"" << detail::fmt(n.pos.y)
            << "\" r=\"" << detail::fmt(h.effective()) << "\"/>\n";
      }
      svg << "  </g>\n";
    }
  }

  svg << "  <g id=\"nodes\" fill=\"#f2f2f2\" stroke=\"#333333\" stroke-width=\"0.8\">\n";
  for (const auto& n : nodes) {
    switch (n.boundary.kind) {
      case BoundaryCurve::Kind::Rectangle:
        svg << "    <rect x=\"" << detail::fmt(n.pos.x - n.boundary.half_w) << "\" y=\""
            << detail::fmt(n.pos.y - n.boundary.half_h) << "\" width=\""
            << detail::fmt(2 * n.boundary.half_w) << "\" height=\""
            << detail::fmt(2 * n.boundary.half_h) << "\"/>\n";
        break;
      case BoundaryCurve::Kind::Ellipse:
        svg << "    <ellipse cx=\"" << detail::fmt(n.pos.x) << "\" cy=\"" << detail::fmt(n.pos.y)
            << "\" rx=\"" << detail::fmt(n.boundary.half_w) << "\" ry=\""
            << detail::fmt(n.boundary.half_h) << "\"/>\n";
        break;
      case BoundaryCurve::Kind::Polygon: {
        std::string pts;
        for (const Vec2& rel : n.boundary.polygon) {
          if (!pts.empty()) pts += " ";
          pts += detail::fmt(n.pos.x + rel.x) + "," + detail::fmt(n.pos.y + rel.y);
        }
        svg << "    <polygon points=\"" << pts << "\"/>\n";
        break;
      }
    }
  }
  svg << "  </g>\n";

  svg << "  <g id=\"paths\" fill=\"none\" stroke=\"#1f6fb2\" stroke-linecap=\"round\">\n";
  for (const auto& p : paths) {
    svg << "    <path stroke-width=\"" << detail::fmt(p.width) << "\" d=\""
        << detail::curve_path_data(p.pieces) << "\"/>\n";
  }
  svg << "  </g>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace bundling
