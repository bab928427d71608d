#pragma once

// The routing substrate: an embedded straight-line graph whose nodes are the
// obstacle centers and the (augmented) hull boundary points, and whose edges
// are cone-filtered visibility segments, hull perimeter segments, and center
// spokes. Built once per pipeline run; the nudger later moves intermediate
// nodes, so positions are mutable while the topology stays append-only.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"
#include "bundling/obstacles.hpp"
#include "bundling/rtree.hpp"

namespace bundling {

enum class NodeKind { Center, Intermediate };
enum class EdgeKind { Visibility, CenterSpoke };

struct RoutingNode {
  int id = -1;
  Vec2 pos;
  NodeKind kind = NodeKind::Intermediate;
  int obstacle = -1;  // owning obstacle (centers and original boundary points)
  bool alive = true;
};

struct RoutingEdge {
  int id = -1;
  int a = -1;
  int b = -1;
  EdgeKind kind = EdgeKind::Visibility;
  bool alive = true;
};

class RoutingGraph {
 public:
  int add_node(Vec2 pos, NodeKind kind, int obstacle) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({id, pos, kind, obstacle, true});
    return id;
  }

  // Returns the existing edge when (a, b) is already connected.
  int add_edge(int a, int b, EdgeKind kind) {
    if (a == b) throw InternalError("routing edge endpoints coincide");
    auto key = canonical(a, b);
    auto it = edge_index_.find(key);
    if (it != edge_index_.end() && edges_[it->second].alive) return it->second;
    int id = static_cast<int>(edges_.size());
    edges_.push_back({id, key.first, key.second, kind, true});
    edge_index_[key] = id;
    return id;
  }

  int find_edge(int a, int b) const {
    auto it = edge_index_.find(canonical(a, b));
    return (it != edge_index_.end() && edges_[it->second].alive) ? it->second : -1;
  }

  void remove_edge(int e) {
    edges_[e].alive = false;
    edge_index_.erase(canonical(edges_[e].a, edges_[e].b));
  }
  void remove_node(int v) { nodes_[v].alive = false; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t alive_node_count() const {
    std::size_t n = 0;
    for (const auto& v : nodes_) n += v.alive;
    return n;
  }
  std::size_t alive_edge_count() const {
    std::size_t n = 0;
    for (const auto& e : edges_) n += e.alive;
    return n;
  }

  const RoutingNode& node(int id) const { return nodes_[id]; }
  RoutingNode& node(int id) { return nodes_[id]; }
  const RoutingEdge& edge(int id) const { return edges_[id]; }
  const std::vector<RoutingNode>& nodes() const { return nodes_; }
  const std::vector<RoutingEdge>& edges() const { return edges_; }

  double edge_length(int e) const {
    return distance(nodes_[edges_[e].a].pos, nodes_[edges_[e].b].pos);
  }
  int other_end(int e, int from) const {
    return edges_[e].a == from ? edges_[e].b : edges_[e].a;
  }

  void set_position(int v, Vec2 p) { nodes_[v].pos = p; }

  // Incident alive edges sorted clockwise (descending CCW angle), ties by
  // neighbor id. Rebuild after any structural or positional change.
  void rebuild_adjacency() {
    adj_.assign(nodes_.size(), {});
    for (const auto& e : edges_) {
      if (!e.alive) continue;
      adj_[e.a].push_back(e.id);
      adj_[e.b].push_back(e.id);
    }
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      std::sort(adj_[v].begin(), adj_[v].end(), [&](int e1, int e2) {
        int n1 = other_end(e1, static_cast<int>(v));
        int n2 = other_end(e2, static_cast<int>(v));
        double a1 = angle_of(nodes_[n1].pos - nodes_[v].pos);
        double a2 = angle_of(nodes_[n2].pos - nodes_[v].pos);
        if (a1 != a2) return a1 > a2;
        return n1 < n2;
      });
    }
  }

  const std::vector<int>& incident(int v) const { return adj_[v]; }

 private:
  static std::pair<int, int> canonical(int a, int b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }

  std::vector<RoutingNode> nodes_;
  std::vector<RoutingEdge> edges_;
  std::map<std::pair<int, int>, int> edge_index_;
  std::vector<std::vector<int>> adj_;
};

struct VisibilityResult {
  RoutingGraph graph;
  std::vector<int> center_node;                // obstacle -> node id
  std::vector<std::vector<int>> boundary_node;  // obstacle -> node ids (CCW)
};

inline RTree build_obstacle_index(const std::vector<Obstacle>& obstacles,
                                  bool shrunk = false) {
  std::vector<Box> boxes;
  boxes.reserve(obstacles.size());
  for (const auto& ob : obstacles)
    boxes.push_back(shrunk ? ob.shrunk().bounding_box() : ob.hull.bounding_box());
  return RTree(std::move(boxes));
}

// True when segment (a, b) stays clear of every obstacle interior.
inline bool segment_visible(Vec2 a, Vec2 b, const std::vector<Obstacle>& obstacles,
                            const RTree& index) {
  Box q = Box::of(a, b);
  for (std::size_t i : index.query(q))
    if (segment_crosses_interior(a, b, obstacles[i].hull)) return false;
  return true;
}

// Builds the sparse visibility graph: per node, a covering family of cones
// of the given aperture keeps at most one edge, to the closest visible
// vertex in the cone (ties broken toward the smaller node id). Hull
// perimeter edges and center spokes are always present.
inline VisibilityResult build_sparse_visibility_graph(const std::vector<Obstacle>& obstacles,
                                                      double cone_angle) {
  VisibilityResult out;
  RoutingGraph& g = out.graph;
  out.center_node.resize(obstacles.size());
  out.boundary_node.resize(obstacles.size());

  for (std::size_t i = 0; i < obstacles.size(); ++i)
    out.center_node[i] = g.add_node(obstacles[i].center, NodeKind::Center, static_cast<int>(i));
  for (std::size_t i = 0; i < obstacles.size(); ++i)
    for (const BoundaryPoint& bp : obstacles[i].boundary_points)
      out.boundary_node[i].push_back(
          g.add_node(bp.pos, NodeKind::Intermediate, static_cast<int>(i)));

  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto& ring = out.boundary_node[i];
    for (std::size_t k = 0; k < ring.size(); ++k)
      g.add_edge(ring[k], ring[(k + 1) % ring.size()], EdgeKind::Visibility);
    for (int b : ring) g.add_edge(out.center_node[i], b, EdgeKind::CenterSpoke);
  }

  RTree index = build_obstacle_index(obstacles);

  // All boundary vertices participate in the cone sweep; centers do not.
  std::vector<int> sweep_nodes;
  for (const auto& ring : out.boundary_node)
    sweep_nodes.insert(sweep_nodes.end(), ring.begin(), ring.end());

  const int cone_count = std::max(1, static_cast<int>(std::ceil(2.0 * kPi / cone_angle)));
  struct Candidate {
    double dist;
    int node;
  };
  std::vector<std::vector<Candidate>> cones(cone_count);

  for (int u : sweep_nodes) {
    for (auto& c : cones) c.clear();
    Vec2 pu = g.node(u).pos;
    for (int v : sweep_nodes) {
      if (v == u) continue;
      Vec2 d = g.node(v).pos - pu;
      double dist = d.norm();
      if (dist < kGeomEps) continue;
      int cone = std::min(cone_count - 1,
                          static_cast<int>(angle_of(d) / (2.0 * kPi) * cone_count));
      cones[cone].push_back({dist, v});
    }
    for (auto& c : cones) {
      std::sort(c.begin(), c.end(), [](const Candidate& x, const Candidate& y) {
        return x.dist < y.dist || (x.dist == y.dist && x.node < y.node);
      });
      for (const Candidate& cand : c) {
        if (g.find_edge(u, cand.node) >= 0) break;  // perimeter edge already covers it
        if (segment_visible(pu, g.node(cand.node).pos, obstacles, index)) {
          g.add_edge(u, cand.node, EdgeKind::Visibility);
          break;
        }
      }
    }
  }
  g.rebuild_adjacency();
  return out;
}

// Shrinks every hull toward its center by the largest factor (binary search)
// that keeps all visibility edges strictly clear of the shrunk hull while
// the boundary curve keeps its clearance. Throws when even the smallest
// admissible hull still touches an edge.
inline void shrink_obstacles(const RoutingGraph& g, std::vector<Obstacle>& obstacles,
                             double boundary_clearance = 1e-6,
                             double edge_clearance = 1e-9) {
  for (auto& ob : obstacles) {
    // Candidate edges near this obstacle.
    Box near = ob.hull.bounding_box();
    near.inflate(edge_clearance * 2);
    std::vector<int> candidates;
    for (const auto& e : g.edges()) {
      if (!e.alive || e.kind != EdgeKind::Visibility) continue;
      if (Box::of(g.node(e.a).pos, g.node(e.b).pos).overlaps(near))
        candidates.push_back(e.id);
    }

    auto contains_boundary = [&](double s) {
      ConvexPolygon h = ob.hull.scaled_about(ob.center, s);
      for (const Vec2& p : ob.boundary_samples)
        if (h.signed_distance(p) > -boundary_clearance) return false;
      return true;
    };
    auto edges_clear = [&](double s) {
      ConvexPolygon h = ob.hull.scaled_about(ob.center, s);
      for (int e : candidates) {
        Vec2 a = g.node(g.edge(e).a).pos;
        Vec2 b = g.node(g.edge(e).b).pos;
        if (distance_segment_to_polygon(a, b, h) <= edge_clearance) return false;
      }
      return true;
    };

    // Smallest scale that still contains the boundary curve.
    double lo = 0.0, hi = 1.0;
    if (!contains_boundary(1.0))
      throw InternalError("hull does not contain its boundary curve");
    for (int it = 0; it < 40; ++it) {
      double mid = 0.5 * (lo + hi);
      (contains_boundary(mid) ? hi : lo) = mid;
    }
    double s_min = hi;

    if (!edges_clear(s_min)) {
      throw InputError("cannot shrink obstacle of node " + std::to_string(ob.node_id) +
                       ": its boundary curve touches a visibility edge");
    }
    // Largest scale in [s_min, 1] keeping the edges clear.
    double best = s_min;
    lo = s_min;
    hi = 1.0;
    for (int it = 0; it < 20; ++it) {
      double mid = 0.5 * (lo + hi);
      if (edges_clear(mid)) {
        best = mid;
        lo = mid;
      } else {
        hi = mid;
      }
    }
    ob.shrink_factor = best;
    ob.shrunk_hull = ob.hull.scaled_about(ob.center, best);
  }
}

}  // namespace bundling
