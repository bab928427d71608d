#pragma once

// Step 2: make room for the drawn bundles. Prunes graph parts no path uses,
// sizes a hub disk for every intermediate node, pushes hubs out of
// obstacles (escape moves), gradient-descends the ink+length share of the
// routing cost over intermediate node positions, and finally simplifies the
// graph (degree-2 shortcuts, gluing adjacent intermediates) when that
// strictly reduces the cost.
//
// Capacity assignments stay frozen during all of this: moves change edge
// geometry but never which capacity segments a path is charged to.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"
#include "bundling/obstacles.hpp"
#include "bundling/router.hpp"
#include "bundling/routing_graph.hpp"

namespace bundling {

struct Hub {
  int node = -1;
  double desired = 0.0;
  double allowed = 0.0;
  double effective() const { return std::min(desired, allowed); }
};

struct OptimizerParams {
  double mu = 1.0 / std::sqrt(2.0);  // hub radius factor
  double theta = 1.1;                // escape step factor (> 1)
  int max_escape_attempts = 10;
  int descent_passes = 2;
  double descent_step_factor = 0.05;  // step = factor * desired radius
  double desired_cap_factor = 4.0;    // cap = factor * largest adjacent bundle width
  int max_moves_per_node = 100;
  double min_fork_angle = 0.1;  // floor for the bundle-separation denominator

  void validate() const {
    if (theta <= 1.0) throw InputError("optimizer theta must exceed 1");
    if (mu <= 0.0) throw InputError("optimizer mu must be positive");
    if (descent_passes < 1) throw InputError("descent passes must be >= 1");
  }
};

struct ValidityIssue {
  enum class Kind { HubObstacle, HubHub, EdgeObstacle };
  Kind kind;
  int node = -1;
  int other = -1;  // obstacle id, hub node id, or edge id
};

struct ValidityReport {
  std::vector<ValidityIssue> issues;
  bool ok() const { return issues.empty(); }
};

struct NudgeTrace {
  const char* phase = "";
  int node = -1;
  Vec2 from;
  Vec2 to;
  double cost_delta = 0.0;
  bool accepted = false;
};

class Nudger {
 public:
  Nudger(RoutingState& state, std::vector<RoutedPath>& paths,
         const std::vector<Obstacle>& obstacles, OptimizerParams opt = {})
      : state_(&state), paths_(&paths), obstacles_(&obstacles), opt_(opt),
        obstacle_index_(build_obstacle_index(obstacles, true)) {
    opt_.validate();
    rebuild_maps();
  }

  std::function<void(const NudgeTrace&)> trace;

  RoutingGraph& graph() { return state_->graph(); }
  const RoutingGraph& graph() const { return state_->graph(); }
  const std::vector<Hub>& hubs() const { return hubs_; }
  const Hub& hub(int v) const { return hubs_[v]; }

  // ---- pruning ----------------------------------------------------------

  // Removes nodes and edges no path uses; center nodes always stay.
  void prune_unused() {
    RoutingGraph& g = graph();
    std::vector<char> node_used(g.node_count(), 0);
    std::vector<char> edge_used(g.edge_count(), 0);
    for (const auto& p : *paths_) {
      for (int v : p.nodes) node_used[v] = 1;
      for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
        int e = g.find_edge(p.nodes[i], p.nodes[i + 1]);
        if (e < 0) throw InternalError("path references a missing edge");
        edge_used[e] = 1;
      }
    }
    for (const auto& e : g.edges())
      if (e.alive && !edge_used[e.id]) g.remove_edge(e.id);
    for (const auto& v : g.nodes())
      if (v.alive && !node_used[v.id] && v.kind != NodeKind::Center) g.remove_node(v.id);
    g.rebuild_adjacency();
    state_->rebuild_usage(*paths_);
    rebuild_maps();
  }

  // ---- bundle widths and hub radii --------------------------------------

  double bundle_width(int edge) const {
    auto it = edge_paths_.find(edge);
    if (it == edge_paths_.end() || it->second.empty()) return 0.0;
    double w = 0.0;
    for (int p : it->second) w += (*paths_)[path_index_.at(p)].width;
    return w + state_->params().separation * static_cast<double>(it->second.size() - 1);
  }

  // Desired radius: at least mu * e_w for every adjacent edge, large enough
  // that bundles of adjacent edges are separated before entering, capped.
  void compute_hub_radii() {
    RoutingGraph& g = graph();
    g.rebuild_adjacency();
    hubs_.assign(g.node_count(), {});
    for (const auto& v : g.nodes()) {
      if (!v.alive || v.kind != NodeKind::Intermediate) continue;
      Hub h;
      h.node = v.id;
      const auto& inc = g.incident(v.id);
      double max_ew = 0.0;
      for (int e : inc) max_ew = std::max(max_ew, bundle_width(e));
      if (max_ew <= 0.0) {
        hubs_[v.id] = h;
        continue;
      }
      double sep = state_->params().separation;
      double need = opt_.mu * max_ew;
      // Angular separation of adjacent bundles before entering the hub.
      for (std::size_t i = 0; i < inc.size() && inc.size() >= 2; ++i) {
        int e1 = inc[i], e2 = inc[(i + 1) % inc.size()];
        double w1 = bundle_width(e1), w2 = bundle_width(e2);
        if (w1 <= 0.0 && w2 <= 0.0) continue;
        Vec2 d1 = g.node(g.other_end(e1, v.id)).pos - v.pos;
        Vec2 d2 = g.node(g.other_end(e2, v.id)).pos - v.pos;
        double gap = ccw_angle(d2, d1);  // adjacency list is clockwise
        gap = std::max(std::min(gap, kPi), opt_.min_fork_angle);
        need = std::max(need, (0.5 * (w1 + w2) + sep) / gap);
      }
      h.desired = std::min(need, opt_.desired_cap_factor * max_ew);
      h.allowed = obstacle_clearance(v.pos, h.desired);
      hubs_[v.id] = h;
    }
    settle_hub_overlaps();
  }

  // ---- validity ----------------------------------------------------------

  ValidityReport validate() const {
    ValidityReport rep;
    const RoutingGraph& g = graph();
    for (const auto& v : g.nodes()) {
      if (!v.alive || v.kind != NodeKind::Intermediate) continue;
      check_node(v.id, v.pos, effective_radius(v.id), &rep);
    }
    return rep;
  }

  bool is_valid() const { return validate().ok(); }

  // ---- escape ------------------------------------------------------------

  // Moves the node away from the obstacles overlapping its desired disk; at
  // most max_escape_attempts failures, halving the probe radius each time.
  bool escape_node(int v) {
    RoutingGraph& g = graph();
    Hub& h = hubs_[v];
    double r = h.desired;
    int failures = 0;
    bool moved = false;
    while (failures < opt_.max_escape_attempts) {
      if (h.allowed + kCurveEps >= h.desired) break;
      Vec2 pos = g.node(v).pos;
      Vec2 dir{0, 0};
      for (std::size_t oi : obstacle_index_.query(disk_box(pos, r))) {
        const Obstacle& ob = (*obstacles_)[oi];
        if (distance_point_to_polygon(pos, ob.shrunk()) < r)
          dir = dir + (pos - ob.center).normalized();
      }
      NudgeTrace t;
      t.phase = "escape";
      t.node = v;
      t.from = pos;
      if (dir.norm() < kGeomEps) {
        ++failures;
        r *= 0.5;
        continue;
      }
      Vec2 candidate = pos + dir.normalized() * (opt_.theta * r);
      double new_allowed = allowed_at(v, candidate);
      bool ok = new_allowed > h.allowed + kCurveEps &&
                position_valid(v, candidate, std::min(h.desired, new_allowed));
      t.to = candidate;
      t.accepted = ok;
      if (trace) trace(t);
      if (ok) {
        apply_move(v, candidate);
        h.allowed = new_allowed;
        r = h.desired;
        moved = true;
      } else {
        ++failures;
        r *= 0.5;
      }
    }
    return moved;
  }

  void escape_phase() {
    const RoutingGraph& g = graph();
    for (const auto& v : g.nodes())
      if (v.alive && v.kind == NodeKind::Intermediate && hubs_[v.id].desired > 0.0)
        escape_node(v.id);
  }

  // ---- descent -----------------------------------------------------------

  // D = k_ink * sum of unit vectors to graph neighbors
  //   + k_len * sum over paths (v,u,w) of (unit(u->v) + unit(u->w)) / |st|.
  Vec2 descent_direction(int u) const {
    const RoutingGraph& g = graph();
    Vec2 pos = g.node(u).pos;
    Vec2 d{0, 0};
    const CostParams& k = state_->params();
    for (int e : g.incident(u)) {
      Vec2 to = g.node(g.other_end(e, u)).pos - pos;
      if (to.norm() > kGeomEps) d = d + k.k_ink * to.normalized();
    }
    auto it = node_paths_.find(u);
    if (it != node_paths_.end()) {
      for (auto [pid, idx] : it->second) {
        const RoutedPath& p = (*paths_)[path_index_.at(pid)];
        if (idx == 0 || idx + 1 >= p.nodes.size()) continue;
        Vec2 tv = g.node(p.nodes[idx - 1]).pos - pos;
        Vec2 tw = g.node(p.nodes[idx + 1]).pos - pos;
        Vec2 term{0, 0};
        if (tv.norm() > kGeomEps) term = term + tv.normalized();
        if (tw.norm() > kGeomEps) term = term + tw.normalized();
        d = d + (k.k_len / p.center_dist) * term;
      }
    }
    return d;
  }

  // Contribution of node u at position pos to the routing cost.
  double node_cost(int u, Vec2 pos) const {
    const RoutingGraph& g = graph();
    const CostParams& k = state_->params();
    double f = 0.0;
    for (int e : g.incident(u)) f += k.k_ink * distance(pos, g.node(g.other_end(e, u)).pos);
    auto it = node_paths_.find(u);
    if (it != node_paths_.end()) {
      for (auto [pid, idx] : it->second) {
        const RoutedPath& p = (*paths_)[path_index_.at(pid)];
        if (idx == 0 || idx + 1 >= p.nodes.size()) continue;
        f += k.k_len *
             (distance(pos, g.node(p.nodes[idx - 1]).pos) +
              distance(pos, g.node(p.nodes[idx + 1]).pos)) /
             p.center_dist;
      }
    }
    return f;
  }

  // One fixed-size step along D; accepted only when the cost strictly drops
  // and the graph stays valid.
  bool descend_node(int u) {
    RoutingGraph& g = graph();
    Vec2 d = descent_direction(u);
    if (d.norm() < kGeomEps) return false;
    Vec2 pos = g.node(u).pos;
    double step = opt_.descent_step_factor * std::max(hubs_[u].desired, kCurveEps);
    Vec2 candidate = pos + d.normalized() * step;
    double delta = node_cost(u, candidate) - node_cost(u, pos);
    NudgeTrace t;
    t.phase = "descent";
    t.node = u;
    t.from = pos;
    t.to = candidate;
    t.cost_delta = delta;
    bool ok = delta < -kGeomEps && position_valid(u, candidate, effective_radius(u));
    t.accepted = ok;
    if (trace) trace(t);
    if (!ok) return false;
    apply_move(u, candidate);
    hubs_[u].allowed = allowed_at(u, candidate);
    return true;
  }

  void descent_phase() {
    const RoutingGraph& g = graph();
    for (int pass = 0; pass < opt_.descent_passes; ++pass) {
      for (const auto& v : g.nodes()) {
        if (!v.alive || v.kind != NodeKind::Intermediate) continue;
        for (int moves = 0; moves < opt_.max_moves_per_node; ++moves)
          if (!descend_node(v.id)) break;
      }
    }
  }

  // ---- simplification ----------------------------------------------------

  // Applies degree-2 shortcuts and intermediate-node gluing while each
  // transformation strictly reduces the ink+length cost and keeps the graph
  // valid. Terminates: every application removes one node.
  void simplify() {
    bool changed = true;
    while (changed) {
      changed = false;
      const RoutingGraph& g = graph();
      for (const auto& v : g.nodes()) {
        if (!v.alive || v.kind != NodeKind::Intermediate) continue;
        if (try_shortcut(v.id)) {
          changed = true;
          break;
        }
      }
      if (changed) continue;
      for (const auto& e : g.edges()) {
        if (!e.alive) continue;
        const auto &na = g.node(e.a), &nb = g.node(e.b);
        if (!na.alive || !nb.alive) continue;
        if (na.kind != NodeKind::Intermediate || nb.kind != NodeKind::Intermediate) continue;
        if (try_glue(e.a, e.b) || try_glue(e.b, e.a)) {
          changed = true;
          break;
        }
      }
    }
  }

  // ---- full pass ---------------------------------------------------------

  void optimize() {
    compute_hub_radii();
    escape_phase();
    compute_hub_radii();
    descent_phase();
    simplify();
    compute_hub_radii();
  }

  double effective_radius(int v) const {
    return v < static_cast<int>(hubs_.size()) ? hubs_[v].effective() : 0.0;
  }

  // Ink + normalized-length share of the routing cost (capacity frozen).
  double geometric_cost() const {
    const CostParams& k = state_->params();
    double c = k.k_ink * state_->recompute_ink();
    for (const auto& p : *paths_) c += k.k_len * p.length(graph()) / p.center_dist;
    return c;
  }

 private:
  static Box disk_box(Vec2 c, double r) {
    Box b;
    b.expand(c);
    b.inflate(r);
    return b;
  }

  void rebuild_maps() {
    edge_paths_.clear();
    node_paths_.clear();
    path_index_.clear();
    const RoutingGraph& g = graph();
    for (std::size_t i = 0; i < paths_->size(); ++i) {
      const RoutedPath& p = (*paths_)[i];
      path_index_[p.id] = i;
      for (std::size_t k = 0; k < p.nodes.size(); ++k) {
        node_paths_[p.nodes[k]].push_back({p.id, k});
        if (k + 1 < p.nodes.size()) {
          int e = g.find_edge(p.nodes[k], p.nodes[k + 1]);
          if (e < 0) throw InternalError("path references a missing edge");
          edge_paths_[e].push_back(p.id);
        }
      }
    }
  }

  double obstacle_clearance(Vec2 pos, double search_radius) const {
    double best = std::max(search_radius, kCurveEps);
    for (std::size_t oi : obstacle_index_.query(disk_box(pos, best)))
      best = std::min(best, distance_point_to_polygon(pos, (*obstacles_)[oi].shrunk()));
    return best;
  }

  // Largest admissible radius at `candidate`: obstacle clearance and gaps to
  // the other hubs, capped at the desired radius.
  double allowed_at(int v, Vec2 candidate) const {
    const RoutingGraph& g = graph();
    double cap = hubs_[v].desired;
    double best = obstacle_clearance(candidate, cap);
    for (const auto& u : g.nodes()) {
      if (!u.alive || u.id == v || u.kind != NodeKind::Intermediate) continue;
      double ru = effective_radius(u.id);
      if (ru <= 0.0) continue;
      best = std::min(best, distance(candidate, u.pos) - ru);
    }
    return std::max(0.0, std::min(best, cap));
  }

  void check_node(int v, Vec2 pos, double radius, ValidityReport* rep) const {
    const RoutingGraph& g = graph();
    for (std::size_t oi : obstacle_index_.query(disk_box(pos, radius + kCurveEps))) {
      if (distance_point_to_polygon(pos, (*obstacles_)[oi].shrunk()) < radius - kCurveEps)
        rep->issues.push_back({ValidityIssue::Kind::HubObstacle, v, static_cast<int>(oi)});
    }
    for (const auto& u : g.nodes()) {
      if (!u.alive || u.id <= v || u.kind != NodeKind::Intermediate) continue;
      double ru = effective_radius(u.id);
      if (radius + ru > distance(pos, u.pos) + kCurveEps)
        rep->issues.push_back({ValidityIssue::Kind::HubHub, v, u.id});
    }
    for (int e : g.incident(v)) {
      if (!edge_segment_valid(v, pos, g.other_end(e, v)))
        rep->issues.push_back({ValidityIssue::Kind::EdgeObstacle, v, e});
    }
  }

  // Validity of the straight segment from node v (at pos) to node w: it must
  // clear every shrunk obstacle except w's own when w is a center.
  bool edge_segment_valid(int v, Vec2 pos, int w) const {
    const RoutingGraph& g = graph();
    const RoutingNode& nw = g.node(w);
    Box q = Box::of(pos, nw.pos);
    q.inflate(kCurveEps);
    for (std::size_t oi : obstacle_index_.query(q)) {
      if (nw.kind == NodeKind::Center && nw.obstacle == static_cast<int>(oi)) continue;
      const RoutingNode& nv = g.node(v);
      if (nv.kind == NodeKind::Center && nv.obstacle == static_cast<int>(oi)) continue;
      if (distance_segment_to_polygon(pos, nw.pos, (*obstacles_)[oi].shrunk()) <= kCurveEps)
        return false;
    }
    return true;
  }

  bool position_valid(int v, Vec2 candidate, double radius) const {
    const RoutingGraph& g = graph();
    for (std::size_t oi : obstacle_index_.query(disk_box(candidate, radius + kCurveEps)))
      if (distance_point_to_polygon(candidate, (*obstacles_)[oi].shrunk()) < radius - kCurveEps)
        return false;
    for (const auto& u : g.nodes()) {
      if (!u.alive || u.id == v || u.kind != NodeKind::Intermediate) continue;
      double ru = effective_radius(u.id);
      if (ru <= 0.0 && u.kind == NodeKind::Intermediate && radius <= 0.0) continue;
      if (radius + ru > distance(candidate, u.pos) + kCurveEps) return false;
    }
    for (int e : g.incident(v))
      if (!edge_segment_valid(v, candidate, g.other_end(e, v))) return false;
    return true;
  }

  void apply_move(int v, Vec2 to) {
    RoutingGraph& g = graph();
    double before = 0.0, after = 0.0;
    for (int e : g.incident(v)) before += g.edge_length(e);
    g.set_position(v, to);
    for (int e : g.incident(v)) after += g.edge_length(e);
    state_->adjust_ink(after - before);  // all surviving edges carry paths
  }

  // ---- simplification internals -----------------------------------------

  bool try_shortcut(int v) {
    RoutingGraph& g = graph();
    const auto& inc = g.incident(v);
    if (inc.size() != 2) return false;
    int ea = inc[0], eb = inc[1];
    int a = g.other_end(ea, v), b = g.other_end(eb, v);
    if (a == b) return false;
    auto pit = node_paths_.find(v);
    if (pit == node_paths_.end() || pit->second.empty()) return false;

    double lav = g.edge_length(ea), lvb = g.edge_length(eb);
    double lab = distance(g.node(a).pos, g.node(b).pos);
    int existing = g.find_edge(a, b);
    bool existing_used = existing >= 0 && state_->usage(existing) > 0;

    const CostParams& k = state_->params();
    double delta = k.k_ink * ((existing_used ? 0.0 : lab) - lav - lvb);
    for (auto [pid, idx] : pit->second)
      delta += k.k_len * (lab - lav - lvb) / (*paths_)[path_index_.at(pid)].center_dist;
    if (delta >= -kGeomEps) return false;
    if (!segment_valid_between(a, b)) return false;
    // Splicing must keep every path simple: a path visiting both a and b
    // away from v would repeat a node.
    for (auto [pid, idx] : pit->second) {
      const RoutedPath& p = (*paths_)[path_index_.at(pid)];
      if (idx == 0 || idx + 1 >= p.nodes.size()) return false;
      int prev = p.nodes[idx - 1], next = p.nodes[idx + 1];
      if (!((prev == a && next == b) || (prev == b && next == a))) return false;
    }

    NudgeTrace t;
    t.phase = "shortcut";
    t.node = v;
    t.from = g.node(v).pos;
    t.to = g.node(v).pos;
    t.cost_delta = delta;
    t.accepted = true;
    if (trace) trace(t);

    g.add_edge(a, b, EdgeKind::Visibility);
    for (auto [pid, idx] : pit->second) {
      RoutedPath& p = (*paths_)[path_index_.at(pid)];
      p.nodes.erase(p.nodes.begin() + static_cast<long>(idx));
      // Later indices for this path shift; rebuild_maps below re-syncs.
    }
    g.remove_edge(ea);
    g.remove_edge(eb);
    g.remove_node(v);
    finish_structural_change();
    return true;
  }

  // Merges node v into its neighbor u (u keeps its position).
  bool try_glue(int u, int v) {
    RoutingGraph& g = graph();
    if (g.find_edge(u, v) < 0) return false;
    auto pit = node_paths_.find(v);
    if (pit == node_paths_.end()) return false;

    // Simulate the rewrite of every path through v.
    std::map<int, std::vector<int>> rewritten;
    for (auto [pid, idx] : pit->second) {
      const RoutedPath& p = (*paths_)[path_index_.at(pid)];
      std::vector<int> seq;
      for (int n : p.nodes) seq.push_back(n == v ? u : n);
      seq.erase(std::unique(seq.begin(), seq.end()), seq.end());
      std::set<int> uniq(seq.begin(), seq.end());
      if (uniq.size() != seq.size()) return false;  // would lose simplicity
      if (seq.size() < 2) return false;
      rewritten[pid] = std::move(seq);
    }
    // New edges required at u.
    std::set<std::pair<int, int>> new_segonly;
    for (const auto& [pid, seq] : rewritten)
      for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        if (g.find_edge(seq[i], seq[i + 1]) < 0)
          new_segonly.insert({std::min(seq[i], seq[i + 1]), std::max(seq[i], seq[i + 1])});
    for (auto [x, y] : new_segonly)
      if (!segment_valid_between(x, y)) return false;

    double delta = glue_cost_delta(u, v, rewritten);
    if (delta >= -kGeomEps) return false;

    NudgeTrace t;
    t.phase = "glue";
    t.node = v;
    t.from = g.node(v).pos;
    t.to = g.node(u).pos;
    t.cost_delta = delta;
    t.accepted = true;
    if (trace) trace(t);

    for (auto [x, y] : new_segonly) g.add_edge(x, y, EdgeKind::Visibility);
    for (auto& [pid, seq] : rewritten) (*paths_)[path_index_.at(pid)].nodes = seq;
    for (int e : std::vector<int>(g.incident(v).begin(), g.incident(v).end()))
      g.remove_edge(e);
    g.remove_node(v);
    finish_structural_change();
    return true;
  }

  double glue_cost_delta(int u, int v, const std::map<int, std::vector<int>>& rewritten) {
    const RoutingGraph& g = graph();
    const CostParams& k = state_->params();
    // Length term.
    double delta = 0.0;
    for (const auto& [pid, seq] : rewritten) {
      const RoutedPath& p = (*paths_)[path_index_.at(pid)];
      double before = p.length(g), after = 0.0;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        after += distance(g.node(seq[i]).pos, g.node(seq[i + 1]).pos);
      delta += k.k_len * (after - before) / p.center_dist;
    }
    // Ink term: usage of affected edges before/after.
    std::map<std::pair<int, int>, int> after_usage;
    std::set<std::pair<int, int>> affected;
    auto key = [](int a, int b) { return std::pair{std::min(a, b), std::max(a, b)}; };
    for (const auto& [pid, idx] : node_paths_.at(v)) {
      const RoutedPath& p = (*paths_)[path_index_.at(pid)];
      for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) affected.insert(key(p.nodes[i], p.nodes[i + 1]));
    }
    for (const auto& [pid, seq] : rewritten)
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        affected.insert(key(seq[i], seq[i + 1]));
        after_usage[key(seq[i], seq[i + 1])]++;
      }
    // Usage by untouched paths on the affected edges.
    for (const auto& p : *paths_) {
      if (rewritten.count(p.id)) continue;
      for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
        auto kk = key(p.nodes[i], p.nodes[i + 1]);
        if (affected.count(kk)) after_usage[kk]++;
      }
    }
    double ink_before = 0.0, ink_after = 0.0;
    for (const auto& kk : affected) {
      int e = g.find_edge(kk.first, kk.second);
      double len = distance(g.node(kk.first).pos, g.node(kk.second).pos);
      if (e >= 0 && state_->usage(e) > 0) ink_before += len;
      auto it = after_usage.find(kk);
      if (it != after_usage.end() && it->second > 0) ink_after += len;
    }
    return delta + k.k_ink * (ink_after - ink_before);
  }

  bool segment_valid_between(int a, int b) const {
    const RoutingGraph& g = graph();
    const RoutingNode& na = g.node(a);
    const RoutingNode& nb = g.node(b);
    Box q = Box::of(na.pos, nb.pos);
    q.inflate(kCurveEps);
    for (std::size_t oi : obstacle_index_.query(q)) {
      if (na.kind == NodeKind::Center && na.obstacle == static_cast<int>(oi)) continue;
      if (nb.kind == NodeKind::Center && nb.obstacle == static_cast<int>(oi)) continue;
      if (distance_segment_to_polygon(na.pos, nb.pos, (*obstacles_)[oi].shrunk()) <= kCurveEps)
        return false;
    }
    return true;
  }

  void finish_structural_change() {
    graph().rebuild_adjacency();
    state_->rebuild_usage(*paths_);
    rebuild_maps();
    compute_hub_radii();
  }

  // Shrink overlapping hub pairs proportionally until the disks are disjoint.
  void settle_hub_overlaps() {
    const RoutingGraph& g = graph();
    std::vector<int> ids;
    for (const auto& v : g.nodes())
      if (v.alive && v.kind == NodeKind::Intermediate && hubs_[v.id].effective() > 0.0)
        ids.push_back(v.id);
    for (int pass = 0; pass < 64; ++pass) {
      bool any = false;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
          Hub& a = hubs_[ids[i]];
          Hub& b = hubs_[ids[j]];
          double ra = a.effective(), rb = b.effective();
          if (ra <= 0.0 || rb <= 0.0) continue;
          double d = distance(g.node(ids[i]).pos, g.node(ids[j]).pos);
          if (ra + rb <= d + kGeomEps) continue;
          double scale = std::max(0.0, d / (ra + rb)) * (1.0 - 1e-9);
          a.allowed = std::min(a.allowed, ra * scale);
          b.allowed = std::min(b.allowed, rb * scale);
          any = true;
        }
      }
      if (!any) break;
    }
  }

  RoutingState* state_;
  std::vector<RoutedPath>* paths_;
  const std::vector<Obstacle>* obstacles_;
  OptimizerParams opt_;
  RTree obstacle_index_;
  std::vector<Hub> hubs_;
  std::map<int, std::vector<int>> edge_paths_;  // edge id -> path ids
  std::map<int, std::vector<std::pair<int, std::size_t>>> node_paths_;  // node -> (path, index)
  std::map<int, std::size_t> path_index_;  // path id -> index in paths_
};

}  // namespace bundling
