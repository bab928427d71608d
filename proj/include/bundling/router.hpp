#pragma once

// Step 1 routing. Every input edge is routed on the routing graph by a
// Dijkstra search whose edge weights price ink (length of edges not yet
// used by any path), normalized path length, and capacity overflow growth.
// Edges are routed in sequence; the state (usage counts, ink, ledger) is
// frozen during one search and updated on commit.
//
// route_multi_dp solves the multiple-path problem for one source exactly
// over ink + length via dynamic programming on (node, terminal subset)
// states; the capacity term is applied when the resulting paths are
// committed, not inside the recurrence.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "bundling/capacity.hpp"
#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"
#include "bundling/routing_graph.hpp"

namespace bundling {

struct CostParams {
  double k_ink = 1.0;
  double k_len = 500.0;
  double k_cap = 5010.0;  // default: 10 * (k_ink + k_len)
  double default_width = 1.0;
  double separation = 0.5;

  void validate() const {
    if (k_ink < 0 || k_len < 0 || k_cap < 0)
      throw InputError("cost weights must be nonnegative");
    if (k_ink == 0 && k_len == 0 && k_cap == 0)
      throw InputError("at least one cost weight must be positive");
  }
};

struct RoutedPath {
  int id = -1;          // stable path id (input edge index)
  int input_edge = -1;  // index into the input edge list
  std::vector<int> nodes;  // routing node ids, center to center
  double width = 1.0;
  double center_dist = 0.0;           // |st| at routing time
  std::vector<int> crossed_segments;  // capacity segments (set semantics)

  int source() const { return nodes.front(); }
  int target() const { return nodes.back(); }

  double length(const RoutingGraph& g) const {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      len += distance(g.node(nodes[i]).pos, g.node(nodes[i + 1]).pos);
    return len;
  }

  std::vector<Vec2> polyline(const RoutingGraph& g) const {
    std::vector<Vec2> pts;
    pts.reserve(nodes.size());
    for (int v : nodes) pts.push_back(g.node(v).pos);
    return pts;
  }
};

struct CostBreakdown {
  double ink = 0.0;       // I
  double len_term = 0.0;  // sum of l_st / |st|
  double overflow = 0.0;  // C
  double total = 0.0;
};

class RoutingState {
 public:
  RoutingState(RoutingGraph& graph, const CapacityModel& capacity, const CostParams& params)
      : g_(&graph), capacity_(&capacity), params_(params),
        ledger_(capacity, params.separation) {
    params_.validate();
    usage_.assign(g_->edge_count(), 0);
  }

  RoutingGraph& graph() { return *g_; }
  const RoutingGraph& graph() const { return *g_; }
  const CostParams& params() const { return params_; }
  const CapacityModel& capacity() const { return *capacity_; }
  CapacityLedger& ledger() { return ledger_; }
  const CapacityLedger& ledger() const { return ledger_; }

  int usage(int e) const { return e < static_cast<int>(usage_.size()) ? usage_[e] : 0; }
  double ink() const { return ink_; }
  void adjust_ink(double delta) { ink_ += delta; }

  double recompute_ink() const {
    double i = 0.0;
    for (const auto& e : g_->edges())
      if (e.alive && usage(e.id) > 0) i += g_->edge_length(e.id);
    return i;
  }

  // delta_e: the edge's length if unused so far, else 0.
  double ink_delta(int e) const { return usage(e) > 0 ? 0.0 : g_->edge_length(e); }

  // Capacity segments properly crossed by edge e, cached per edge id.
  const std::vector<int>& edge_crossings(int e) {
    if (crossings_.size() < g_->edge_count()) crossings_.resize(g_->edge_count());
    if (crossings_valid_.size() < g_->edge_count())
      crossings_valid_.resize(g_->edge_count(), false);
    if (!crossings_valid_[e]) {
      crossings_[e] = capacity_->crossed_by_segment(g_->node(g_->edge(e).a).pos,
                                                    g_->node(g_->edge(e).b).pos);
      crossings_valid_[e] = true;
    }
    return crossings_[e];
  }

  // Full routing-cost weight of edge e against the frozen state.
  double edge_weight(int e, double inv_st, double width) {
    double len = g_->edge_length(e);
    double w = params_.k_ink * ink_delta(e) + params_.k_len * len * inv_st;
    if (params_.k_cap > 0.0) {
      double dc = 0.0;
      for (int s : edge_crossings(e)) dc += ledger_.delta_if_added(s, width);
      w += params_.k_cap * dc;
    }
    if (w < -kGeomEps) throw InternalError("negative routing edge weight");
    return std::max(w, 0.0);
  }

  // Registers the path: usage counts, ink, and the capacity ledger.
  void commit(RoutedPath& path) {
    if (usage_.size() < g_->edge_count()) usage_.resize(g_->edge_count(), 0);
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
      int e = g_->find_edge(path.nodes[i], path.nodes[i + 1]);
      if (e < 0) throw InternalError("committed path uses a missing edge");
      if (usage_[e] == 0) ink_ += g_->edge_length(e);
      usage_[e]++;
    }
    path.crossed_segments = capacity_->crossed_by_polyline(path.polyline(*g_));
    ledger_.assign_path(path.id, path.width, path.crossed_segments);
  }

  // Rebuilds usage counts from a path set (used after graph simplification).
  void rebuild_usage(const std::vector<RoutedPath>& paths) {
    usage_.assign(g_->edge_count(), 0);
    for (const auto& p : paths)
      for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
        int e = g_->find_edge(p.nodes[i], p.nodes[i + 1]);
        if (e < 0) throw InternalError("path uses a missing edge after rebuild");
        usage_[e]++;
      }
    ink_ = recompute_ink();
  }

 private:
  RoutingGraph* g_;
  const CapacityModel* capacity_;
  CostParams params_;
  CapacityLedger ledger_;
  std::vector<int> usage_;
  double ink_ = 0.0;
  std::vector<std::vector<int>> crossings_;
  std::vector<char> crossings_valid_;
};

inline CostBreakdown routing_cost(const RoutingState& state,
                                  const std::vector<RoutedPath>& paths) {
  CostBreakdown b;
  b.ink = state.ink();
  for (const auto& p : paths) {
    if (p.center_dist < kGeomEps) throw InputError("coincident path endpoints");
    b.len_term += p.length(state.graph()) / p.center_dist;
  }
  b.overflow = state.ledger().total_overflow();
  const CostParams& k = state.params();
  b.total = k.k_ink * b.ink + k.k_len * b.len_term + k.k_cap * b.overflow;
  return b;
}

namespace detail {

// Lexicographically smallest (by node id sequence) shortest path from s to t
// in the DAG of tight edges. `dist` must hold finite values on a path.
inline std::vector<int> lex_smallest_tight_path(
    const RoutingGraph& g, int s, int t, const std::vector<double>& dist,
    const std::vector<std::vector<std::pair<int, int>>>& tight_succ) {
  // Nodes that can still reach t through tight edges.
  std::vector<char> reach(g.node_count(), 0);
  {
    std::vector<std::vector<int>> rev(g.node_count());
    for (std::size_t u = 0; u < tight_succ.size(); ++u)
      for (auto [v, e] : tight_succ[u]) rev[v].push_back(static_cast<int>(u));
    std::vector<int> stack{t};
    reach[t] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : rev[v])
        if (!reach[u]) {
          reach[u] = 1;
          stack.push_back(u);
        }
    }
  }
  std::vector<int> path{s};
  std::vector<char> visited(g.node_count(), 0);
  visited[s] = 1;
  int cur = s;
  while (cur != t) {
    int best = -1;
    for (auto [v, e] : tight_succ[cur])
      if (reach[v] && !visited[v] && (best < 0 || v < best)) best = v;
    if (best < 0) return {};  // zero-weight cycle dead end; caller falls back
    visited[best] = 1;
    path.push_back(best);
    cur = best;
  }
  return path;
}

}  // namespace detail

// Routes one edge from center node s to center node t, minimizing the
// additional routing cost against the frozen state, then commits it.
inline RoutedPath route_single(RoutingState& state, int s, int t, double width,
                               int path_id) {
  RoutingGraph& g = state.graph();
  if (s == t) throw InputError("self-loop routing request");
  double st = distance(g.node(s).pos, g.node(t).pos);
  if (st < kGeomEps) throw InputError("coincident obstacle centers for a routed edge");
  double inv_st = 1.0 / st;

  // Foreign obstacle centers are off limits: a path may only touch its own
  // terminals' centers.
  auto blocked = [&](int v) {
    return g.node(v).kind == NodeKind::Center && v != s && v != t;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.node_count(), inf);
  std::vector<int> parent(g.node_count(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s] = 0.0;
  pq.push({0.0, s});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (int e : g.incident(u)) {
      if (!g.edge(e).alive) continue;
      int v = g.other_end(e, u);
      if (!g.node(v).alive || blocked(v)) continue;
      double nd = d + state.edge_weight(e, inv_st, width);
      if (nd < dist[v]) {
        dist[v] = nd;
        parent[v] = u;
        pq.push({nd, v});
      }
    }
  }
  if (dist[t] == inf) {
    throw UnroutableError("no route between routing nodes " + std::to_string(s) + " and " +
                          std::to_string(t));
  }

  // Tight-edge DAG for deterministic tie-breaking.
  std::vector<std::vector<std::pair<int, int>>> tight(g.node_count());
  for (const auto& e : g.edges()) {
    if (!e.alive) continue;
    if (blocked(e.a) || blocked(e.b)) continue;
    double w = state.edge_weight(e.id, inv_st, width);
    if (dist[e.a] < inf && dist[e.a] + w == dist[e.b] && e.b != s)
      tight[e.a].push_back({e.b, e.id});
    if (dist[e.b] < inf && dist[e.b] + w == dist[e.a] && e.a != s)
      tight[e.b].push_back({e.a, e.id});
  }
  std::vector<int> seq = detail::lex_smallest_tight_path(g, s, t, dist, tight);
  if (seq.empty()) {
    // Zero-weight cycles defeated the lexicographic walk; the Dijkstra
    // parent chain is still a valid deterministic shortest path.
    for (int v = t; v != -1; v = parent[v]) seq.push_back(v);
    std::reverse(seq.begin(), seq.end());
  }

  RoutedPath path;
  path.id = path_id;
  path.input_edge = path_id;
  path.nodes = std::move(seq);
  path.width = width;
  path.center_dist = st;
  state.commit(path);
  return path;
}

struct RouteRequest {
  int s = -1;  // center routing-node ids
  int t = -1;
  double width = 1.0;
  int input_edge = -1;
};

// Routes all requests sequentially, closest center pairs first.
inline std::vector<RoutedPath> route_all(RoutingState& state,
                                         const std::vector<RouteRequest>& requests) {
  const RoutingGraph& g = state.graph();
  std::vector<std::size_t> order(requests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double da = distance(g.node(requests[a].s).pos, g.node(requests[a].t).pos);
    double db = distance(g.node(requests[b].s).pos, g.node(requests[b].t).pos);
    if (da != db) return da < db;
    return a < b;
  });
  std::vector<RoutedPath> paths(requests.size());
  for (std::size_t i : order) {
    const RouteRequest& r = requests[i];
    RoutedPath p = route_single(state, r.s, r.t, r.width, static_cast<int>(i));
    p.input_edge = r.input_edge >= 0 ? r.input_edge : static_cast<int>(i);
    paths[i] = std::move(p);
  }
  return paths;
}

// Exact multiple-path routing for one source over ink + length terms.
// Returns one path per terminal; the path set forms a tree (a shortest-path
// tree of the optimal state union, which preserves optimality).
inline std::vector<RoutedPath> route_multi_dp(RoutingState& state, int source,
                                              const std::vector<int>& terminals,
                                              const std::vector<double>& widths,
                                              const std::vector<int>& path_ids,
                                              int k_max = 8) {
  const int k = static_cast<int>(terminals.size());
  if (k > k_max)
    throw InputError("route_multi_dp refused: " + std::to_string(k) + " terminals exceed k_max");
  if (k == 0) return {};
  RoutingGraph& g = state.graph();
  for (int i = 0; i < k; ++i) {
    if (terminals[i] == source) throw InputError("multi-path terminal equals the source");
    for (int j = i + 1; j < k; ++j)
      if (terminals[i] == terminals[j]) throw InputError("duplicate multi-path terminal");
  }
  if (k == 1)
    return {route_single(state, source, terminals[0], widths[0], path_ids[0])};

  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = g.node_count();
  std::vector<double> inv_st(k);
  for (int i = 0; i < k; ++i) {
    double d = distance(g.node(source).pos, g.node(terminals[i]).pos);
    if (d < kGeomEps) throw InputError("coincident obstacle centers for a routed edge");
    inv_st[i] = 1.0 / d;
  }
  auto blocked = [&](int v) {
    if (g.node(v).kind != NodeKind::Center) return false;
    if (v == source) return false;
    for (int t : terminals)
      if (v == t) return false;
    return true;
  };

  auto dp_edge_weight = [&](int e, int mask) {
    double len = g.edge_length(e);
    double s = 0.0;
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) s += inv_st[i];
    return state.params().k_ink * state.ink_delta(e) + state.params().k_len * len * s;
  };

  const int full = (1 << k) - 1;
  // f[mask][v], and per-state parents for reconstruction.
  std::vector<std::vector<double>> f(full + 1, std::vector<double>(n, inf));
  std::vector<std::vector<int>> via(full + 1, std::vector<int>(n, -1));     // predecessor node
  std::vector<std::vector<int>> split(full + 1, std::vector<int>(n, 0));    // submask at entry

  // Singletons: Dijkstra from each terminal.
  for (int i = 0; i < k; ++i) {
    int mask = 1 << i;
    auto& dist = f[mask];
    auto& par = via[mask];
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[terminals[i]] = 0.0;
    pq.push({0.0, terminals[i]});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int e : g.incident(u)) {
        if (!g.edge(e).alive) continue;
        int v = g.other_end(e, u);
        if (!g.node(v).alive || blocked(v)) continue;
        double nd = d + dp_edge_weight(e, mask);
        if (nd < dist[v]) {
          dist[v] = nd;
          par[v] = u;  // next hop toward the terminal
          pq.push({nd, v});
        }
      }
    }
  }

  for (int mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;  // singleton
    auto& dist = f[mask];
    auto& par = via[mask];
    auto& spl = split[mask];
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    int low = mask & (-mask);
    for (std::size_t v = 0; v < n; ++v) {
      if (!g.node(static_cast<int>(v)).alive || blocked(static_cast<int>(v))) continue;
      double best = inf;
      int best_sub = 0;
      // Canonical halves: the split containing the lowest terminal bit.
      for (int sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
        if (!(sub & low)) continue;
        if (sub == mask) continue;
        double c = f[sub][v] + f[mask ^ sub][v];
        if (c < best) {
          best = c;
          best_sub = sub;
        }
      }
      if (best < inf) {
        dist[v] = best;
        spl[v] = best_sub;
        pq.push({best, static_cast<int>(v)});
      }
    }
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int e : g.incident(u)) {
        if (!g.edge(e).alive) continue;
        int v = g.other_end(e, u);
        if (!g.node(v).alive || blocked(v)) continue;
        double nd = d + dp_edge_weight(e, mask);
        if (nd < dist[v]) {
          dist[v] = nd;
          par[v] = u;
          spl[v] = 0;
          pq.push({nd, v});
        }
      }
    }
  }
  if (f[full][source] == inf)
    throw UnroutableError("multi-path routing found no tree to all terminals");

  // Reconstruct the optimal path set (recursively: chain, then split).
  std::vector<std::vector<int>> result(k);
  struct Frame {
    int v;
    int mask;
    std::vector<int> prefix;
  };
  std::vector<Frame> stack{{source, full, {}}};
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    int v = fr.v, mask = fr.mask;
    std::vector<int> chain = std::move(fr.prefix);
    if ((mask & (mask - 1)) == 0) {
      int i = 0;
      while (!(mask & (1 << i))) ++i;
      for (int cur = v; cur != -1; cur = via[mask][cur]) {
        chain.push_back(cur);
        if (cur == terminals[i]) break;
      }
      result[i] = std::move(chain);
      continue;
    }
    int cur = v;
    while (split[mask][cur] == 0) {
      chain.push_back(cur);
      cur = via[mask][cur];
      if (cur < 0) throw InternalError("broken multi-path reconstruction chain");
    }
    int sub = split[mask][cur];
    stack.push_back({cur, sub, chain});
    stack.push_back({cur, mask ^ sub, std::move(chain)});
  }

  // Normalize to a shortest-path tree of the union by plain edge length;
  // this never increases the additional cost and guarantees a tree.
  std::set<int> union_edges;
  for (const auto& seq : result)
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      union_edges.insert(g.find_edge(seq[i], seq[i + 1]));
  std::vector<double> dist(n, inf);
  std::vector<int> par(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (int e : g.incident(u)) {
      if (!union_edges.count(e)) continue;
      int v = g.other_end(e, u);
      double nd = d + g.edge_length(e);
      if (nd < dist[v]) {
        dist[v] = nd;
        par[v] = u;
        pq.push({nd, v});
      }
    }
  }

  std::vector<RoutedPath> out;
  for (int i = 0; i < k; ++i) {
    std::vector<int> seq;
    for (int cur = terminals[i]; cur != -1; cur = par[cur]) seq.push_back(cur);
    std::reverse(seq.begin(), seq.end());
    if (seq.front() != source)
      throw InternalError("multi-path tree does not reach a terminal");
    RoutedPath p;
    p.id = path_ids[i];
    p.input_edge = p.id;
    p.nodes = std::move(seq);
    p.width = widths[i];
    p.center_dist = 1.0 / inv_st[i];
    state.commit(p);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace bundling
