#pragma once

// End-to-end pipeline: obstacles -> sparse visibility graph -> shrink ->
// capacity segments -> routing -> nudging -> ordering -> rendering, with
// stats and serialized outputs. Deterministic for a fixed input and config;
// the seed only parameterizes external test generators.

#include <chrono>
#include <ctime>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bundling/capacity.hpp"
#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"
#include "bundling/io.hpp"
#include "bundling/nudger.hpp"
#include "bundling/obstacles.hpp"
#include "bundling/ordering.hpp"
#include "bundling/renderer.hpp"
#include "bundling/router.hpp"
#include "bundling/routing_graph.hpp"

namespace bundling {

enum class OrderingAlgo { Simple, Linear, Both };

struct PipelineConfig {
  double k_ink = 1.0;
  double k_len = 500.0;
  std::optional<double> k_cap;  // default: 10 * (k_ink + k_len)
  double default_width = 1.0;
  double separation = 0.5;
  double cone_angle = kPi / 6.0;
  int max_corners = 8;
  OptimizerParams optimizer;
  OrderingAlgo ordering = OrderingAlgo::Both;
  int multi_dp_threshold = 0;  // 0 disables the multi-path prepass
  int multi_dp_kmax = 8;
  unsigned seed = 0;
  bool timestamp = true;
  bool debug_layers = false;

  CostParams cost_params() const {
    CostParams p;
    p.k_ink = k_ink;
    p.k_len = k_len;
    p.k_cap = k_cap ? *k_cap : 10.0 * (k_ink + k_len);
    p.default_width = default_width;
    p.separation = separation;
    return p;
  }
};

struct StepTimings {
  double routing = 0.0;
  double optimization = 0.0;
  double ordering = 0.0;
  double overall = 0.0;
};

// Ordering instance over the pruned routing graph, with index maps back to
// graph edge ids (instance path index i corresponds to paths[i]).
struct GraphOrderInstance {
  OrderInstance instance;
  std::vector<int> graph_edge_of;  // instance edge id -> graph edge id
};

inline GraphOrderInstance build_order_instance(const RoutingGraph& g,
                                               const std::vector<RoutedPath>& paths) {
  std::vector<int> inst_of_node(g.node_count(), -1);
  std::vector<int> graph_node_of;
  for (const auto& n : g.nodes()) {
    if (!n.alive) continue;
    inst_of_node[n.id] = static_cast<int>(graph_node_of.size());
    graph_node_of.push_back(n.id);
  }
  std::vector<std::pair<int, int>> edges;
  std::vector<int> graph_edge;
  for (const auto& e : g.edges()) {
    if (!e.alive) continue;
    int a = inst_of_node[e.a], b = inst_of_node[e.b];
    edges.push_back(a < b ? std::pair{a, b} : std::pair{b, a});
    graph_edge.push_back(e.id);
  }
  // Clockwise rotations straight from the graph adjacency.
  std::vector<std::vector<int>> rotations(graph_node_of.size());
  for (std::size_t i = 0; i < graph_node_of.size(); ++i)
    for (int e : g.incident(graph_node_of[i]))
      rotations[i].push_back(inst_of_node[g.other_end(e, graph_node_of[i])]);
  std::vector<std::vector<int>> inst_paths;
  for (const auto& p : paths) {
    std::vector<int> seq;
    for (int v : p.nodes) seq.push_back(inst_of_node[v]);
    inst_paths.push_back(std::move(seq));
  }

  GraphOrderInstance out{OrderInstance::from_rotations(static_cast<int>(graph_node_of.size()),
                                                       edges, std::move(rotations),
                                                       std::move(inst_paths)),
                         {}};
  // Instance edges were deduped/sorted inside the instance; rebuild the map.
  out.graph_edge_of.assign(out.instance.edges().size(), -1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    int id = out.instance.edge_id(edges[i].first, edges[i].second);
    if (id >= 0) out.graph_edge_of[id] = graph_edge[i];
  }
  return out;
}

struct PipelineResult {
  std::vector<Obstacle> obstacles;
  RoutingGraph graph;  // final (pruned, nudged) routing graph
  std::size_t built_nodes = 0;  // |W| and |U| as built, before pruning
  std::size_t built_edges = 0;
  std::vector<RoutedPath> paths;
  std::vector<Hub> hubs;
  BundleOrdering edge_order;  // by graph edge id, path ids left-to-right
  std::vector<RenderedPath> rendered;
  CostBreakdown cost;
  int crossings = 0;
  StepTimings timings;
  std::string svg;
  std::string routes_json;
  std::string stats_json;
  std::string capacity_table;
};

namespace detail {

inline void check_boundary_disjointness(const InputGraph& in) {
  std::vector<std::vector<Vec2>> samples;
  std::vector<Box> boxes;
  for (const auto& n : in.nodes) {
    samples.push_back(n.boundary.sample(n.pos));
    Box b;
    for (const Vec2& p : samples.back()) b.expand(p);
    boxes.push_back(b);
  }
  for (std::size_t i = 0; i < in.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < in.nodes.size(); ++j) {
      if (!boxes[i].overlaps(boxes[j])) continue;
      bool bad = in.nodes[i].boundary.contains(in.nodes[j].pos, in.nodes[i].pos) ||
                 in.nodes[j].boundary.contains(in.nodes[i].pos, in.nodes[j].pos);
      const auto& si = samples[i];
      const auto& sj = samples[j];
      for (std::size_t a = 0; a < si.size() && !bad; ++a)
        for (std::size_t b = 0; b < sj.size() && !bad; ++b)
          if (segment_segment_distance(si[a], si[(a + 1) % si.size()], sj[b],
                                       sj[(b + 1) % sj.size()]) <= kGeomEps)
            bad = true;
      if (bad)
        throw InputError("boundary curves of nodes '" + in.nodes[i].id + "' and '" +
                         in.nodes[j].id + "' are not disjoint");
    }
  }
}

inline std::string make_capacity_table(const CapacityModel& model, const CapacityLedger& ledger) {
  std::ostringstream os;
  os << "segment  obstacle_a  obstacle_b    capacity       width    overflow\n";
  char buf[160];
  for (const auto& s : model.segments()) {
    std::snprintf(buf, sizeof(buf), "%7d  %10d  %10d  %10.4f  %10.4f  %10.4f\n", s.id,
                  s.obstacle_a, s.obstacle_b, s.capacity, ledger.width_of(s.id),
                  ledger.overflow_of(s.id));
    os << buf;
  }
  return os.str();
}

}  // namespace detail

inline PipelineResult run_pipeline(const InputGraph& input, const PipelineConfig& config,
                                   std::ostream* nudge_trace = nullptr) {
  using clock = std::chrono::steady_clock;
  auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  const auto t_start = clock::now();

  if (input.nodes.empty()) throw InputError("input has no nodes");
  for (const auto& e : input.edges) {
    if (e.source < 0 || e.source >= static_cast<int>(input.nodes.size()) || e.target < 0 ||
        e.target >= static_cast<int>(input.nodes.size()))
      throw InputError("edge references a missing node");
    if (e.source == e.target) throw InputError("self-loop edges are not supported");
  }
  detail::check_boundary_disjointness(input);

  CostParams cost = config.cost_params();
  cost.validate();

  // Step 1a: obstacles and the routing graph.
  const auto t_routing = clock::now();
  ObstacleParams obp;
  obp.padding = 0.5 * std::max(cost.separation, 1e-6);
  obp.max_corners = config.max_corners;
  std::vector<Obstacle> obstacles = build_obstacles(input.nodes, obp);
  for (auto& ob : obstacles) augment_boundary_points(ob, config.cone_angle);
  VisibilityResult vis = build_sparse_visibility_graph(obstacles, config.cone_angle);
  RoutingGraph& g = vis.graph;
  shrink_obstacles(g, obstacles);

  // Step 1b: capacity and routing.
  CapacityModel capacity = build_capacity_model(obstacles);
  RoutingState state(g, capacity, cost);

  std::vector<RouteRequest> requests(input.edges.size());
  for (std::size_t i = 0; i < input.edges.size(); ++i) {
    const InputEdge& e = input.edges[i];
    requests[i].s = vis.center_node[e.source];
    requests[i].t = vis.center_node[e.target];
    requests[i].width = e.width > 0 ? e.width : cost.default_width;
    requests[i].input_edge = static_cast<int>(i);
  }

  std::vector<RoutedPath> paths(requests.size());
  std::vector<char> routed(requests.size(), 0);
  if (config.multi_dp_threshold > 0) {
    for (std::size_t c = 0; c < vis.center_node.size(); ++c) {
      int center = vis.center_node[c];
      std::vector<int> group;  // request indices with distinct far terminals
      std::set<int> seen;
      for (std::size_t i = 0; i < requests.size(); ++i) {
        if (routed[i]) continue;
        int far = requests[i].s == center ? requests[i].t
                 : requests[i].t == center ? requests[i].s
                                           : -1;
        if (far < 0 || far == center || seen.count(far)) continue;
        if (static_cast<int>(group.size()) >= config.multi_dp_kmax) break;
        seen.insert(far);
        group.push_back(static_cast<int>(i));
      }
      if (static_cast<int>(group.size()) < config.multi_dp_threshold) continue;
      std::vector<int> terminals, ids;
      std::vector<double> widths;
      for (int i : group) {
        terminals.push_back(requests[i].s == center ? requests[i].t : requests[i].s);
        widths.push_back(requests[i].width);
        ids.push_back(i);
      }
      std::vector<RoutedPath> routed_group =
          route_multi_dp(state, center, terminals, widths, ids, config.multi_dp_kmax);
      for (std::size_t j = 0; j < routed_group.size(); ++j) {
        paths[ids[j]] = std::move(routed_group[j]);
        routed[ids[j]] = 1;
      }
    }
  }
  {
    std::vector<RouteRequest> rest;
    for (std::size_t i = 0; i < requests.size(); ++i)
      if (!routed[i]) rest.push_back(requests[i]);
    std::vector<RoutedPath> seq = route_all(state, rest);
    for (std::size_t j = 0; j < rest.size(); ++j) {
      // route_all keeps request order; ids were set to the request index in
      // `rest`, remap to input indices.
      RoutedPath p = std::move(seq[j]);
      p.id = rest[j].input_edge;
      p.input_edge = rest[j].input_edge;
      paths[rest[j].input_edge] = std::move(p);
    }
  }

  PipelineResult result;
  result.built_nodes = g.alive_node_count();
  result.built_edges = g.alive_edge_count();
  result.timings.routing = seconds_since(t_routing);

  // Step 2: nudging.
  const auto t_opt = clock::now();
  Nudger nudger(state, paths, obstacles, config.optimizer);
  if (nudge_trace) {
    nudger.trace = [nudge_trace](const NudgeTrace& t) {
      (*nudge_trace) << t.phase << " node=" << t.node << " from=(" << t.from.x << ","
                     << t.from.y << ") to=(" << t.to.x << "," << t.to.y << ")"
                     << " delta=" << t.cost_delta << (t.accepted ? " accepted" : " rejected")
                     << "\n";
    };
  }
  nudger.prune_unused();
  nudger.optimize();
  result.timings.optimization = seconds_since(t_opt);

  // Step 3: ordering.
  const auto t_order = clock::now();
  g.rebuild_adjacency();
  GraphOrderInstance goi = build_order_instance(g, paths);
  BundleOrdering inst_order;
  int crossings = 0;
  if (config.ordering == OrderingAlgo::Simple) {
    inst_order = order_simple(goi.instance);
    crossings = count_crossings(goi.instance, inst_order);
  } else if (config.ordering == OrderingAlgo::Linear) {
    inst_order = order_linear(goi.instance);
    crossings = count_crossings(goi.instance, inst_order);
  } else {
    BundleOrdering simple = order_simple(goi.instance);
    inst_order = order_linear(goi.instance);
    int cs = count_crossings(goi.instance, simple);
    crossings = count_crossings(goi.instance, inst_order);
    if (cs != crossings)
      throw InternalError("ordering algorithms disagree: simple=" + std::to_string(cs) +
                          " linear=" + std::to_string(crossings));
  }
  result.timings.ordering = seconds_since(t_order);

  // Orders keyed by graph edge id with path ids.
  result.edge_order.order.assign(g.edge_count(), {});
  for (std::size_t ie = 0; ie < inst_order.order.size(); ++ie) {
    int ge = goi.graph_edge_of[ie];
    if (ge < 0) continue;
    for (int pidx : inst_order.order[ie])
      result.edge_order.order[ge].push_back(paths[pidx].id);
  }

  // Step 4: rendering.
  nudger.compute_hub_radii();
  result.hubs = nudger.hubs();
  result.rendered = build_rendered_paths(g, paths, result.edge_order, nudger, obstacles,
                                         input.nodes, cost.separation);
  RenderOptions ropt;
  ropt.debug_layers = config.debug_layers;
  ropt.timestamp = config.timestamp;
  if (config.timestamp) {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    ropt.timestamp_value = buf;
  }
  result.svg = render_svg(input.nodes, obstacles, &nudger, result.rendered, ropt);

  result.cost = routing_cost(state, paths);
  result.crossings = crossings;
  result.capacity_table = detail::make_capacity_table(capacity, state.ledger());
  result.timings.overall = seconds_since(t_start);
  if (!config.timestamp) result.timings = StepTimings{};  // keep outputs byte-stable

  // Routes record.
  {
    nlohmann::json routes = nlohmann::json::array();
    for (const auto& p : paths) {
      nlohmann::json r;
      r["edge"] = p.input_edge;
      r["source"] = input.nodes[input.edges[p.input_edge].source].id;
      r["target"] = input.nodes[input.edges[p.input_edge].target].id;
      r["width"] = p.width;
      r["length"] = p.length(g);
      r["center_distance"] = p.center_dist;
      nlohmann::json pts = nlohmann::json::array();
      for (const Vec2& v : p.polyline(g)) pts.push_back({v.x, v.y});
      r["points"] = pts;
      routes.push_back(r);
    }
    result.routes_json = routes.dump(2) + "\n";
  }

  // Stats record (Table-1 style: sizes, cost breakdown, crossings, timings).
  {
    nlohmann::json s;
    s["graph"] = {{"nodes", input.nodes.size()},
                  {"edges", input.edges.size()},
                  {"routing_nodes", result.built_nodes},
                  {"routing_edges", result.built_edges}};
    s["cost"] = {{"ink", result.cost.ink},
                 {"length_term", result.cost.len_term},
                 {"overflow", result.cost.overflow},
                 {"total", result.cost.total}};
    s["crossings"] = result.crossings;
    s["timings"] = {{"routing", result.timings.routing},
                    {"optimization", result.timings.optimization},
                    {"ordering", result.timings.ordering},
                    {"overall", result.timings.overall}};
    s["config"] = {{"k_ink", cost.k_ink},
                   {"k_len", cost.k_len},
                   {"k_cap", cost.k_cap},
                   {"width", cost.default_width},
                   {"separation", cost.separation},
                   {"cone_angle", config.cone_angle},
                   {"max_corners", config.max_corners},
                   {"multi_dp", config.multi_dp_threshold},
                   {"ordering", config.ordering == OrderingAlgo::Simple ? "simple"
                                : config.ordering == OrderingAlgo::Linear ? "linear"
                                                                          : "both"},
                   {"seed", config.seed}};
    result.stats_json = s.dump(2) + "\n";
  }

  result.paths = std::move(paths);
  result.obstacles = std::move(obstacles);
  result.graph = g;
  return result;
}

}  // namespace bundling
