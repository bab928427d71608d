#include <catch2/catch_amalgamated.hpp>

#include "bundling/router.hpp"
#include "testutil.hpp"

using namespace bundling;

namespace {

CostParams params(double ki, double kl, double kc, double width = 1.0, double sep = 0.5) {
  CostParams p;
  p.k_ink = ki;
  p.k_len = kl;
  p.k_cap = kc;
  p.default_width = width;
  p.separation = sep;
  return p;
}

CapacityModel empty_capacity() { return CapacityModel(std::vector<CapacitySegment>{}); }

}  // namespace

TEST_CASE("single edge graph routes along it") {
  RoutingGraph g;
  int s = g.add_node({0, 0}, NodeKind::Center, 0);
  int t = g.add_node({5, 0}, NodeKind::Center, 1);
  g.add_edge(s, t, EdgeKind::Visibility);
  g.rebuild_adjacency();
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 500, 0));
  RoutedPath p = route_single(state, s, t, 1.0, 0);
  CHECK(p.nodes == std::vector<int>{s, t});
  CHECK(p.center_dist == Catch::Approx(5.0));
  CHECK(state.ink() == Catch::Approx(5.0));
}

TEST_CASE("routing cost components for a straight single path") {
  RoutingGraph g;
  int s = g.add_node({0, 0}, NodeKind::Center, 0);
  int t = g.add_node({5, 0}, NodeKind::Center, 1);
  g.add_edge(s, t, EdgeKind::Visibility);
  g.rebuild_adjacency();
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(2, 100, 0));
  std::vector<RoutedPath> paths = {route_single(state, s, t, 1.0, 0)};
  CostBreakdown b = routing_cost(state, paths);
  CHECK(b.ink == Catch::Approx(5.0));
  CHECK(b.len_term == Catch::Approx(1.0));  // l = |st|
  CHECK(b.overflow == 0.0);
  CHECK(b.total == Catch::Approx(2 * 5.0 + 100 * 1.0));
}

TEST_CASE("ink is counted once for identical routes, length twice") {
  RoutingGraph g;
  int s = g.add_node({0, 0}, NodeKind::Center, 0);
  int t = g.add_node({4, 0}, NodeKind::Center, 1);
  g.add_edge(s, t, EdgeKind::Visibility);
  g.rebuild_adjacency();
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 500, 0));
  std::vector<RouteRequest> reqs = {{s, t, 1.0, 0}, {s, t, 1.0, 1}};
  std::vector<RoutedPath> paths = route_all(state, reqs);
  CHECK(paths[0].nodes == paths[1].nodes);  // second reuses the route
  CostBreakdown b = routing_cost(state, paths);
  CHECK(b.ink == Catch::Approx(4.0));      // counted once
  CHECK(b.len_term == Catch::Approx(2.0));  // counted per path
}

TEST_CASE("a previously routed corridor attracts ink-sensitive paths") {
  // Two equal-length corridors between s and t through m1 or m2.
  RoutingGraph g;
  int s = g.add_node({0, 0}, NodeKind::Center, 0);
  int t = g.add_node({4, 0}, NodeKind::Center, 1);
  int m1 = g.add_node({2, 1}, NodeKind::Intermediate, -1);
  int m2 = g.add_node({2, -1}, NodeKind::Intermediate, -1);
  g.add_edge(s, m1, EdgeKind::Visibility);
  g.add_edge(m1, t, EdgeKind::Visibility);
  g.add_edge(s, m2, EdgeKind::Visibility);
  g.add_edge(m2, t, EdgeKind::Visibility);
  g.rebuild_adjacency();
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 1, 0));
  // Seed the lower corridor.
  RoutedPath seed = route_single(state, s, t, 1.0, 0);
  RoutedPath second = route_single(state, s, t, 1.0, 1);
  CHECK(second.nodes == seed.nodes);
}

TEST_CASE("dijkstra equals exhaustive enumeration on random graphs") {
  auto gen = testutil::rng(606);
  for (int it = 0; it < 40; ++it) {
    RoutingGraph g = testutil::random_routing_graph(gen, testutil::uniform_int(gen, 4, 10), 2,
                                                    0.35);
    CapacityModel cap = empty_capacity();
    RoutingState state(g, cap, params(testutil::uniform(gen, 0, 2),
                                      testutil::uniform(gen, 0, 100),
                                      0));
    // Pre-route a couple of paths to exercise the ink term.
    for (int pre = 0; pre < 2; ++pre) {
      try {
        route_single(state, 0, 1, 1.0, pre + 100);
      } catch (const UnroutableError&) {
      }
    }
    auto weights = testutil::weight_snapshot(state, 0, 1, 1.0);
    double expect = testutil::min_simple_path_cost(g, 0, 1, weights);
    try {
      RoutedPath p = route_single(state, 0, 1, 1.0, 0);
      double got = testutil::path_cost(g, p.nodes, weights);
      CHECK(got == Catch::Approx(expect).margin(1e-9));
    } catch (const UnroutableError&) {
      CHECK(expect == std::numeric_limits<double>::infinity());
    }
  }
}

TEST_CASE("unroutable edge reports an error") {
  RoutingGraph g;
  int s = g.add_node({0, 0}, NodeKind::Center, 0);
  int t = g.add_node({5, 0}, NodeKind::Center, 1);
  g.add_node({2, 2}, NodeKind::Intermediate, -1);
  g.rebuild_adjacency();
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 500, 0));
  CHECK_THROWS_AS(route_single(state, s, t, 1.0, 0), UnroutableError);
}

TEST_CASE("pure ink regime shares a trunk on a four-terminal cross") {
  // Two parallel corridors; pure ink reuses whichever was laid down first.
  RoutingGraph g;
  int a = g.add_node({-4, 0.5}, NodeKind::Center, 0);
  int b = g.add_node({-4, -0.5}, NodeKind::Center, 1);
  int c = g.add_node({4, 0.5}, NodeKind::Center, 2);
  int d = g.add_node({4, -0.5}, NodeKind::Center, 3);
  int l1 = g.add_node({-3.5, 0.2}, NodeKind::Intermediate, -1);
  int r1 = g.add_node({3.5, 0.2}, NodeKind::Intermediate, -1);
  int l2 = g.add_node({-3.5, -0.2}, NodeKind::Intermediate, -1);
  int r2 = g.add_node({3.5, -0.2}, NodeKind::Intermediate, -1);
  for (int x : {a, b}) {
    g.add_edge(x, l1, EdgeKind::Visibility);
    g.add_edge(x, l2, EdgeKind::Visibility);
  }
  for (int x : {c, d}) {
    g.add_edge(x, r1, EdgeKind::Visibility);
    g.add_edge(x, r2, EdgeKind::Visibility);
  }
  g.add_edge(l1, r1, EdgeKind::Visibility);
  g.add_edge(l2, r2, EdgeKind::Visibility);
  g.rebuild_adjacency();
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 0, 0));
  std::vector<RouteRequest> reqs = {{a, c, 1.0, 0}, {b, d, 1.0, 1}};
  std::vector<RoutedPath> paths = route_all(state, reqs);
  double straight = distance(g.node(a).pos, g.node(c).pos) + distance(g.node(b).pos, g.node(d).pos);
  CHECK(state.ink() < straight);
  // Both paths share one corridor end to end.
  CHECK(paths[0].nodes[1] == paths[1].nodes[1]);
  CHECK(paths[0].nodes[2] == paths[1].nodes[2]);
}

TEST_CASE("large length weight shortens paths relative to the pure ink run") {
  auto gen = testutil::rng(607);
  for (int it = 0; it < 10; ++it) {
    RoutingGraph g = testutil::random_routing_graph(gen, 9, 3, 0.45);
    std::vector<RouteRequest> reqs = {{0, 1, 1.0, 0}, {0, 2, 1.0, 1}, {1, 2, 1.0, 2}};
    auto run = [&](double ki, double kl) {
      RoutingGraph copy = g;
      CapacityModel cap = empty_capacity();
      RoutingState state(copy, cap, params(ki, kl, 0));
      double norm = 0.0;
      try {
        auto paths = route_all(state, reqs);
        for (const auto& p : paths) norm += p.length(copy) / p.center_dist;
      } catch (const UnroutableError&) {
        return -1.0;
      }
      return norm;
    };
    double ink_run = run(1.0, 0.001);
    double len_run = run(0.001, 1000.0);
    if (ink_run < 0 || len_run < 0) continue;
    CHECK(len_run <= ink_run + 1e-9);
  }
}

TEST_CASE("ink bookkeeping matches recomputation after routing") {
  auto gen = testutil::rng(608);
  RoutingGraph g = testutil::random_routing_graph(gen, 10, 4, 0.4);
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 500, 0));
  std::vector<RouteRequest> reqs;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) reqs.push_back({i, j, 1.0, static_cast<int>(reqs.size())});
  route_all(state, reqs);
  CHECK(state.ink() == Catch::Approx(state.recompute_ink()).margin(1e-9));
}

TEST_CASE("edge weights are always nonnegative") {
  auto gen = testutil::rng(609);
  RoutingGraph g = testutil::random_routing_graph(gen, 10, 3, 0.5);
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 500, 5010));
  for (const auto& e : g.edges())
    if (e.alive) CHECK(state.edge_weight(e.id, 0.37, 1.0) >= 0.0);
}

TEST_CASE("multi-path dp with one terminal matches route_single") {
  auto gen = testutil::rng(610);
  for (int it = 0; it < 10; ++it) {
    RoutingGraph g = testutil::random_routing_graph(gen, 8, 2, 0.4);
    CapacityModel cap = empty_capacity();
    RoutingGraph g2 = g;
    RoutingState s1(g, cap, params(1, 50, 0));
    RoutingState s2(g2, cap, params(1, 50, 0));
    try {
      RoutedPath a = route_single(s1, 0, 1, 1.0, 0);
      auto b = route_multi_dp(s2, 0, {1}, {1.0}, {0});
      REQUIRE(b.size() == 1);
      CHECK(a.nodes == b[0].nodes);
    } catch (const UnroutableError&) {
    }
  }
}

TEST_CASE("source between terminals on a path graph splits into two sub-paths") {
  RoutingGraph g;
  int t1 = g.add_node({-2, 0}, NodeKind::Center, 0);
  int m1 = g.add_node({-1, 0}, NodeKind::Intermediate, -1);
  int src = g.add_node({0, 0}, NodeKind::Center, 1);
  int m2 = g.add_node({1, 0}, NodeKind::Intermediate, -1);
  int t2 = g.add_node({2, 0}, NodeKind::Center, 2);
  g.add_edge(t1, m1, EdgeKind::Visibility);
  g.add_edge(m1, src, EdgeKind::Visibility);
  g.add_edge(src, m2, EdgeKind::Visibility);
  g.add_edge(m2, t2, EdgeKind::Visibility);
  g.rebuild_adjacency();
  CapacityModel cap = empty_capacity();

  RoutingGraph gs = g;
  RoutingState seq_state(gs, cap, params(1, 10, 0));
  double seq_cost = 0.0;
  {
    auto w1 = testutil::weight_snapshot(seq_state, src, t1, 1.0);
    RoutedPath p1 = route_single(seq_state, src, t1, 1.0, 0);
    seq_cost += testutil::path_cost(gs, p1.nodes, w1);
    auto w2 = testutil::weight_snapshot(seq_state, src, t2, 1.0);
    RoutedPath p2 = route_single(seq_state, src, t2, 1.0, 1);
    seq_cost += testutil::path_cost(gs, p2.nodes, w2);
  }

  RoutingState state(g, cap, params(1, 10, 0));
  auto paths = route_multi_dp(state, src, {t1, t2}, {1.0, 1.0}, {0, 1});
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].nodes == std::vector<int>{src, m1, t1});
  CHECK(paths[1].nodes == std::vector<int>{src, m2, t2});
  // Disjoint sub-paths: dp total equals the sum of the singles.
  double dp_cost = 0.0;
  {
    RoutingGraph gf = g;
    CapacityModel capf = empty_capacity();
    RoutingState fresh(gf, capf, params(1, 10, 0));
    for (const auto& p : paths) {
      auto w = testutil::weight_snapshot(fresh, src, p.nodes.back(), 1.0);
      dp_cost += testutil::path_cost(gf, p.nodes, w);
    }
  }
  CHECK(dp_cost == Catch::Approx(seq_cost).margin(1e-9));
}

namespace {

// Additional cost of a pair of paths from one source under ink+length
// weights: union ink for new edges plus normalized lengths.
double pair_additional_cost(const RoutingGraph& g, RoutingState& state, int src,
                            const std::vector<int>& p1, const std::vector<int>& p2,
                            double k_ink, double k_len) {
  std::set<int> edges;
  auto add_edges = [&](const std::vector<int>& p) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) edges.insert(g.find_edge(p[i], p[i + 1]));
  };
  add_edges(p1);
  add_edges(p2);
  double ink = 0.0;
  for (int e : edges) ink += state.ink_delta(e);
  auto norm = [&](const std::vector<int>& p) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      len += distance(g.node(p[i]).pos, g.node(p[i + 1]).pos);
    return len / distance(g.node(src).pos, g.node(p.back()).pos);
  };
  return k_ink * ink + k_len * (norm(p1) + norm(p2));
}

}  // namespace

TEST_CASE("multi-path dp equals exhaustive pair enumeration and forms a tree") {
  auto gen = testutil::rng(611);
  int solved = 0;
  for (int it = 0; it < 25 && solved < 12; ++it) {
    RoutingGraph g = testutil::random_routing_graph(gen, testutil::uniform_int(gen, 5, 8), 3,
                                                    0.4);
    double ki = testutil::uniform(gen, 0.2, 2.0);
    double kl = testutil::uniform(gen, 1.0, 20.0);
    CapacityModel cap = empty_capacity();

    // Brute force over all simple path pairs.
    RoutingGraph gb = g;
    RoutingState bstate(gb, cap, params(ki, kl, 0));
    auto p1s = testutil::all_simple_paths(gb, 0, 1, {0, 1, 2});
    auto p2s = testutil::all_simple_paths(gb, 0, 2, {0, 1, 2});
    if (p1s.empty() || p2s.empty()) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p1 : p1s)
      for (const auto& p2 : p2s)
        best = std::min(best, pair_additional_cost(gb, bstate, 0, p1, p2, ki, kl));

    RoutingState state(g, cap, params(ki, kl, 0));
    auto paths = route_multi_dp(state, 0, {1, 2}, {1.0, 1.0}, {0, 1});
    REQUIRE(paths.size() == 2);
    // Tree invariant: union of edges has no cycle.
    std::set<int> union_edges;
    std::set<int> union_nodes;
    for (const auto& p : paths) {
      for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
        union_edges.insert(g.find_edge(p.nodes[i], p.nodes[i + 1]));
      for (int v : p.nodes) union_nodes.insert(v);
    }
    CHECK(union_edges.size() == union_nodes.size() - 1);

    RoutingGraph gf = g;
    RoutingState fstate(gf, cap, params(ki, kl, 0));
    double got = pair_additional_cost(gf, fstate, 0, paths[0].nodes, paths[1].nodes, ki, kl);
    CHECK(got == Catch::Approx(best).margin(1e-9));
    ++solved;
  }
  CHECK(solved >= 12);
}

TEST_CASE("multi-path dp never beats itself sequentially run") {
  auto gen = testutil::rng(612);
  for (int it = 0; it < 10; ++it) {
    RoutingGraph g = testutil::random_routing_graph(gen, 8, 3, 0.45);
    double ki = 1.0, kl = 5.0;
    CapacityModel cap = empty_capacity();
    double dp_cost, seq_cost;
    {
      RoutingGraph gc = g;
      RoutingState state(gc, cap, params(ki, kl, 0));
      std::vector<RoutedPath> paths;
      try {
        paths = route_multi_dp(state, 0, {1, 2}, {1.0, 1.0}, {0, 1});
      } catch (const UnroutableError&) {
        continue;
      }
      RoutingGraph gf = g;
      RoutingState fresh(gf, cap, params(ki, kl, 0));
      dp_cost = pair_additional_cost(gf, fresh, 0, paths[0].nodes, paths[1].nodes, ki, kl);
    }
    {
      RoutingGraph gc = g;
      RoutingState state(gc, cap, params(ki, kl, 0));
      std::vector<RoutedPath> paths;
      try {
        paths.push_back(route_single(state, 0, 1, 1.0, 0));
        paths.push_back(route_single(state, 0, 2, 1.0, 1));
      } catch (const UnroutableError&) {
        continue;
      }
      RoutingGraph gf = g;
      RoutingState fresh(gf, cap, params(ki, kl, 0));
      seq_cost = pair_additional_cost(gf, fresh, 0, paths[0].nodes, paths[1].nodes, ki, kl);
    }
    CHECK(dp_cost <= seq_cost + 1e-9);
  }
}

TEST_CASE("multi-path dp refuses too many terminals and bad input") {
  auto gen = testutil::rng(613);
  RoutingGraph g = testutil::random_routing_graph(gen, 12, 11, 0.4);
  CapacityModel cap = empty_capacity();
  RoutingState state(g, cap, params(1, 1, 0));
  std::vector<int> many = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> w(9, 1.0);
  std::vector<int> ids = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  CHECK_THROWS_AS(route_multi_dp(state, 0, many, w, ids, 8), InputError);
  CHECK_THROWS_AS(route_multi_dp(state, 0, {0}, {1.0}, {0}), InputError);
  CHECK_THROWS_AS(route_multi_dp(state, 0, {1, 1}, {1.0, 1.0}, {0, 1}), InputError);
}
