#include <catch2/catch_amalgamated.hpp>

#include "bundling/cdt.hpp"
#include "testutil.hpp"

using namespace bundling;

namespace {

// Local Delaunay check: for every unconstrained interior edge, neither
// adjacent triangle's circumcircle strictly contains the opposite vertex of
// the other. By the constrained Delaunay lemma this local optimality is
// equivalent to the global empty-circle property relative to visible points.
void check_locally_delaunay(const ConstrainedDelaunay& cdt) {
  auto opposites = cdt.edge_opposites();
  for (const auto& [edge, opp] : opposites) {
    if (opp.size() != 2) continue;  // hull edge
    if (cdt.is_constrained(edge.first, edge.second)) continue;
    Vec2 a = cdt.points()[edge.first];
    Vec2 b = cdt.points()[edge.second];
    Vec2 c = cdt.points()[opp[0]];
    Vec2 d = cdt.points()[opp[1]];
    // Orient (a, b, c) counterclockwise before the incircle test.
    if (cross(b - a, c - a) < 0) std::swap(a, b);
    double m = std::max({(a - d).norm2(), (b - d).norm2(), (c - d).norm2(), 1.0});
    CHECK(ConstrainedDelaunay::incircle(a, b, c, d) <= 1e-7 * m * m);
  }
}

}  // namespace

TEST_CASE("three points give one triangle") {
  ConstrainedDelaunay cdt = ConstrainedDelaunay::build({{0, 0}, {1, 0}, {0, 1}});
  CHECK(cdt.triangles().size() == 1);
  CHECK(cdt.edges().size() == 3);
}

TEST_CASE("duplicate points are merged with a warning count") {
  ConstrainedDelaunay cdt =
      ConstrainedDelaunay::build({{0, 0}, {1, 0}, {0, 1}, {0, 0}, {1, 0}});
  CHECK(cdt.duplicate_count() == 2);
  CHECK(cdt.points().size() == 3);
  CHECK(cdt.remap(3) == cdt.remap(0));
}

TEST_CASE("constrained square sides survive triangulation") {
  // Two squares side by side; all eight sides constrained.
  std::vector<Vec2> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1},
                           {3, 0}, {4, 0}, {4, 1}, {3, 1}};
  std::vector<ConstrainedDelaunay::Edge> cons;
  for (int b : {0, 4})
    for (int k = 0; k < 4; ++k) cons.push_back({b + k, b + (k + 1) % 4});
  ConstrainedDelaunay cdt = ConstrainedDelaunay::build(pts, cons);
  auto edges = cdt.edges();
  auto has_edge = [&](int a, int b) {
    return std::find(edges.begin(), edges.end(),
                     a < b ? ConstrainedDelaunay::Edge{a, b}
                           : ConstrainedDelaunay::Edge{b, a}) != edges.end();
  };
  for (int b : {0, 4})
    for (int k = 0; k < 4; ++k) CHECK(has_edge(b + k, b + (k + 1) % 4));
  check_locally_delaunay(cdt);
}

TEST_CASE("forced crossing edge is carved in") {
  // A quad whose Delaunay diagonal is (1, 3); constrain the other diagonal.
  std::vector<Vec2> pts = {{0, 0}, {2, -0.2}, {4, 0}, {2, 0.2}};
  ConstrainedDelaunay plain = ConstrainedDelaunay::build(pts);
  ConstrainedDelaunay forced = ConstrainedDelaunay::build(pts, {{0, 2}});
  auto has = [](const ConstrainedDelaunay& c, int a, int b) {
    auto edges = c.edges();
    return std::find(edges.begin(), edges.end(), ConstrainedDelaunay::Edge{a, b}) != edges.end();
  };
  CHECK(has(plain, 1, 3));
  CHECK_FALSE(has(plain, 0, 2));
  CHECK(has(forced, 0, 2));
  CHECK(forced.is_constrained(0, 2));
}

TEST_CASE("random point sets are locally delaunay") {
  auto gen = testutil::rng(4242);
  for (int it = 0; it < 20; ++it) {
    std::vector<Vec2> pts;
    int n = testutil::uniform_int(gen, 6, 60);
    for (int i = 0; i < n; ++i)
      pts.push_back({testutil::uniform(gen, -10, 10), testutil::uniform(gen, -10, 10)});
    ConstrainedDelaunay cdt = ConstrainedDelaunay::build(pts);
    check_locally_delaunay(cdt);
  }
}

TEST_CASE("random obstacle squares keep the delaunay property") {
  auto gen = testutil::rng(4243);
  for (int it = 0; it < 8; ++it) {
    std::vector<Vec2> pts;
    std::vector<ConstrainedDelaunay::Edge> cons;
    int squares = testutil::uniform_int(gen, 3, 8);
    for (int s = 0; s < squares; ++s) {
      double cx = (s % 3) * 8.0 + testutil::uniform(gen, -1, 1);
      double cy = (s / 3) * 8.0 + testutil::uniform(gen, -1, 1);
      double h = testutil::uniform(gen, 0.5, 2.0);
      int base = static_cast<int>(pts.size());
      pts.push_back({cx + h, cy + h});
      pts.push_back({cx - h, cy + h});
      pts.push_back({cx - h, cy - h});
      pts.push_back({cx + h, cy - h});
      for (int k = 0; k < 4; ++k) cons.push_back({base + k, base + (k + 1) % 4});
    }
    ConstrainedDelaunay cdt = ConstrainedDelaunay::build(pts, cons);
    for (const auto& c : cons) CHECK(cdt.is_constrained(cdt.remap(c.first), cdt.remap(c.second)));
    check_locally_delaunay(cdt);
  }
}
