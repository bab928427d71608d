#include <catch2/catch_amalgamated.hpp>

#include "bundling/geometry.hpp"
#include "testutil.hpp"

using namespace bundling;

namespace {
ConvexPolygon unit_square() {
  return ConvexPolygon({{0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}});
}
}  // namespace

TEST_CASE("point-to-polygon distance basics") {
  ConvexPolygon sq = unit_square();
  CHECK(distance_point_to_polygon({0.1, -0.2}, sq) == 0.0);
  CHECK(distance_point_to_polygon({0.5, 0.5}, sq) == 0.0);  // corner contact
  CHECK(distance_point_to_polygon({2.0, 0.0}, sq) == Catch::Approx(1.5).margin(1e-12));
}

TEST_CASE("point-to-polygon distance matches boundary-sampling oracle") {
  auto gen = testutil::rng(7001);
  for (int it = 0; it < 100; ++it) {
    Vec2 center{testutil::uniform(gen, -5, 5), testutil::uniform(gen, -5, 5)};
    ConvexPolygon poly = testutil::random_convex_polygon(gen, center, 0.5, 3.0);
    Vec2 p{testutil::uniform(gen, -10, 10), testutil::uniform(gen, -10, 10)};
    double expect = testutil::distance_oracle(p, poly);
    CHECK(distance_point_to_polygon(p, poly) == Catch::Approx(expect).margin(1e-9));
  }
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), InvalidGeometryError);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), InvalidGeometryError);  // collinear
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), InvalidGeometryError);  // CW
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), InvalidGeometryError);
}

TEST_CASE("segment and circle intersection with a polygon") {
  ConvexPolygon sq = unit_square();
  CHECK(intersects(Segment{{-2, 0}, {2, 0}}, sq));
  CHECK_FALSE(intersects(Segment{{-2, 3}, {2, 3}}, sq));

  // Circle externally tangent to the right edge x = 0.5: the contact point
  // solves the segment-circle distance exactly.
  CHECK(intersects(Circle{{1.5, 0.0}, 1.0}, sq, 1e-12));
  CHECK_FALSE(intersects(Circle{{1.5, 0.0}, 1.0 - 1e-6}, sq, 1e-12));
}

TEST_CASE("distance zero exactly when a degenerate circle intersects") {
  auto gen = testutil::rng(7002);
  for (int it = 0; it < 200; ++it) {
    Vec2 center{testutil::uniform(gen, -3, 3), testutil::uniform(gen, -3, 3)};
    ConvexPolygon poly = testutil::random_convex_polygon(gen, center, 0.4, 2.0);
    Vec2 p{testutil::uniform(gen, -6, 6), testutil::uniform(gen, -6, 6)};
    bool zero = distance_point_to_polygon(p, poly) == 0.0;
    bool touch = intersects(Circle{p, 0.0}, poly, 0.0);
    CHECK(zero == touch);
  }
}

TEST_CASE("segment interior crossing ignores boundary grazing") {
  ConvexPolygon sq = unit_square();
  CHECK(segment_crosses_interior({-2, 0}, {2, 0}, sq));
  CHECK_FALSE(segment_crosses_interior({-2, 0.5}, {2, 0.5}, sq));   // runs along the top edge
  CHECK_FALSE(segment_crosses_interior({0.5, -2}, {0.5, 2}, sq));   // along the right edge
  CHECK_FALSE(segment_crosses_interior({-2, 2}, {2, 2}, sq));
  CHECK(segment_crosses_interior({0, 0}, {3, 0}, sq));  // starts inside
}

TEST_CASE("proper segment crossing") {
  CHECK(segments_properly_cross({-1, 0}, {1, 0}, {0, -1}, {0, 1}));
  CHECK_FALSE(segments_properly_cross({-1, 0}, {1, 0}, {1, 0}, {2, 5}));   // endpoint contact
  CHECK_FALSE(segments_properly_cross({-1, 0}, {1, 0}, {0, 0}, {2, 0}));   // collinear overlap
  CHECK_FALSE(segments_properly_cross({-1, 0}, {1, 0}, {0, 1e-13}, {0, 2}));  // grazing
}

TEST_CASE("convex offset grows the polygon uniformly") {
  ConvexPolygon sq = unit_square();
  ConvexPolygon grown = offset_convex(sq, 0.25);
  for (const Vec2& v : sq.vertices()) CHECK(grown.signed_distance(v) < -0.2);
  // Edge lines move out by exactly the margin.
  CHECK(distance_point_to_polygon({0.75 + 0.1, 0.0}, grown) == Catch::Approx(0.1).margin(1e-12));
}
