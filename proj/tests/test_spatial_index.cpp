#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "bundling/rtree.hpp"
#include "testutil.hpp"

using namespace bundling;

namespace {
Box box_of(double x0, double y0, double x1, double y1) {
  Box b;
  b.expand(Vec2{x0, y0});
  b.expand(Vec2{x1, y1});
  return b;
}
}  // namespace

TEST_CASE("rtree basics") {
  std::vector<Box> boxes = {box_of(0, 0, 1, 1), box_of(5, 5, 6, 6), box_of(-3, -3, -2, -2)};
  RTree tree(boxes);
  CHECK(tree.query(box_of(10, 10, 11, 11)).empty());
  auto hits = tree.query(box_of(5, 5, 6, 6));
  REQUIRE(hits.size() == 1);
  CHECK(hits[0] == 1);
}

TEST_CASE("rtree equals linear scan on random boxes") {
  auto gen = testutil::rng(99);
  std::vector<Box> boxes;
  for (int i = 0; i < 1000; ++i) {
    double x = testutil::uniform(gen, -100, 100);
    double y = testutil::uniform(gen, -100, 100);
    boxes.push_back(box_of(x, y, x + testutil::uniform(gen, 0.1, 5),
                           y + testutil::uniform(gen, 0.1, 5)));
  }
  RTree tree(boxes);
  for (int q = 0; q < 1000; ++q) {
    double x = testutil::uniform(gen, -105, 105);
    double y = testutil::uniform(gen, -105, 105);
    Box query = box_of(x, y, x + testutil::uniform(gen, 0.1, 8),
                       y + testutil::uniform(gen, 0.1, 8));
    auto hits = tree.query(query);
    std::sort(hits.begin(), hits.end());
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (boxes[i].overlaps(query)) expect.push_back(i);
    CHECK(hits == expect);
  }
}
