#pragma once

// Static R-tree over bounding boxes, bulk-loaded (sort-tile-recursive).
// Queries return a superset of the items whose boxes overlap the query box;
// callers do exact filtering with the geometry predicates. Read-only after
// construction.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "bundling/geometry.hpp"

namespace bundling {

class RTree {
 public:
  RTree() = default;

  explicit RTree(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
    if (boxes_.empty()) return;
    std::vector<std::size_t> idx(boxes_.size());
    std::iota(idx.begin(), idx.end(), 0);
    root_ = build(idx, 0, idx.size(), 0);
  }

  std::size_t size() const { return boxes_.size(); }
  const Box& box(std::size_t i) const { return boxes_[i]; }

  // Appends indices of all stored boxes overlapping q, in tree order.
  void query(const Box& q, std::vector<std::size_t>& out) const {
    if (root_ >= 0) query_node(static_cast<std::size_t>(root_), q, out);
  }

  std::vector<std::size_t> query(const Box& q) const {
    std::vector<std::size_t> out;
    query(q, out);
    return out;
  }

 private:
  static constexpr std::size_t kFanout = 8;

  struct Node {
    Box box;
    bool leaf = false;
    std::vector<std::size_t> children;  // node ids, or box ids for leaves
  };

  long build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, int depth) {
    Node node;
    if (hi - lo <= kFanout) {
      node.leaf = true;
      for (std::size_t i = lo; i < hi; ++i) {
        node.children.push_back(idx[i]);
        node.box.expand(boxes_[idx[i]]);
      }
    } else {
      auto center = [this, depth](std::size_t i) {
        const Box& b = boxes_[i];
        return depth % 2 == 0 ? b.min_x + b.max_x : b.min_y + b.max_y;
      };
      std::sort(idx.begin() + lo, idx.begin() + hi,
                [&](std::size_t a, std::size_t b) {
                  double ca = center(a), cb = center(b);
                  return ca < cb || (ca == cb && a < b);
                });
      std::size_t count = hi - lo;
      std::size_t chunk = (count + kFanout - 1) / kFanout;
      for (std::size_t s = lo; s < hi; s += chunk) {
        long child = build(idx, s, std::min(s + chunk, hi), depth + 1);
        node.children.push_back(static_cast<std::size_t>(child));
        node.box.expand(nodes_[child].box);
      }
    }
    nodes_.push_back(std::move(node));
    return static_cast<long>(nodes_.size() - 1);
  }

  void query_node(std::size_t n, const Box& q, std::vector<std::size_t>& out) const {
    const Node& node = nodes_[n];
    if (!node.box.overlaps(q)) return;
    if (node.leaf) {
      for (std::size_t i : node.children)
        if (boxes_[i].overlaps(q)) out.push_back(i);
    } else {
      for (std::size_t c : node.children) query_node(c, q, out);
    }
  }

  std::vector<Box> boxes_;
  std::vector<Node> nodes_;
  long root_ = -1;
};

}  // namespace bundling
