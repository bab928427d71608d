#pragma once

// Capacity segments and overflow accounting. A capacity segment is a
// Delaunay edge of the obstacle triangulation that connects two different
// obstacles; its capacity is (|a,B| + |b,A|) / 2. Paths assigned to a
// segment accumulate routing width w = sum of widths + (k-1) * separation,
// and the segment's overflow penalty is (w - c)^+; the ledger keeps the
// total overflow C incrementally.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "bundling/cdt.hpp"
#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"
#include "bundling/obstacles.hpp"
#include "bundling/rtree.hpp"

namespace bundling {

struct CapacitySegment {
  int id = -1;
  Vec2 a;
  Vec2 b;
  int obstacle_a = -1;
  int obstacle_b = -1;
  double capacity = 0.0;  // c_sigma
};

class CapacityModel {
 public:
  CapacityModel() = default;

  explicit CapacityModel(std::vector<CapacitySegment> segments)
      : segments_(std::move(segments)) {
    std::vector<Box> boxes;
    boxes.reserve(segments_.size());
    for (const auto& s : segments_) boxes.push_back(Box::of(s.a, s.b));
    index_ = RTree(std::move(boxes));
  }

  const std::vector<CapacitySegment>& segments() const { return segments_; }

  // Segment ids properly crossed by (a, b); endpoint grazing does not count.
  std::vector<int> crossed_by_segment(Vec2 a, Vec2 b) const {
    std::vector<int> out;
    for (std::size_t i : index_.query(Box::of(a, b)))
      if (segments_properly_cross(a, b, segments_[i].a, segments_[i].b))
        out.push_back(static_cast<int>(i));
    std::sort(out.begin(), out.end());
    return out;
  }

  // Union of segments crossed by any polyline piece (set semantics).
  std::vector<int> crossed_by_polyline(const std::vector<Vec2>& pts) const {
    std::set<int> hit;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      for (int s : crossed_by_segment(pts[i], pts[i + 1])) hit.insert(s);
    return {hit.begin(), hit.end()};
  }

 private:
  std::vector<CapacitySegment> segments_;
  RTree index_;
};

// Triangulates the (shrunk) obstacle boundary points with the hull sides
// constrained, and extracts the Delaunay edges that connect two different
// obstacles.
inline CapacityModel build_capacity_model(const std::vector<Obstacle>& obstacles) {
  std::vector<Vec2> pts;
  std::vector<int> owner;
  std::vector<ConstrainedDelaunay::Edge> constraints;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    int base = static_cast<int>(pts.size());
    const auto& bps = obstacles[i].boundary_points;
    for (std::size_t k = 0; k < bps.size(); ++k) {
      pts.push_back(obstacles[i].shrunk_boundary_point(k));
      owner.push_back(static_cast<int>(i));
    }
    for (std::size_t k = 0; k < bps.size(); ++k)
      constraints.push_back({base + static_cast<int>(k),
                             base + static_cast<int>((k + 1) % bps.size())});
  }
  if (pts.size() < 3) return CapacityModel(std::vector<CapacitySegment>{});

  ConstrainedDelaunay cdt = ConstrainedDelaunay::build(pts, constraints);
  // Map deduped vertices back to owners (duplicates can only merge points of
  // the same obstacle, which is harmless for ownership).
  std::vector<int> vertex_owner(cdt.points().size(), -1);
  for (std::size_t i = 0; i < pts.size(); ++i) vertex_owner[cdt.remap(static_cast<int>(i))] = owner[i];

  std::vector<CapacitySegment> segs;
  for (const auto& [u, v] : cdt.edges()) {
    int ou = vertex_owner[u], ov = vertex_owner[v];
    if (ou < 0 || ov < 0 || ou == ov) continue;
    CapacitySegment s;
    s.id = static_cast<int>(segs.size());
    s.a = cdt.points()[u];
    s.b = cdt.points()[v];
    s.obstacle_a = ou;
    s.obstacle_b = ov;
    s.capacity = 0.5 * (distance_point_to_polygon(s.a, obstacles[ov].shrunk()) +
                        distance_point_to_polygon(s.b, obstacles[ou].shrunk()));
    segs.push_back(s);
  }
  return CapacityModel(std::move(segs));
}

class CapacityLedger {
 public:
  CapacityLedger() = default;
  CapacityLedger(std::size_t segment_count, const std::vector<double>& capacities,
                 double separation)
      : caps_(capacities), separation_(separation), assigned_(segment_count),
        widths_(segment_count, 0.0), overflow_(segment_count, 0.0) {}

  CapacityLedger(const CapacityModel& model, double separation)
      : separation_(separation) {
    caps_.reserve(model.segments().size());
    for (const auto& s : model.segments()) caps_.push_back(s.capacity);
    assigned_.resize(caps_.size());
    widths_.assign(caps_.size(), 0.0);
    overflow_.assign(caps_.size(), 0.0);
  }

  std::size_t segment_count() const { return caps_.size(); }
  double capacity_of(int seg) const { return caps_[seg]; }
  double width_of(int seg) const { return widths_[seg]; }
  double overflow_of(int seg) const { return overflow_[seg]; }
  const std::map<int, double>& assigned(int seg) const { return assigned_[seg]; }

  // C, summed from the per-segment penalties in fixed order; the penalties
  // themselves are recomputed from stored widths, so assign followed by
  // remove restores the total bit-exactly.
  double total_overflow() const {
    if (total_dirty_) {
      total_ = 0.0;
      for (double p : overflow_) total_ += p;
      total_dirty_ = false;
    }
    return total_;
  }

  // Overflow increase if one more path of `width` were assigned to seg.
  double delta_if_added(int seg, double width) const {
    double extra = width + (assigned_[seg].empty() ? 0.0 : separation_);
    double nw = widths_[seg] + extra;
    return penalty(nw, caps_[seg]) - overflow_[seg];
  }

  void assign_path(int path_id, double width, const std::vector<int>& segs) {
    for (int s : segs) {
      if (!assigned_[s].emplace(path_id, width).second)
        throw InternalError("path assigned twice to a capacity segment");
      refresh(s);
    }
  }

  void remove_path(int path_id, const std::vector<int>& segs) {
    for (int s : segs) {
      if (assigned_[s].erase(path_id) == 0)
        throw InternalError("removing a path that was never assigned");
      refresh(s);
    }
  }

  // From-scratch C over the stored assignments (oracle for the incremental
  // total).
  double recompute_total() const {
    double c = 0.0;
    for (std::size_t s = 0; s < caps_.size(); ++s) {
      double w = recompute_width(static_cast<int>(s));
      c += penalty(w, caps_[s]);
    }
    return c;
  }

 private:
  static double penalty(double w, double cap) { return w > cap ? w - cap : 0.0; }

  double recompute_width(int s) const {
    if (assigned_[s].empty()) return 0.0;
    double w = 0.0;
    for (const auto& [id, width] : assigned_[s]) w += width;
    return w + separation_ * static_cast<double>(assigned_[s].size() - 1);
  }

  void refresh(int s) {
    widths_[s] = recompute_width(s);
    overflow_[s] = penalty(widths_[s], caps_[s]);
    total_dirty_ = true;
  }

  std::vector<double> caps_;
  double separation_ = 0.0;
  std::vector<std::map<int, double>> assigned_;  // path id -> width
  std::vector<double> widths_;
  std::vector<double> overflow_;
  mutable double total_ = 0.0;
  mutable bool total_dirty_ = false;
};

}  // namespace bundling
