#pragma once

// Step 3: order the paths of every bundle so that only unavoidable
// crossings remain, each happening exactly once.
//
// Model: for two paths sharing a maximal run of common edges, the relative
// order along the run plus the forced configuration at its two ends forms a
// bit chain; every adjacent disagreement in the chain is one crossing. The
// forced end bits come from the cyclic order of edges around the fork node:
//   entry end (paths merge into the run): left-to-right order equals
//     ascending counterclockwise rank of the branch edges measured from the
//     run direction;
//   exit end (paths leave the run): left-to-right order equals descending
//     counterclockwise rank measured from the reverse run direction.
// A pair is unavoidably crossing exactly when the two forced bits disagree.
//
// Two solvers are provided: the comparator-based simple algorithm and the
// linear-time delete/reinsert algorithm with a deletion forest; plus a
// brute-force oracle, a niceness test, and the tree-specific nice ordering.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bundling/errors.hpp"
#include "bundling/geometry.hpp"

namespace bundling {

class OrderInstance {
 public:
  // Embedded instance: node positions define the clockwise edge order.
  static OrderInstance from_positions(std::vector<Vec2> positions,
                                      std::vector<std::pair<int, int>> edges,
                                      std::vector<std::vector<int>> paths) {
    OrderInstance in;
    in.positions_ = std::move(positions);
    in.node_count_ = static_cast<int>(in.positions_.size());
    in.init_edges(std::move(edges));
    in.rotations_.assign(in.node_count_, {});
    for (int v = 0; v < in.node_count_; ++v) {
      std::vector<int>& rot = in.rotations_[v];
      for (const auto& [a, b] : in.edges_)
        if (a == v) rot.push_back(b);
        else if (b == v) rot.push_back(a);
      std::sort(rot.begin(), rot.end(), [&](int x, int y) {
        double ax = angle_of(in.positions_[x] - in.positions_[v]);
        double ay = angle_of(in.positions_[y] - in.positions_[v]);
        if (ax != ay) return ax > ay;  // clockwise
        return x < y;
      });
    }
    in.set_paths(std::move(paths));
    return in;
  }

  // Abstract instance: explicit clockwise neighbor lists.
  static OrderInstance from_rotations(int node_count,
                                      std::vector<std::pair<int, int>> edges,
                                      std::vector<std::vector<int>> rotations,
                                      std::vector<std::vector<int>> paths) {
    OrderInstance in;
    in.node_count_ = node_count;
    in.init_edges(std::move(edges));
    in.rotations_ = std::move(rotations);
    if (static_cast<int>(in.rotations_.size()) != node_count)
      throw InputError("rotation list count does not match node count");
    in.set_paths(std::move(paths));
    return in;
  }

  int node_count() const { return node_count_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::vector<int>>& paths() const { return paths_; }
  const std::vector<Vec2>& positions() const { return positions_; }
  const std::vector<std::vector<int>>& rotations() const { return rotations_; }
  bool is_terminal(int v) const { return terminal_[v]; }

  int edge_id(int a, int b) const {
    auto it = edge_index_.find(a < b ? std::pair{a, b} : std::pair{b, a});
    return it == edge_index_.end() ? -1 : it->second;
  }

  const std::vector<int>& paths_on_edge(int e) const { return edge_paths_[e]; }

  // Position of neighbor x in the counterclockwise rotation around v,
  // counted from neighbor ref (rank 1 = immediately counterclockwise).
  int rank_ccw_from(int v, int ref, int x) const {
    const auto& rot = rotations_[v];
    int t = static_cast<int>(rot.size());
    int ir = -1, ix = -1;
    for (int i = 0; i < t; ++i) {
      if (rot[i] == ref) ir = i;
      if (rot[i] == x) ix = i;
    }
    if (ir < 0 || ix < 0) throw InternalError("rotation rank query for a non-neighbor");
    // Rotation is stored clockwise, so counterclockwise walks backward.
    return ((ir - ix) % t + t) % t;
  }

 private:
  void init_edges(std::vector<std::pair<int, int>> edges) {
    for (auto& [a, b] : edges) {
      if (a == b) throw InputError("ordering instance has a self-loop");
      if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    for (std::size_t i = 0; i < edges_.size(); ++i) edge_index_[edges_[i]] = static_cast<int>(i);
  }

  void set_paths(std::vector<std::vector<int>> paths) {
    paths_ = std::move(paths);
    edge_paths_.assign(edges_.size(), {});
    terminal_.assign(node_count_, false);
    std::vector<char> interior(node_count_, false);
    for (std::size_t pi = 0; pi < paths_.size(); ++pi) {
      const auto& p = paths_[pi];
      if (p.size() < 2) throw InputError("path " + std::to_string(pi) + " is too short");
      std::set<int> seen(p.begin(), p.end());
      if (seen.size() != p.size())
        throw InputError("path " + std::to_string(pi) + " is not simple");
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        int e = edge_id(p[i], p[i + 1]);
        if (e < 0)
          throw InputError("path " + std::to_string(pi) + " uses a missing edge");
        edge_paths_[e].push_back(static_cast<int>(pi));
      }
      terminal_[p.front()] = terminal_[p.back()] = true;
      for (std::size_t i = 1; i + 1 < p.size(); ++i) interior[p[i]] = true;
    }
    for (int v = 0; v < node_count_; ++v)
      if (terminal_[v] && interior[v])
        throw InputError("path terminal property violated at node " + std::to_string(v));
  }

  int node_count_ = 0;
  std::vector<Vec2> positions_;
  std::vector<std::pair<int, int>> edges_;
  std::map<std::pair<int, int>, int> edge_index_;
  std::vector<std::vector<int>> rotations_;  // clockwise neighbor lists
  std::vector<std::vector<int>> paths_;
  std::vector<std::vector<int>> edge_paths_;
  std::vector<char> terminal_;
};

// Per-edge total orders; order[e] lists path ids left-to-right as seen along
// the canonical edge direction (lower node id to higher).
struct BundleOrdering {
  std::vector<std::vector<int>> order;

  int position(int e, int path) const {
    const auto& o = order[e];
    for (std::size_t i = 0; i < o.size(); ++i)
      if (o[i] == path) return static_cast<int>(i);
    throw InternalError("path missing from its edge order");
  }

  bool before(int e, int p1, int p2, bool along_canonical) const {
    bool b = position(e, p1) < position(e, p2);
    return along_canonical ? b : !b;
  }
};

// One maximal run of edges common to a pair of paths, oriented along the
// first path's traversal.
struct CommonRun {
  std::vector<int> nodes;  // n_0 .. n_m
  std::vector<int> edge_ids;
  std::vector<bool> forward;            // run direction equals canonical direction
  std::optional<bool> entry_first;      // forced: path i left of path j entering
  std::optional<bool> exit_first;       // forced: path i left of path j leaving
};

namespace detail {

inline std::vector<CommonRun> common_runs(const OrderInstance& in, int pi, int pj) {
  const auto& A = in.paths()[pi];
  const auto& B = in.paths()[pj];
  std::map<std::pair<int, int>, int> b_edge_pos;  // canonical edge -> index in B
  for (std::size_t k = 0; k + 1 < B.size(); ++k) {
    auto key = B[k] < B[k + 1] ? std::pair{B[k], B[k + 1]} : std::pair{B[k + 1], B[k]};
    b_edge_pos[key] = static_cast<int>(k);
  }
  auto shared = [&](std::size_t k) {
    auto key = A[k] < A[k + 1] ? std::pair{A[k], A[k + 1]} : std::pair{A[k + 1], A[k]};
    return b_edge_pos.count(key) > 0;
  };

  std::vector<CommonRun> runs;
  std::size_t k = 0;
  while (k + 1 < A.size()) {
    if (!shared(k)) {
      ++k;
      continue;
    }
    std::size_t k0 = k;
    while (k + 1 < A.size() && shared(k)) ++k;
    std::size_t k1 = k;  // edges k0 .. k1-1 shared
    CommonRun run;
    for (std::size_t i = k0; i <= k1; ++i) run.nodes.push_back(A[i]);
    for (std::size_t i = k0; i < k1; ++i) {
      int a = A[i], b = A[i + 1];
      run.edge_ids.push_back(in.edge_id(a, b));
      run.forward.push_back(a < b);
    }
    // Branch neighbors outside the run at each end (nullopt when the path
    // terminates there).
    auto neighbor_outside = [&](const std::vector<int>& P, int node, int inside) -> std::optional<int> {
      for (std::size_t t = 0; t < P.size(); ++t) {
        if (P[t] != node) continue;
        if (t > 0 && P[t - 1] != inside) return P[t - 1];
        if (t + 1 < P.size() && P[t + 1] != inside) return P[t + 1];
        return std::nullopt;
      }
      throw InternalError("run end missing from a path");
    };
    int n0 = run.nodes.front(), n1 = run.nodes[1];
    int nm = run.nodes.back(), nm1 = run.nodes[run.nodes.size() - 2];
    auto ai = neighbor_outside(A, n0, n1);
    auto aj = neighbor_outside(B, n0, n1);
    auto bi = neighbor_outside(A, nm, nm1);
    auto bj = neighbor_outside(B, nm, nm1);
    if (ai.has_value() != aj.has_value() || bi.has_value() != bj.has_value())
      throw InputError("path terminal property violated at a fork node");
    if (ai && aj)
      run.entry_first = in.rank_ccw_from(n0, n1, *ai) < in.rank_ccw_from(n0, n1, *aj);
    if (bi && bj)
      run.exit_first = in.rank_ccw_from(nm, nm1, *bi) > in.rank_ccw_from(nm, nm1, *bj);
    runs.push_back(std::move(run));
  }
  return runs;
}

inline int run_crossings(const CommonRun& run, const BundleOrdering& ord, int pi, int pj) {
  std::vector<bool> bits;
  if (run.entry_first) bits.push_back(*run.entry_first);
  for (std::size_t i = 0; i < run.edge_ids.size(); ++i)
    bits.push_back(ord.before(run.edge_ids[i], pi, pj, run.forward[i]));
  if (run.exit_first) bits.push_back(*run.exit_first);
  int c = 0;
  for (std::size_t i = 0; i + 1 < bits.size(); ++i) c += bits[i] != bits[i + 1];
  return c;
}

}  // namespace detail

// Total crossings of an ordering: per path pair and maximal common run, one
// crossing per adjacent disagreement in the orientation chain.
inline int count_crossings(const OrderInstance& in, const BundleOrdering& ord) {
  int total = 0;
  const int P = static_cast<int>(in.paths().size());
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j)
      for (const CommonRun& run : detail::common_runs(in, i, j))
        total += detail::run_crossings(run, ord, i, j);
  return total;
}

// Crossings between one pair under an ordering.
inline int pair_crossings(const OrderInstance& in, const BundleOrdering& ord, int pi, int pj) {
  int total = 0;
  for (const CommonRun& run : detail::common_runs(in, pi, pj))
    total += detail::run_crossings(run, ord, pi, pj);
  return total;
}

// Minimum possible crossings of a pair over all orderings (forced end bits
// only), and whether the pair crosses unavoidably.
inline int pair_min_crossings(const OrderInstance& in, int pi, int pj) {
  int total = 0;
  for (const CommonRun& run : detail::common_runs(in, pi, pj))
    if (run.entry_first && run.exit_first && *run.entry_first != *run.exit_first) ++total;
  return total;
}

// ---- simple algorithm -----------------------------------------------------

namespace detail {

// Comparator state for the simple algorithm: walks the common subpath of two
// paths outward from the processed edge, reusing already-ordered edges and
// falling back to the fork rules.
class SimpleOrderer {
 public:
  explicit SimpleOrderer(const OrderInstance& in) : in_(&in) {
    done_.assign(in.edges().size(), false);
    result_.order.assign(in.edges().size(), {});
  }

  // Processes edges in the given sequence with the given walk direction
  // (from -> to must be an edge). Default: canonical order and direction.
  BundleOrdering run(const std::vector<std::pair<int, std::pair<int, int>>>& schedule) {
    for (const auto& [e, dir] : schedule) {
      auto paths = in_->paths_on_edge(e);
      std::sort(paths.begin(), paths.end());
      std::vector<int> sorted;
      for (int p : paths) {
        std::size_t pos = 0;
        while (pos < sorted.size() && !before(p, sorted[pos], dir.first, dir.second)) ++pos;
        sorted.insert(sorted.begin() + static_cast<long>(pos), p);
      }
      // Stored orders are along the canonical direction.
      if (dir.first > dir.second) std::reverse(sorted.begin(), sorted.end());
      result_.order[e] = std::move(sorted);
      done_[e] = true;
    }
    return std::move(result_);
  }

 private:
  // Orientation of path p around edge (u, v): index of u, stepping +1 toward v.
  struct Walker {
    const std::vector<int>* seq;
    int at;    // index of the current node
    int step;  // +1 or -1 toward v along the path
  };

  Walker make_walker(int p, int u, int v) const {
    const auto& seq = in_->paths()[p];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      if (seq[i] == u && seq[i + 1] == v) return {&seq, static_cast<int>(i), 1};
      if (seq[i] == v && seq[i + 1] == u) return {&seq, static_cast<int>(i + 1), -1};
    }
    throw InternalError("path does not traverse the edge being ordered");
  }

  // True when p1 is left of p2 as seen along the walk direction u -> v.
  bool before(int p1, int p2, int u, int v) const {
    Walker w1 = make_walker(p1, u, v);
    Walker w2 = make_walker(p2, u, v);
    // Backward walk (away from v through u).
    int cur = u;
    int cur_next = v;  // the run neighbor on the v side of cur
    Walker b1 = w1, b2 = w2;
    while (true) {
      std::optional<int> prev1 = step_back(b1);
      std::optional<int> prev2 = step_back(b2);
      if (!prev1 && !prev2) break;  // both terminate at cur
      if (!prev1 || !prev2)
        throw InputError("path terminal property violated at node " + std::to_string(cur));
      if (*prev1 != *prev2) {
        // Entry fork at cur: ascending CCW rank from the run direction.
        return in_->rank_ccw_from(cur, cur_next, *prev1) <
               in_->rank_ccw_from(cur, cur_next, *prev2);
      }
      int prev = *prev1;
      int e = in_->edge_id(prev, cur);
      if (done_[e]) {
        // Reuse, read along the run direction (prev -> cur, toward v).
        return result_.before(e, p1, p2, prev < cur);
      }
      cur_next = cur;
      cur = prev;
    }
    // Forward walk (beyond v).
    cur = v;
    int cur_prev = u;
    Walker f1 = w1, f2 = w2;
    f1.at += f1.step;  // cursor onto v
    f2.at += f2.step;
    while (true) {
      std::optional<int> next1 = step_forward(f1);
      std::optional<int> next2 = step_forward(f2);
      if (!next1 && !next2) break;  // coincident paths
      if (!next1 || !next2)
        throw InputError("path terminal property violated at node " + std::to_string(cur));
      if (*next1 != *next2) {
        // Exit fork at cur: descending CCW rank from the reverse direction.
        return in_->rank_ccw_from(cur, cur_prev, *next1) >
               in_->rank_ccw_from(cur, cur_prev, *next2);
      }
      int next = *next1;
      int e = in_->edge_id(cur, next);
      if (done_[e]) {
        return result_.before(e, p1, p2, cur < next);
      }
      cur_prev = cur;
      cur = next;
    }
    return p1 < p2;  // coincident: by path id
  }

  static std::optional<int> step_back(Walker& w) {
    int idx = w.at - w.step;
    if (idx < 0 || idx >= static_cast<int>(w.seq->size())) return std::nullopt;
    w.at = idx;
    return (*w.seq)[idx];
  }
  static std::optional<int> step_forward(Walker& w) {
    // The walker's `at` tracks the backward cursor; forward walking uses its
    // own cursor starting just past v.
    int idx = w.at + w.step;
    if (idx < 0 || idx >= static_cast<int>(w.seq->size())) return std::nullopt;
    w.at = idx;
    return (*w.seq)[idx];
  }

  const OrderInstance* in_;
  std::vector<char> done_;
  BundleOrdering result_;
};

}  // namespace detail

inline BundleOrdering order_simple(const OrderInstance& in) {
  std::vector<std::pair<int, std::pair<int, int>>> schedule;
  for (std::size_t e = 0; e < in.edges().size(); ++e)
    schedule.push_back({static_cast<int>(e), in.edges()[e]});
  return detail::SimpleOrderer(in).run(schedule);
}

// Nice ordering on a tree: process edges deepest-first, walking away from
// the root, so every pair is decided at the deep end of its common subpath
// and reused unchanged along it.
inline BundleOrdering order_nice_tree(const OrderInstance& in) {
  const int n = in.node_count();
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : in.edges()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  // Tree check + BFS depths from a terminal root.
  if (static_cast<int>(in.edges().size()) != n - 1)
    throw InputError("order_nice_tree requires a tree instance");
  int root = -1;
  for (int v = 0; v < n && root < 0; ++v)
    if (in.is_terminal(v)) root = v;
  if (root < 0) root = 0;
  std::vector<int> depth(n, -1), parent(n, -1), bfs{root};
  depth[root] = 0;
  for (std::size_t h = 0; h < bfs.size(); ++h) {
    int v = bfs[h];
    for (int w : adj[v])
      if (depth[w] < 0) {
        depth[w] = depth[v] + 1;
        parent[w] = v;
        bfs.push_back(w);
      }
  }
  for (int v = 0; v < n; ++v)
    if (depth[v] < 0) throw InputError("order_nice_tree requires a connected tree");

  std::vector<std::pair<int, std::pair<int, int>>> schedule;
  for (std::size_t e = 0; e < in.edges().size(); ++e) {
    auto [a, b] = in.edges()[e];
    int child = depth[a] > depth[b] ? a : b;
    schedule.push_back({static_cast<int>(e), {child == a ? b : a, child}});
  }
  std::sort(schedule.begin(), schedule.end(), [&](const auto& x, const auto& y) {
    int dx = depth[x.second.second], dy = depth[y.second.second];
    if (dx != dy) return dx > dy;
    return x.first < y.first;
  });
  return detail::SimpleOrderer(in).run(schedule);
}

// ---- brute force ------------------------------------------------------------

struct BruteForceResult {
  int crossings = 0;
  BundleOrdering ordering;
};

// Exact minimum over all per-edge permutations. Refuses beyond the given
// state-space budget.
inline BruteForceResult brute_force_min(const OrderInstance& in,
                                        std::uint64_t max_states = 10'000'000) {
  std::vector<int> multi;  // edges with >= 2 paths
  std::uint64_t states = 1;
  for (std::size_t e = 0; e < in.edges().size(); ++e) {
    std::size_t k = in.paths_on_edge(e).size();
    if (k >= 2) {
      multi.push_back(static_cast<int>(e));
      for (std::size_t f = 2; f <= k; ++f) {
        states *= f;
        if (states > max_states)
          throw InputError("brute_force_min refused: instance too large");
      }
    }
  }
  BundleOrdering base;
  base.order.assign(in.edges().size(), {});
  for (std::size_t e = 0; e < in.edges().size(); ++e) {
    base.order[e] = in.paths_on_edge(e);
    std::sort(base.order[e].begin(), base.order[e].end());
  }

  BruteForceResult best;
  best.crossings = -1;
  BundleOrdering current = base;
  std::vector<std::vector<int>> perms(multi.size());
  for (std::size_t i = 0; i < multi.size(); ++i) perms[i] = base.order[multi[i]];

  std::function<void(std::size_t)> recurse = [&](std::size_t i) {
    if (i == multi.size()) {
      int c = count_crossings(in, current);
      if (best.crossings < 0 || c < best.crossings) {
        best.crossings = c;
        best.ordering = current;
      }
      return;
    }
    std::vector<int>& perm = perms[i];
    std::sort(perm.begin(), perm.end());
    do {
      current.order[multi[i]] = perm;
      recurse(i + 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
  };
  recurse(0);
  if (best.crossings < 0) {
    best.crossings = count_crossings(in, base);
    best.ordering = base;
  }
  return best;
}

// True when the consistent ordering keeps one relative order per path pair
// along all their common edges.
inline bool is_nice(const OrderInstance& in, const BundleOrdering& ord) {
  const int P = static_cast<int>(in.paths().size());
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j) {
      std::optional<bool> seen;
      for (const CommonRun& run : detail::common_runs(in, i, j))
        for (std::size_t k = 0; k < run.edge_ids.size(); ++k) {
          bool bit = ord.before(run.edge_ids[k], i, j, run.forward[k]);
          if (seen && *seen != bit) return false;
          seen = bit;
        }
    }
  return true;
}

// ---- linear-time algorithm --------------------------------------------------

namespace detail {

// Edge identity in the shrinking graph H plus the deletion-forest bookkeeping.
struct LinEdge {
  int a = -1, b = -1;  // stored direction a -> b
  int orig = -1;       // instance edge id for initial edges
  std::vector<int> paths;  // path ids currently on the edge (unordered)
  // children: (edge id, read child a->b when true), in concatenation order
  // for the inward direction (far endpoint toward the deleted node).
  std::vector<std::pair<int, bool>> children;
  bool replaced = false;
  bool inward_forward = true;  // inward direction equals stored a -> b
  std::vector<int> ordered;    // final order along a -> b
};

}  // namespace detail

// The delete/reinsert algorithm: Phase 1 removes every non-terminal node,
// replacing the paths through it by chord edges inserted into the clockwise
// rotations; Phase 2 rebuilds each replaced edge's order by concatenating
// its children's orders.
inline BundleOrdering order_linear(const OrderInstance& in) {
  using detail::LinEdge;
  const int n = in.node_count();
  std::vector<LinEdge> ledges;
  std::map<std::pair<int, int>, int> initial_edge;  // canonical -> ledge id

  // H is induced by the union of the paths.
  for (std::size_t e = 0; e < in.edges().size(); ++e) {
    if (in.paths_on_edge(e).empty()) continue;
    LinEdge le;
    le.a = in.edges()[e].first;
    le.b = in.edges()[e].second;
    le.orig = static_cast<int>(e);
    le.paths = in.paths_on_edge(e);
    initial_edge[in.edges()[e]] = static_cast<int>(ledges.size());
    ledges.push_back(std::move(le));
  }

  // Clockwise rotations over ledge ids, restricted to H.
  std::vector<std::vector<int>> rot(n);
  for (int v = 0; v < n; ++v)
    for (int nb : in.rotations()[v]) {
      auto it = initial_edge.find(v < nb ? std::pair{v, nb} : std::pair{nb, v});
      if (it != initial_edge.end()) rot[v].push_back(it->second);
    }

  // Paths as ledge-id sequences.
  std::vector<std::vector<int>> pedges(in.paths().size());
  for (std::size_t p = 0; p < in.paths().size(); ++p) {
    const auto& seq = in.paths()[p];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      auto key = seq[i] < seq[i + 1] ? std::pair{seq[i], seq[i + 1]}
                                     : std::pair{seq[i + 1], seq[i]};
      pedges[p].push_back(initial_edge.at(key));
    }
  }
  // Node position of each path's visit list, for splicing.
  std::vector<std::vector<int>> pnodes(in.paths().size());
  for (std::size_t p = 0; p < in.paths().size(); ++p) pnodes[p] = in.paths()[p];

  auto other_end = [&](int le, int v) { return ledges[le].a == v ? ledges[le].b : ledges[le].a; };

  for (int v = 0; v < n; ++v) {
    if (in.is_terminal(v)) continue;
    if (rot[v].empty()) continue;

    // Slot indices around v, clockwise.
    const std::vector<int> slots = rot[v];
    const int t = static_cast<int>(slots.size());
    std::map<int, int> slot_of;
    for (int i = 0; i < t; ++i) slot_of[slots[i]] = i;

    // Group path visits by their unordered slot pair.
    std::map<std::pair<int, int>, std::vector<int>> groups;  // (slot_in, slot_out)
    for (std::size_t p = 0; p < pedges.size(); ++p) {
      for (std::size_t i = 0; i < pnodes[p].size(); ++i) {
        if (pnodes[p][i] != v) continue;
        if (i == 0 || i + 1 == pnodes[p].size())
          throw InternalError("path terminates at a non-terminal node");
        int ein = pedges[p][i - 1];
        int eout = pedges[p][i];
        int sa = slot_of.at(ein), sb = slot_of.at(eout);
        if (sa > sb) std::swap(sa, sb);
        groups[{sa, sb}].push_back(static_cast<int>(p));
      }
    }

    // One chord per slot pair, stored from the lower slot's far endpoint.
    std::map<std::pair<int, int>, int> chord_of;
    for (const auto& [key, pths] : groups) {
      auto [sa, sb] = key;
      LinEdge chord;
      chord.a = other_end(slots[sa], v);
      chord.b = other_end(slots[sb], v);
      chord.paths = pths;
      int id = static_cast<int>(ledges.size());
      ledges.push_back(std::move(chord));
      chord_of[key] = id;
    }

    // Children of each replaced slot edge, in clockwise-after-slot order,
    // with the orientation the parent reads them in (inward: far -> v maps
    // to chord a -> b when the parent sits on the chord's a side).
    for (int s = 0; s < t; ++s) {
      int parent = slots[s];
      std::vector<std::pair<int, int>> block;  // (cw distance of partner, chord)
      for (const auto& [key, chord] : chord_of) {
        auto [sa, sb] = key;
        int partner = -1;
        if (sa == s) partner = sb;
        else if (sb == s) partner = sa;
        else continue;
        block.push_back({((partner - s) % t + t) % t, chord});
      }
      std::sort(block.begin(), block.end());
      int far_end = other_end(parent, v);
      LinEdge& pe = ledges[parent];
      pe.replaced = true;
      pe.inward_forward = (pe.a == far_end);
      for (auto [dist, chord] : block) {
        bool forward = ledges[chord].a == far_end;
        pe.children.push_back({chord, forward});
      }
      // Splice the chord block into the far endpoint's rotation at the
      // parent's slot position.
      int far = other_end(parent, v);
      auto& frot = rot[far];
      for (std::size_t i = 0; i < frot.size(); ++i) {
        if (frot[i] != parent) continue;
        std::vector<int> repl;
        for (auto [dist, chord] : block) repl.push_back(chord);
        frot.erase(frot.begin() + static_cast<long>(i));
        frot.insert(frot.begin() + static_cast<long>(i), repl.begin(), repl.end());
        break;
      }
    }

    // Rewrite the paths through v.
    for (std::size_t p = 0; p < pedges.size(); ++p) {
      for (std::size_t i = 0; i < pnodes[p].size(); ++i) {
        if (pnodes[p][i] != v) continue;
        int ein = pedges[p][i - 1];
        int eout = pedges[p][i];
        int sa = slot_of.at(ein), sb = slot_of.at(eout);
        if (sa > sb) std::swap(sa, sb);
        int chord = chord_of.at({sa, sb});
        pnodes[p].erase(pnodes[p].begin() + static_cast<long>(i));
        pedges[p][i - 1] = chord;
        pedges[p].erase(pedges[p].begin() + static_cast<long>(i));
        break;  // simple path: one visit
      }
    }
    rot[v].clear();
  }

  // Phase 2: leaves keep path-id order (only coincident paths share a leaf);
  // replaced edges concatenate their children, processed in reverse deletion
  // order via plain recursion over the forest.
  std::function<const std::vector<int>&(int)> ordered_of = [&](int le) -> const std::vector<int>& {
    LinEdge& e = ledges[le];
    if (!e.ordered.empty() || (!e.replaced && e.paths.empty())) return e.ordered;
    if (!e.replaced) {
      e.ordered = e.paths;
      std::sort(e.ordered.begin(), e.ordered.end());
      return e.ordered;
    }
    for (auto [child, forward] : e.children) {
      std::vector<int> part = ordered_of(child);
      if (!forward) std::reverse(part.begin(), part.end());
      e.ordered.insert(e.ordered.end(), part.begin(), part.end());
    }
    if (!e.inward_forward) std::reverse(e.ordered.begin(), e.ordered.end());
    return e.ordered;
  };

  BundleOrdering out;
  out.order.assign(in.edges().size(), {});
  for (const auto& [key, le] : initial_edge) {
    const LinEdge& e = ledges[le];
    std::vector<int> ord = ordered_of(le);
    // Stored inward lists read along a -> b of the ledge; the initial edge's
    // (a, b) is already canonical.
    out.order[e.orig] = std::move(ord);
  }
  return out;
}

}  // namespace bundling
