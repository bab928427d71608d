#pragma once

// Text formats. Graph input, one record per line:
//   node <id> <x> <y> rect <w> <h>
//   node <id> <x> <y> ellipse <rx> <ry>
//   node <id> <x> <y> polygon <x1> <y1> <x2> <y2> ...   (relative coords)
//   edge <source> <target> [width]
// Ordering instances, same line discipline:
//   node <id> [<x> <y>]
//   edge <a> <b>
//   path <n1> <n2> ...
//   rot <node> <nb1> <nb2> ...   (explicit clockwise rotation; optional)
// '#' starts a comment; blank lines are ignored. Errors carry line numbers.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bundling/errors.hpp"
#include "bundling/obstacles.hpp"
#include "bundling/ordering.hpp"

namespace bundling {

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

inline double parse_number(const std::string& tok, int line_no, const char* field) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InputError("line " + std::to_string(line_no) + ": field '" + field +
                     "' is not a number: '" + tok + "'");
  }
}

}  // namespace detail

inline InputGraph parse_input_graph(std::istream& is) {
  InputGraph g;
  std::map<std::string, int> node_index;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto tok = detail::tokenize(line);
    if (tok.empty()) continue;
    if (tok[0] == "node") {
      if (tok.size() < 5)
        throw InputError("line " + std::to_string(line_no) + ": node needs id, x, y, boundary");
      InputNode n;
      n.id = tok[1];
      if (node_index.count(n.id))
        throw InputError("line " + std::to_string(line_no) + ": duplicate node id '" + n.id + "'");
      n.pos = {detail::parse_number(tok[2], line_no, "x"),
               detail::parse_number(tok[3], line_no, "y")};
      const std::string& kind = tok[4];
      if (kind == "rect") {
        if (tok.size() != 7)
          throw InputError("line " + std::to_string(line_no) + ": rect needs width and height");
        n.boundary.kind = BoundaryCurve::Kind::Rectangle;
        n.boundary.half_w = 0.5 * detail::parse_number(tok[5], line_no, "width");
        n.boundary.half_h = 0.5 * detail::parse_number(tok[6], line_no, "height");
      } else if (kind == "ellipse") {
        if (tok.size() != 7)
          throw InputError("line " + std::to_string(line_no) + ": ellipse needs rx and ry");
        n.boundary.kind = BoundaryCurve::Kind::Ellipse;
        n.boundary.half_w = detail::parse_number(tok[5], line_no, "rx");
        n.boundary.half_h = detail::parse_number(tok[6], line_no, "ry");
      } else if (kind == "polygon") {
        if (tok.size() < 11 || (tok.size() - 5) % 2 != 0)
          throw InputError("line " + std::to_string(line_no) +
                           ": polygon needs at least 3 coordinate pairs");
        n.boundary.kind = BoundaryCurve::Kind::Polygon;
        for (std::size_t i = 5; i + 1 < tok.size(); i += 2)
          n.boundary.polygon.push_back({detail::parse_number(tok[i], line_no, "px"),
                                        detail::parse_number(tok[i + 1], line_no, "py")});
      } else {
        throw InputError("line " + std::to_string(line_no) + ": unknown boundary kind '" +
                         kind + "'");
      }
      if (n.boundary.kind != BoundaryCurve::Kind::Polygon &&
          (n.boundary.half_w <= 0 || n.boundary.half_h <= 0))
        throw InputError("line " + std::to_string(line_no) + ": boundary extents must be positive");
      node_index[n.id] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(std::move(n));
    } else if (tok[0] == "edge") {
      if (tok.size() != 3 && tok.size() != 4)
        throw InputError("line " + std::to_string(line_no) + ": edge needs source, target [width]");
      InputEdge e;
      auto src = node_index.find(tok[1]);
      auto dst = node_index.find(tok[2]);
      if (src == node_index.end())
        throw InputError("line " + std::to_string(line_no) + ": unknown node '" + tok[1] + "'");
      if (dst == node_index.end())
        throw InputError("line " + std::to_string(line_no) + ": unknown node '" + tok[2] + "'");
      e.source = src->second;
      e.target = dst->second;
      if (e.source == e.target)
        throw InputError("line " + std::to_string(line_no) + ": self-loop edges are not supported");
      if (tok.size() == 4) {
        e.width = detail::parse_number(tok[3], line_no, "width");
        if (e.width <= 0)
          throw InputError("line " + std::to_string(line_no) + ": edge width must be positive");
      }
      g.edges.push_back(e);
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown record '" + tok[0] + "'");
    }
  }
  if (g.nodes.empty()) throw InputError("input defines no nodes");
  return g;
}

inline OrderInstance parse_order_instance(std::istream& is) {
  std::map<std::string, int> node_index;
  std::vector<std::string> node_names;
  std::vector<Vec2> positions;
  std::vector<char> has_pos;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> paths;
  std::map<int, std::vector<int>> rotations;

  auto node_of = [&](const std::string& name, int line_no) {
    auto it = node_index.find(name);
    if (it == node_index.end())
      throw InputError("line " + std::to_string(line_no) + ": unknown node '" + name + "'");
    return it->second;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto tok = detail::tokenize(line);
    if (tok.empty()) continue;
    if (tok[0] == "node") {
      if (tok.size() != 2 && tok.size() != 4)
        throw InputError("line " + std::to_string(line_no) + ": node needs id [x y]");
      if (node_index.count(tok[1]))
        throw InputError("line " + std::to_string(line_no) + ": duplicate node id '" + tok[1] + "'");
      node_index[tok[1]] = static_cast<int>(node_names.size());
      node_names.push_back(tok[1]);
      if (tok.size() == 4) {
        positions.push_back({detail::parse_number(tok[2], line_no, "x"),
                             detail::parse_number(tok[3], line_no, "y")});
        has_pos.push_back(1);
      } else {
        positions.push_back({0, 0});
        has_pos.push_back(0);
      }
    } else if (tok[0] == "edge") {
      if (tok.size() != 3)
        throw InputError("line " + std::to_string(line_no) + ": edge needs two endpoints");
      edges.push_back({node_of(tok[1], line_no), node_of(tok[2], line_no)});
    } else if (tok[0] == "path") {
      if (tok.size() < 3)
        throw InputError("line " + std::to_string(line_no) + ": path needs at least two nodes");
      std::vector<int> p;
      for (std::size_t i = 1; i < tok.size(); ++i) p.push_back(node_of(tok[i], line_no));
      paths.push_back(std::move(p));
    } else if (tok[0] == "rot") {
      if (tok.size() < 3)
        throw InputError("line " + std::to_string(line_no) + ": rot needs a node and neighbors");
      int v = node_of(tok[1], line_no);
      std::vector<int> rot;
      for (std::size_t i = 2; i < tok.size(); ++i) rot.push_back(node_of(tok[i], line_no));
      rotations[v] = std::move(rot);
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown record '" + tok[0] + "'");
    }
  }
  if (node_names.empty()) throw InputError("ordering instance defines no nodes");

  if (!rotations.empty()) {
    // Explicit rotations take priority; derive the rest from positions.
    std::vector<std::vector<int>> rots(node_names.size());
    for (std::size_t v = 0; v < node_names.size(); ++v) {
      auto it = rotations.find(static_cast<int>(v));
      if (it != rotations.end()) {
        rots[v] = it->second;
        continue;
      }
      if (!has_pos[v])
        throw InputError("node '" + node_names[v] + "' needs coordinates or a rot record");
      std::vector<int> nbs;
      for (auto [a, b] : edges) {
        if (a == static_cast<int>(v)) nbs.push_back(b);
        if (b == static_cast<int>(v)) nbs.push_back(a);
      }
      std::sort(nbs.begin(), nbs.end(), [&](int x, int y) {
        double ax = angle_of(positions[x] - positions[v]);
        double ay = angle_of(positions[y] - positions[v]);
        if (ax != ay) return ax > ay;
        return x < y;
      });
      rots[v] = std::move(nbs);
    }
    return OrderInstance::from_rotations(static_cast<int>(node_names.size()), std::move(edges),
                                         std::move(rots), std::move(paths));
  }
  for (std::size_t v = 0; v < node_names.size(); ++v)
    if (!has_pos[v])
      throw InputError("node '" + node_names[v] + "' needs coordinates or a rot record");
  return OrderInstance::from_positions(std::move(positions), std::move(edges), std::move(paths));
}

inline std::string serialize_order_instance(const OrderInstance& in) {
  std::ostringstream os;
  const bool embedded = !in.positions().empty();
  for (int v = 0; v < in.node_count(); ++v) {
    os << "node n" << v;
    if (embedded) os << " " << in.positions()[v].x << " " << in.positions()[v].y;
    os << "\n";
  }
  for (const auto& [a, b] : in.edges()) os << "edge n" << a << " n" << b << "\n";
  if (!embedded) {
    for (int v = 0; v < in.node_count(); ++v) {
      if (in.rotations()[v].empty()) continue;
      os << "rot n" << v;
      for (int nb : in.rotations()[v]) os << " n" << nb;
      os << "\n";
    }
  }
  for (const auto& p : in.paths()) {
    os << "path";
    for (int v : p) os << " n" << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace bundling
