// Copyright 2026 The avnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AVNAV_PLANNER_HPP_
#define AVNAV_PLANNER_HPP_

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "avnav/gridworld.hpp"
#include "avnav/occmap.hpp"

namespace avnav
{

class PlannerError : public std::runtime_error
{
public:
  enum class Kind { EmptyGraph, NotInGraph, NotAdjacent };

  PlannerError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

struct CellHash
{
  std::size_t operator()(Cell c) const noexcept
  {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                                      static_cast<std::uint32_t>(c.y));
  }
};

/// Undirected graph over cells. Adjacency lists are kept sorted and
/// deduplicated; no self-loops.
class NavGraph
{
public:
  using Edge = std::pair<Cell, Cell>;  // first < second

  bool add_node(Cell c) { return adj_.try_emplace(c).second; }

  bool has_node(Cell c) const { return adj_.find(c) != adj_.end(); }

  /// Removes the node and its incident edges.
  bool remove_node(Cell c)
  {
    const auto it = adj_.find(c);
    if (it == adj_.end()) return false;
    for (const Cell n : it->second) erase_sorted(adj_.at(n), c);
    adj_.erase(it);
    return true;
  }

  /// Adds both endpoints if needed. Self-loops are ignored.
  bool add_edge(Cell a, Cell b)
  {
    if (a == b) return false;
    auto & la = adj_[a];
    auto & lb = adj_[b];
    if (!insert_sorted(la, b)) return false;
    insert_sorted(lb, a);
    return true;
  }

  bool remove_edge(Cell a, Cell b)
  {
    const auto ia = adj_.find(a);
    const auto ib = adj_.find(b);
    if (ia == adj_.end() || ib == adj_.end()) return false;
    if (!erase_sorted(ia->second, b)) return false;
    erase_sorted(ib->second, a);
    return true;
  }

  bool has_edge(Cell a, Cell b) const
  {
    const auto it = adj_.find(a);
    return it != adj_.end() && std::binary_search(it->second.begin(), it->second.end(), b);
  }

  const std::vector<Cell> & neighbors(Cell c) const
  {
    static const std::vector<Cell> kNone;
    const auto it = adj_.find(c);
    return it == adj_.end() ? kNone : it->second;
  }

  std::size_t node_count() const noexcept { return adj_.size(); }

  std::size_t edge_count() const
  {
    std::size_t n = 0;
    for (const auto & [c, ns] : adj_) n += ns.size();
    return n / 2;
  }

  bool empty() const noexcept { return adj_.empty(); }

  std::vector<Cell> nodes() const
  {
    std::vector<Cell> out;
    out.reserve(adj_.size());
    for (const auto & [c, ns] : adj_) out.push_back(c);
    return out;
  }

  std::vector<Edge> edges() const
  {
    std::vector<Edge> out;
    for (const auto & [c, ns] : adj_) {
      for (const Cell n : ns) {
        if (c < n) out.emplace_back(c, n);
      }
    }
    return out;
  }

  /// Node insertion in ascending order (amortized constant).
  void append_node(Cell c) { adj_.emplace_hint(adj_.end(), c, std::vector<Cell>{}); }

  const std::map<Cell, std::vector<Cell>> & adjacency() const noexcept { return adj_; }

  friend bool operator==(const NavGraph &, const NavGraph &) = default;

private:
  static bool insert_sorted(std::vector<Cell> & v, Cell c)
  {
    const auto it = std::lower_bound(v.begin(), v.end(), c);
    if (it != v.end() && *it == c) return false;
    v.insert(it, c);
    return true;
  }

  static bool erase_sorted(std::vector<Cell> & v, Cell c)
  {
    const auto it = std::lower_bound(v.begin(), v.end(), c);
    if (it == v.end() || *it != c) return false;
    v.erase(it);
    return true;
  }

  std::map<Cell, std::vector<Cell>> adj_;
};

/// Nodes are the visited cells; edges join consecutive poses whose cells
/// differ.
inline NavGraph graph_from_trajectory(std::span<const Pose> trajectory)
{
  NavGraph g;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    g.add_node(trajectory[i].cell);
    if (i > 0 && trajectory[i - 1].cell != trajectory[i].cell) {
      g.add_edge(trajectory[i - 1].cell, trajectory[i].cell);
    }
  }
  return g;
}

constexpr bool traversable(CellClass c) { return c != CellClass::Obstacle; }

/// Optimistic lattice: free and unexplored cells are nodes, 4-adjacent
/// nodes are joined. Cell indices follow OccupancyGrid's memory layout.
inline NavGraph graph_from_occupancy(std::span<const CellClass> classes, int size, Cell origin)
{
  const OccupancyGrid frame(size, origin, 1.0);
  NavGraph g;
  const auto n = static_cast<std::size_t>(size);
  // Column-major walk visits world cells in ascending (x, y) order.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = j * n + i;
      if (traversable(classes[idx])) g.append_node(frame.to_world(idx));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = j * n + i;
      if (!traversable(classes[idx])) continue;
      const Cell c = frame.to_world(idx);
      if (i + 1 < n && traversable(classes[j * n + i + 1])) g.add_edge(c, c + Cell{1, 0});
      if (j + 1 < n && traversable(classes[(j + 1) * n + i])) g.add_edge(c, c + Cell{0, 1});
    }
  }
  return g;
}

/// Incremental counterpart of graph_from_occupancy when a cell becomes an
/// obstacle.
inline void remove_obstacle(NavGraph & g, Cell c) { g.remove_node(c); }

/// Incremental counterpart when a cell becomes traversable again: the node
/// is joined to every existing 4-neighbour.
inline void restore_traversable(NavGraph & g, Cell c)
{
  g.add_node(c);
  for (const Orientation o : kOrientations) {
    const Cell n = c + forward_vector(o);
    if (g.has_node(n)) g.add_edge(c, n);
  }
}

/// Euclidean nearest node; ties go to the lexicographically smallest.
inline Cell nearest_node(const NavGraph & g, Point p)
{
  if (g.empty()) throw PlannerError(PlannerError::Kind::EmptyGraph, "nearest_node on an empty graph");
  Cell best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto & [c, ns] : g.adjacency()) {
    const double dx = c.x - p.x;
    const double dy = c.y - p.y;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

/// Unit-weight Dijkstra. Returns a minimum-hop path from src to dst and,
/// among those, the lexicographically smallest node sequence; nullopt when
/// dst is unreachable.
inline std::optional<std::vector<Cell>> dijkstra(const NavGraph & g, Cell src, Cell dst)
{
  if (!g.has_node(src) || !g.has_node(dst)) {
    throw PlannerError(PlannerError::Kind::NotInGraph, "dijkstra endpoints must be graph nodes");
  }
  // Distances from dst; the path is read off forward from src taking the
  // smallest admissible successor at every hop.
  std::unordered_map<Cell, int, CellHash> dist;
  using Item = std::pair<int, Cell>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist.emplace(dst, 0);
  open.emplace(0, dst);
  bool reached = false;
  while (!open.empty()) {
    const auto [d, c] = open.top();
    open.pop();
    if (d != dist.at(c)) continue;
    if (c == src) {
      reached = true;
      break;
    }
    for (const Cell n : g.neighbors(c)) {
      const auto it = dist.find(n);
      if (it == dist.end() || d + 1 < it->second) {
        dist[n] = d + 1;
        open.emplace(d + 1, n);
      }
    }
  }
  if (!reached) return std::nullopt;

  std::vector<Cell> path{src};
  Cell cur = src;
  int remaining = dist.at(src);
  while (remaining > 0) {
    for (const Cell n : g.neighbors(cur)) {  // ascending order
      const auto it = dist.find(n);
      if (it != dist.end() && it->second == remaining - 1) {
        cur = n;
        break;
      }
    }
    path.push_back(cur);
    --remaining;
  }
  return path;
}

/// Hop distances from src to every reachable node.
inline std::map<Cell, int> reachable_from(const NavGraph & g, Cell src)
{
  std::map<Cell, int> dist;
  if (!g.has_node(src)) return dist;
  std::deque<Cell> frontier{src};
  dist.emplace(src, 0);
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (const Cell n : g.neighbors(c)) {
      if (dist.emplace(n, dist.at(c) + 1).second) frontier.push_back(n);
    }
  }
  return dist;
}

/// First action of a plan whose next cell is `next`. Returns Stop when the
/// agent is already there (the caller decides whether to stop).
inline Action path_to_action(Pose pose, Cell next)
{
  const Cell d = next - pose.cell;
  if (d == Cell{0, 0}) return Action::Stop;
  const Cell fwd = forward_vector(pose.orient);
  const Cell right = right_vector(pose.orient);
  if (d == fwd) return Action::MoveForward;
  if (d == Cell{0, 0} - fwd) return Action::MoveBackward;
  if (d == right) return Action::RotateRight;
  if (d == Cell{0, 0} - right) return Action::RotateLeft;
  throw PlannerError(PlannerError::Kind::NotAdjacent, "next cell is not 4-adjacent to the agent");
}

struct TargetEstimate
{
  Point mean;
  int count = 0;
};

/// Cumulative running mean of absolute target estimates.
inline TargetEstimate update_target(const std::optional<TargetEstimate> & est, Point observed)
{
  if (!est || est->count <= 0) return {observed, 1};
  const double n = est->count;
  return {{(est->mean.x * n + observed.x) / (n + 1.0), (est->mean.y * n + observed.y) / (n + 1.0)}, est->count + 1};
}

/// Edge-list dump: a header line, one `n x y` line per node, one
/// `e x1 y1 x2 y2` line per edge.
inline void dump_graph(std::ostream & out, const NavGraph & g)
{
  out << "nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
  for (const Cell c : g.nodes()) out << "n " << c.x << ' ' << c.y << '\n';
  for (const auto & [a, b] : g.edges()) out << "e " << a.x << ' ' << a.y << ' ' << b.x << ' ' << b.y << '\n';
}

/// Graph of the true free space (4-adjacency), used as a ground-truth
/// reference.
inline NavGraph graph_from_map(const GridMap & map)
{
  NavGraph g;
  for (int x = 0; x < map.width(); ++x) {
    for (int y = 0; y < map.height(); ++y) {
      if (map.is_free({x, y})) g.append_node({x, y});
    }
  }
  for (const Cell c : map.free_cells()) {
    if (map.is_free(c + Cell{1, 0})) g.add_edge(c, c + Cell{1, 0});
    if (map.is_free(c + Cell{0, 1})) g.add_edge(c, c + Cell{0, 1});
  }
  return g;
}

}  // namespace avnav

#endif  // AVNAV_PLANNER_HPP_
