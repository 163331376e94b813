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


#include <gtest/gtest.h>

#include <deque>
#include <map>
#include <sstream>

#include "avnav/acoustics.hpp"
#include "avnav/planner.hpp"
#include "test_util.hpp"

namespace avnav
{
namespace
{

using Adjacency = std::map<Cell, std::set<Cell>>;

// Plain BFS over a copy of the adjacency, independent of the planner.
std::map<Cell, int> bfs(const Adjacency & adj, Cell src)
{
  std::map<Cell, int> dist{{src, 0}};
  std::deque<Cell> q{src};
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    for (const Cell n : adj.at(c)) {
      if (dist.emplace(n, dist[c] + 1).second) q.push_back(n);
    }
  }
  return dist;
}

Adjacency copy_of(const NavGraph & g)
{
  Adjacency a;
  for (const auto & [c, ns] : g.adjacency()) a[c].insert(ns.begin(), ns.end());
  return a;
}

// Lattice with random cells and edges dropped.
NavGraph random_graph(Rng & rng, int w, int h, double keep_node, double keep_edge)
{
  NavGraph g;
  std::set<Cell> cells;
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      if (rng.uniform() < keep_node) {
        cells.insert({x, y});
        g.add_node({x, y});
      }
    }
  }
  for (const Cell c : cells) {
    for (const Cell d : {Cell{1, 0}, Cell{0, 1}}) {
      if (cells.count(c + d) && rng.uniform() < keep_edge) g.add_edge(c, c + d);
    }
  }
  return g;
}

void expect_valid_path(const NavGraph & g, const std::vector<Cell> & path, Cell src, Cell dst)
{
  ASSERT_FALSE(path.empty());
  EXPECT_EQ(path.front(), src);
  EXPECT_EQ(path.back(), dst);
  for (std::size_t i = 1; i < path.size(); ++i) EXPECT_TRUE(g.has_edge(path[i - 1], path[i]));
}

void all_shortest(const Adjacency & adj, Cell at, Cell dst, std::size_t len, std::vector<Cell> & cur,
                  std::vector<std::vector<Cell>> & out)
{
  if (cur.size() > len) return;
  if (at == dst) {
    if (cur.size() == len) out.push_back(cur);
    return;
  }
  for (const Cell n : adj.at(at)) {
    if (std::find(cur.begin(), cur.end(), n) != cur.end()) continue;
    cur.push_back(n);
    all_shortest(adj, n, dst, len, cur, out);
    cur.pop_back();
  }
}

TEST(NavGraph, BasicOperations)
{
  NavGraph g;
  EXPECT_TRUE(g.empty());
  EXPECT_TRUE(g.add_edge({0, 0}, {0, 1}));
  EXPECT_FALSE(g.add_edge({0, 1}, {0, 0}));
  EXPECT_FALSE(g.add_edge({2, 2}, {2, 2}));
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.has_edge({0, 1}, {0, 0}));
  g.add_edge({0, 1}, {1, 1});
  EXPECT_TRUE(g.remove_node({0, 1}));
  EXPECT_FALSE(g.remove_node({0, 1}));
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_TRUE(g.neighbors({0, 0}).empty());
  EXPECT_TRUE(g.neighbors({7, 7}).empty());
  EXPECT_FALSE(g.remove_edge({0, 0}, {1, 1}));
  g.add_edge({0, 0}, {1, 0});
  EXPECT_TRUE(g.remove_edge({1, 0}, {0, 0}));
  EXPECT_TRUE(g.has_node({1, 0}));
}

TEST(NavGraph, FromTrajectory)
{
  const std::vector<Pose> traj{{{1, 1}, Orientation::North}, {{1, 1}, Orientation::East}, {{2, 1}, Orientation::East},
                               {{2, 1}, Orientation::East},  {{1, 1}, Orientation::East}, {{1, 2}, Orientation::North}};
  const NavGraph g = graph_from_trajectory(traj);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.has_edge({1, 1}, {2, 1}));
  EXPECT_TRUE(g.has_edge({1, 1}, {1, 2}));
  EXPECT_FALSE(g.has_edge({2, 1}, {1, 2}));
}

TEST(NavGraph, FreshLatticeIsComplete)
{
  for (const int n : {1, 2, 5, 16}) {
    const OccupancyGrid grid(n, {3, -2});
    const NavGraph g = graph_from_occupancy(classify(grid), n, grid.origin());
    EXPECT_EQ(g.node_count(), static_cast<std::size_t>(n * n));
    EXPECT_EQ(g.edge_count(), static_cast<std::size_t>(2 * n * (n - 1)));
    for (std::size_t i = 0; i < grid.cell_count(); ++i) EXPECT_TRUE(g.has_node(grid.to_world(i)));
  }
}

TEST(NavGraph, IncrementalUpdatesMatchRebuild)
{
  Rng rng(31);
  const int n = 10;
  std::vector<CellClass> classes(static_cast<std::size_t>(n * n), CellClass::Unknown);
  const OccupancyGrid frame(n, {0, 0});
  NavGraph g = graph_from_occupancy(classes, n, frame.origin());
  for (int step = 0; step < 300; ++step) {
    const std::size_t i = rng.below(classes.size());
    const Cell c = frame.to_world(i);
    if (classes[i] == CellClass::Obstacle) {
      classes[i] = rng.bernoulli(0.5) ? CellClass::Free : CellClass::Unknown;
      restore_traversable(g, c);
    } else {
      classes[i] = CellClass::Obstacle;
      remove_obstacle(g, c);
    }
    ASSERT_EQ(g, graph_from_occupancy(classes, n, frame.origin())) << step;
  }
}

TEST(Dijkstra, MatchesBfsOnRandomGraphs)
{
  Rng rng(2024);
  int reachable_pairs = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(15));
    const int h = 1 + static_cast<int>(rng.below(15));
    const NavGraph g = random_graph(rng, w, h, 0.75, 0.85);
    if (g.empty()) continue;
    const auto nodes = g.nodes();
    const Adjacency adj = copy_of(g);
    for (int q = 0; q < 4; ++q) {
      const Cell src = nodes[rng.below(nodes.size())];
      const Cell dst = nodes[rng.below(nodes.size())];
      const auto want = bfs(adj, src);
      const auto path = dijkstra(g, src, dst);
      const auto it = want.find(dst);
      if (it == want.end()) {
        EXPECT_FALSE(path.has_value());
        continue;
      }
      ++reachable_pairs;
      ASSERT_TRUE(path.has_value());
      EXPECT_EQ(static_cast<int>(path->size()) - 1, it->second);
      expect_valid_path(g, *path, src, dst);
    }
  }
  EXPECT_GT(reachable_pairs, 500);
}

TEST(Dijkstra, LexicographicTieBreak)
{
  Rng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const NavGraph g = random_graph(rng, 4, 4, 0.9, 0.9);
    if (g.node_count() < 2) continue;
    const auto nodes = g.nodes();
    const Cell src = nodes[rng.below(nodes.size())];
    const Cell dst = nodes[rng.below(nodes.size())];
    const Adjacency adj = copy_of(g);
    const auto d = bfs(adj, src);
    const auto path = dijkstra(g, src, dst);
    if (!d.count(dst)) continue;
    std::vector<std::vector<Cell>> paths;
    std::vector<Cell> cur{src};
    all_shortest(adj, src, dst, static_cast<std::size_t>(d.at(dst)) + 1, cur, paths);
    ASSERT_FALSE(paths.empty());
    ASSERT_TRUE(path.has_value());
    EXPECT_EQ(*path, *std::min_element(paths.begin(), paths.end()));
    checked += paths.size() > 1 ? 1 : 0;
  }
  EXPECT_GT(checked, 50);
}

TEST(Dijkstra, EdgeCases)
{
  NavGraph g;
  g.add_edge({0, 0}, {1, 0});
  g.add_node({5, 5});
  EXPECT_EQ(*dijkstra(g, {0, 0}, {0, 0}), (std::vector<Cell>{{0, 0}}));
  EXPECT_FALSE(dijkstra(g, {0, 0}, {5, 5}).has_value());
  try {
    dijkstra(g, {0, 0}, {9, 9});
    FAIL();
  } catch (const PlannerError & e) {
    EXPECT_EQ(e.kind(), PlannerError::Kind::NotInGraph);
  }
}

TEST(Dijkstra, MatchesGroundTruthOnBundledMaps)
{
  for (const auto & name : testing::all_maps()) {
    const GridMap map = testing::bundled(name);
    const NavGraph g = graph_from_map(map);
    EXPECT_EQ(g.node_count(), map.free_count());
    const auto cells = map.free_cells();
    for (const Cell src : map.source_candidates()) {
      const Adjacency adj = copy_of(g);
      const auto want = bfs(adj, src);
      for (std::size_t i = 0; i < cells.size(); i += 3) {
        const auto path = dijkstra(g, src, cells[i]);
        ASSERT_TRUE(path.has_value()) << name;
        EXPECT_EQ(static_cast<int>(path->size()) - 1, want.at(cells[i])) << name;
        EXPECT_EQ(static_cast<int>(path->size()) - 1, *shortest_path_cells(map, src, cells[i])) << name;
        expect_valid_path(g, *path, src, cells[i]);
      }
    }
  }
}

TEST(Dijkstra, UCorridorAgainstSimplePathEnumeration)
{
  const GridMap map = load_map(
    "#######\n"
    "#S#.#G#\n"
    "#.#.#.#\n"
    "#.#.#.#\n"
    "#.....#\n"
    "#######\n");
  const NavGraph g = graph_from_map(map);
  const Adjacency adj = copy_of(g);
  const Cell src{1, 4};
  const Cell dst{5, 4};
  std::vector<std::vector<Cell>> paths;
  std::vector<Cell> cur{src};
  std::size_t best = 0;
  for (std::size_t len = 1; len < 30 && best == 0; ++len) {
    paths.clear();
    all_shortest(adj, src, dst, len, cur, paths);
    if (!paths.empty()) best = len;
  }
  ASSERT_EQ(best, 11u);
  EXPECT_EQ(dijkstra(g, src, dst)->size(), best);
  EXPECT_FALSE(line_of_sight(map, src, dst));
}

TEST(NearestNode, MatchesLinearScan)
{
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const NavGraph g = random_graph(rng, 8, 8, 0.5, 1.0);
    if (g.empty()) continue;
    const Point p{rng.uniform() * 10 - 1, rng.uniform() * 10 - 1};
    Cell best = g.nodes().front();
    double bd = 1e300;
    for (const Cell c : g.nodes()) {
      const double d = (c.x - p.x) * (c.x - p.x) + (c.y - p.y) * (c.y - p.y);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    EXPECT_EQ(nearest_node(g, p), best);
  }
  NavGraph g;
  g.add_node({2, 0});
  g.add_node({0, 0});
  EXPECT_EQ(nearest_node(g, {1.0, 0.0}), (Cell{0, 0}));
  EXPECT_THROW(nearest_node(NavGraph{}, {0, 0}), PlannerError);
}

TEST(PathToAction, AllDirections)
{
  for (const Orientation o : kOrientations) {
    const Pose p{{5, 5}, o};
    EXPECT_EQ(path_to_action(p, p.cell + forward_vector(o)), Action::MoveForward);
    EXPECT_EQ(path_to_action(p, p.cell - forward_vector(o)), Action::MoveBackward);
    EXPECT_EQ(path_to_action(p, p.cell + right_vector(o)), Action::RotateRight);
    EXPECT_EQ(path_to_action(p, p.cell - right_vector(o)), Action::RotateLeft);
    EXPECT_EQ(path_to_action(p, p.cell), Action::Stop);
    // After the suggested rotation the next cell is ahead.
    EXPECT_EQ(forward_vector(rotate_right(o)), right_vector(o));
  }
  try {
    path_to_action({{0, 0}, Orientation::North}, {1, 1});
    FAIL();
  } catch (const PlannerError & e) {
    EXPECT_EQ(e.kind(), PlannerError::Kind::NotAdjacent);
  }
}

TEST(Target, RunningMean)
{
  Rng rng(3);
  std::optional<TargetEstimate> est;
  double sx = 0.0;
  double sy = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const Point p{rng.normal() * 3, rng.uniform() * 8};
    sx += p.x;
    sy += p.y;
    est = update_target(est, p);
    EXPECT_EQ(est->count, i);
    EXPECT_NEAR(est->mean.x, sx / i, 1e-9);
    EXPECT_NEAR(est->mean.y, sy / i, 1e-9);
  }
}

TEST(DumpGraph, Format)
{
  NavGraph g;
  g.add_edge({1, 2}, {1, 3});
  g.add_node({0, 0});
  std::ostringstream out;
  dump_graph(out, g);
  EXPECT_EQ(out.str(), "nodes 3 edges 1\nn 0 0\nn 1 2\nn 1 3\ne 1 2 1 3\n");
}

}  // namespace
}  // namespace avnav
