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

#include <map>
#include <sstream>

#include "avnav/agent.hpp"
#include "avnav/harness.hpp"
#include "test_util.hpp"

namespace avnav
{
namespace
{

EpisodeConfig episode(Pose start, Cell source, std::uint64_t seed, int max_steps = 200)
{
  EpisodeConfig cfg;
  cfg.start = start;
  cfg.source = source;
  cfg.seed = seed;
  cfg.max_steps = max_steps;
  return cfg;
}

// Replays the recorded actions on the true map.
void expect_consistent(const GridMap & map, const EpisodeConfig & cfg, const EpisodeResult & r)
{
  Pose pose = cfg.start;
  int translations = 0;
  ASSERT_EQ(static_cast<int>(r.trajectory.size()), r.steps_taken);
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    const StepRecord & s = r.trajectory[i];
    EXPECT_EQ(s.step, static_cast<int>(i));
    EXPECT_EQ(s.pose, pose);
    EXPECT_TRUE(map.is_free(pose.cell));
    const Pose next = apply_action(map, pose, s.action);
    EXPECT_EQ(s.bump, is_translation(s.action) && next == pose);
    if (is_translation(s.action) && !s.bump) ++translations;
    if (s.action == Action::Stop) {
      EXPECT_EQ(i + 1, r.trajectory.size());
      EXPECT_EQ(r.termination, Termination::Stopped);
    }
    pose = next;
  }
  EXPECT_EQ(r.final_pose, pose);
  EXPECT_EQ(r.path_length_cells, translations);
  EXPECT_EQ(r.success, r.termination == Termination::Stopped && pose.cell == cfg.source);
}

TEST(Agents, NamesRoundTrip)
{
  for (const AgentKind k : kAllAgents) EXPECT_EQ(parse_agent(agent_name(k)), k);
  EXPECT_FALSE(parse_agent("Greedy").has_value());
}

TEST(Greedy, FollowsEstimateIgnoringWalls)
{
  const Pose p{{5, 5}, Orientation::North};
  EXPECT_EQ(step_greedy(p, {0.0, 2.0}, false), Action::MoveForward);
  EXPECT_EQ(step_greedy(p, {0.2, -3.0}, false), Action::MoveBackward);
  EXPECT_EQ(step_greedy(p, {0.0, 2.0}, true), Action::Stop);
  EXPECT_EQ(step_greedy({{5, 5}, Orientation::East}, {0.0, 2.0}, false), Action::MoveForward);
  // Purely lateral target: a translation would move away, so it turns.
  const Action a = step_greedy(p, {3.0, 0.0}, false);
  EXPECT_TRUE(a == Action::RotateLeft || a == Action::RotateRight);
}

TEST(Random, UniformOverAllActions)
{
  Rng rng(12);
  std::map<Action, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[step_random(rng)]++;
  ASSERT_EQ(counts.size(), 5u);
  for (const auto & [a, c] : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.2, 0.01);
}

TEST(Episode, StartOnSourceStopsImmediately)
{
  const GridMap map = testing::bundled("apt1");
  const Cell src = map.source_candidates().front();
  AgentParams params;
  params.acoustic.detector_miss_rate = 0.0;
  for (const AgentKind k : {AgentKind::OursNoExplore, AgentKind::GreedyAudio}) {
    const auto r = run_episode(map, episode({src, Orientation::South}, src, 3), k, params);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.steps_taken, 1);
    EXPECT_EQ(r.path_length_cells, 0);
    EXPECT_EQ(r.termination, Termination::Stopped);
  }
}

TEST(Episode, ZeroStepBudget)
{
  const GridMap map = testing::bundled("apt1");
  const auto cfg = episode({map.spawn_candidates().front(), Orientation::North}, map.source_candidates().front(), 1, 0);
  const auto r = run_episode(map, cfg, AgentKind::RandomWalk, AgentParams{});
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.steps_taken, 0);
  EXPECT_EQ(r.termination, Termination::StepLimit);
  EXPECT_EQ(r.final_pose, cfg.start);
}

TEST(Episode, InvalidEndpointsRejected)
{
  const GridMap map = testing::bundled("apt1");
  try {
    run_episode(map, episode({{0, 0}, Orientation::North}, map.source_candidates().front(), 1), AgentKind::RandomWalk,
                AgentParams{});
    FAIL();
  } catch (const EpisodeError & e) {
    EXPECT_EQ(e.kind(), EpisodeError::Kind::InvalidEpisode);
  }
}

TEST(Episode, ExploreNeedsMatchingMemory)
{
  const GridMap a = testing::bundled("apt1");
  const GridMap b = testing::bundled("apt2");
  const auto cfg = episode({a.spawn_candidates().front(), Orientation::North}, a.source_candidates().front(), 1);
  try {
    run_episode(a, cfg, AgentKind::OursExplore, AgentParams{});
    FAIL();
  } catch (const EpisodeError & e) {
    EXPECT_EQ(e.kind(), EpisodeError::Kind::ConfigMismatch);
  }
  const Exploration other = seeded_exploration(b, 1, 0, 50);
  try {
    run_episode(a, cfg, AgentKind::OursExplore, AgentParams{}, &other.memory);
    FAIL();
  } catch (const EpisodeError & e) {
    EXPECT_EQ(e.kind(), EpisodeError::Kind::ConfigMismatch);
  }
}

TEST(Episode, NoiselessOpenRoomIsOptimal)
{
  const GridMap map = testing::bundled("open");
  const AgentParams params = AgentParams::noiseless();
  Rng pick(5);
  const auto cells = map.free_cells();
  for (int i = 0; i < 60; ++i) {
    const Cell src = map.source_candidates()[pick.below(map.source_candidates().size())];
    const Pose start{cells[pick.below(cells.size())], kOrientations[pick.below(4)]};
    if (start.cell == src) continue;
    const auto cfg = episode(start, src, static_cast<std::uint64_t>(i));
    const auto r = run_episode(map, cfg, AgentKind::OursNoExplore, params);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.path_length_cells, *shortest_path_cells(map, start.cell, src));
    expect_consistent(map, cfg, r);
  }
}

TEST(Episode, NoiselessOursNoExploreAlwaysSucceeds)
{
  const AgentParams params = AgentParams::noiseless();
  for (const auto & name : testing::all_maps()) {
    const GridMap map = testing::bundled(name);
    const auto eps = gen_episodes(map, 2, 5, 77, nullptr, 200, {});
    for (const auto & cfg : eps) {
      const auto r = run_episode(map, cfg, AgentKind::OursNoExplore, params);
      EXPECT_TRUE(r.success) << name;
      EXPECT_GE(r.path_length_cells, *shortest_path_cells(map, cfg.start.cell, cfg.source));
    }
  }
}

TEST(Episode, TrajectoriesStayOnFreeCells)
{
  for (const auto & name : {"apt3", "umap", "train2"}) {
    const GridMap map = testing::bundled(name);
    const Exploration prep = seeded_exploration(map, 4, 0, 400);
    const auto eps = gen_episodes(map, 2, 3, 4, nullptr, 200, {});
    for (const AgentKind k : kAllAgents) {
      for (const auto & cfg : eps) {
        const auto r = run_episode(map, cfg, k, AgentParams{}, &prep.memory);
        expect_consistent(map, cfg, r);
      }
    }
  }
}

TEST(Episode, Deterministic)
{
  const GridMap map = testing::bundled("apt4");
  const Exploration prep = seeded_exploration(map, 9, 0, 400);
  const auto eps = gen_episodes(map, 1, 2, 9, nullptr, 200, {});
  for (const AgentKind k : kAllAgents) {
    for (const auto & cfg : eps) {
      std::ostringstream a;
      std::ostringstream b;
      write_trajectory(a, run_episode(map, cfg, k, AgentParams{}, &prep.memory));
      write_trajectory(b, run_episode(map, cfg, k, AgentParams{}, &prep.memory));
      EXPECT_EQ(a.str(), b.str()) << agent_name(k);
    }
  }
}

TEST(Episode, SeedChangesNoisyRun)
{
  const GridMap map = testing::bundled("apt4");
  auto cfg = gen_episodes(map, 1, 1, 9, nullptr, 200, {}).front();
  std::ostringstream a;
  std::ostringstream b;
  write_trajectory(a, run_episode(map, cfg, AgentKind::RandomWalk, AgentParams{}));
  cfg.seed += 1;
  write_trajectory(b, run_episode(map, cfg, AgentKind::RandomWalk, AgentParams{}));
  EXPECT_NE(a.str(), b.str());
}

TEST(OccupancyAgent, BumpRemovesNode)
{
  AgentParams params = AgentParams::noiseless();
  params.look_ahead = false;
  Rng rng(1);
  const Pose start{{10, 10}, Orientation::North};
  OccupancyNavigator nav(start, params, rng);
  LocalReadings none{};
  for (auto & row : none) row.fill(Reading::None);
  Observation obs;
  obs.relative = {0.0, 3.0};
  obs.readings = none;
  ASSERT_EQ(nav.decide(obs), Action::MoveForward);
  EXPECT_TRUE(nav.graph().has_node({10, 11}));
  obs.bumped = true;
  const Action next = nav.decide(obs);
  EXPECT_EQ(nav.believed_pose(), start);
  EXPECT_FALSE(nav.graph().has_node({10, 11}));
  EXPECT_NE(next, Action::MoveForward);
  EXPECT_NE(next, Action::Stop);
}

TEST(OccupancyAgent, ObservedWallsLeaveTheGraph)
{
  const GridMap map = testing::bundled("apt1");
  const auto cfg = gen_episodes(map, 1, 1, 3, nullptr, 200, {}).front();
  EpisodeCapture cap;
  run_episode(map, cfg, AgentKind::OursNoExplore, AgentParams::noiseless(), nullptr, {}, &cap);
  ASSERT_TRUE(cap.grid && cap.graph);
  int walls = 0;
  for (std::size_t i = 0; i < cap.grid->cell_count(); ++i) {
    const Cell c = cap.grid->to_world(i);
    if (cap.grid->log_odds(i) > 0.0) {
      EXPECT_FALSE(map.is_free(c));
      EXPECT_FALSE(cap.graph->has_node(c));
      ++walls;
    }
  }
  EXPECT_GT(walls, 0);
}

TEST(Trajectory, WriteFormat)
{
  EpisodeResult r;
  r.trajectory = {{0, {{1, 2}, Orientation::East}, Action::MoveForward, true},
                  {1, {{1, 2}, Orientation::East}, Action::Stop, false}};
  std::ostringstream out;
  write_trajectory(out, r);
  EXPECT_EQ(out.str(), "# step x y orient action bump\n0 1 2 E " + std::string(action_name(Action::MoveForward)) +
                         " 1\n1 1 2 E " + std::string(action_name(Action::Stop)) + " 0\n");
}

}  // namespace
}  // namespace avnav
