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

#ifndef AVNAV_AGENT_HPP_
#define AVNAV_AGENT_HPP_

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "avnav/acoustics.hpp"
#include "avnav/gridworld.hpp"
#include "avnav/occmap.hpp"
#include "avnav/planner.hpp"
#include "avnav/rng.hpp"
#include "avnav/vismem.hpp"

namespace avnav
{

enum class AgentKind : std::uint8_t { OursExplore, OursNoExplore, GreedyAudio, RandomWalk };

inline constexpr std::array<AgentKind, 4> kAllAgents = {
  AgentKind::OursExplore, AgentKind::OursNoExplore, AgentKind::GreedyAudio, AgentKind::RandomWalk};

constexpr std::string_view agent_name(AgentKind k)
{
  switch (k) {
    case AgentKind::OursExplore: return "OursExplore";
    case AgentKind::OursNoExplore: return "OursNoExplore";
    case AgentKind::GreedyAudio: return "GreedyAudio";
    case AgentKind::RandomWalk: return "RandomWalk";
  }
  return "?";
}

inline std::optional<AgentKind> parse_agent(std::string_view s)
{
  for (const AgentKind k : kAllAgents) {
    if (agent_name(k) == s) return k;
  }
  return std::nullopt;
}

/// Everything an episode needs besides the map, the episode and the memory.
struct AgentParams
{
  AcousticNoiseModel acoustic;
  SensorModel sensor;
  ClassThresholds thresholds;
  int occupancy_size = 64;
  double max_log_odds = 6.0;
  double query_noise = 0.1;
  double confidence_threshold = 0.8;
  LocalizeOptions localize;
  bool look_ahead = true;
  double unknown_cost = 1.5;

  void validate() const
  {
    acoustic.validate();
    sensor.validate();
    if (!(thresholds.free_below <= thresholds.occupied_above) || occupancy_size < 1 || !(max_log_odds > 0.0) ||
        !(query_noise >= 0.0) || !(unknown_cost >= 1.0)) {
      throw std::invalid_argument("agent parameters out of range");
    }
  }

  /// All noise sources switched off; detector radius 0.
  static AgentParams noiseless()
  {
    AgentParams p;
    p.acoustic = AcousticNoiseModel::zero();
    p.sensor.flip_prob = 0.0;
    p.query_noise = 0.0;
    return p;
  }
};

/// What an agent perceives at one time step.
struct Observation
{
  RelativeLocation relative;  // noisy body-frame source estimate, meters
  bool goal = false;          // goal-reached classifier output
  bool bumped = false;        // previous translation was blocked
  std::optional<LocalReadings> readings;
  std::optional<FeatureVector> view;
};

namespace detail
{
inline Cell round_cell(Point p)
{
  return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
}

inline double dist2(Cell c, Point p)
{
  const double dx = c.x - p.x;
  const double dy = c.y - p.y;
  return dx * dx + dy * dy;
}

/// Rotation that brings `from` closer to `to` (left for a half turn).
inline Action rotation_toward(Orientation from, Orientation to)
{
  return rotate_right(from) == to ? Action::RotateRight : Action::RotateLeft;
}

inline Action random_rotation(Rng & rng) { return rng.below(2) == 0 ? Action::RotateLeft : Action::RotateRight; }

/// The reachable node nearest to `target` (ties lexicographic).
inline std::optional<Cell> nearest_reachable(const NavGraph & g, Cell from, Point target)
{
  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto & [c, hops] : reachable_from(g, from)) {
    const double d = dist2(c, target);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

/// Plan on `g` toward the node nearest to `target`, with the unreachable
/// fallback. Returns the next cell, or nullopt when the agent already sits on
/// the best node it can reach.
inline std::optional<std::vector<Cell>> plan_toward(const NavGraph & g, Cell from, Point target)
{
  const Cell goal = nearest_node(g, target);
  if (goal == from) return std::nullopt;
  if (auto path = dijkstra(g, from, goal)) return path;
  const auto fallback = nearest_reachable(g, from, target);
  if (!fallback || *fallback == from) return std::nullopt;
  return dijkstra(g, from, *fallback);
}
}  // namespace detail

/// Sound-only baseline: take the action whose one-step kinematic outcome is
/// closest to the current estimate, ignoring walls. Ties resolve in the
/// order Forward, Backward, Left, Right.
inline Action step_greedy(Pose pose, RelativeLocation estimate, bool goal)
{
  if (goal) return Action::Stop;
  const Point target = relative_to_absolute(pose, estimate);
  Action best = Action::MoveForward;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Action a : kMotionActions) {
    const double d = detail::dist2(kinematic_step(pose, a).cell, target);
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

/// Uniform over all five actions, Stop included.
inline Action step_random(Rng & rng) { return kAllActions[rng.below(kAllActions.size())]; }

/// Non-exploration agent: exact odometry from the known start, Bayes
/// occupancy mapping of the 5x5 view, Dijkstra over the optimistic lattice.
class OccupancyNavigator
{
public:
  OccupancyNavigator(Pose start, const AgentParams & params, Rng & rng)
  : params_(params),
    rng_(rng),
    pose_(start),
    grid_(params.occupancy_size, start.cell, params.max_log_odds),
    classes_(grid_.cell_count(), CellClass::Unknown)
  {
    graph_ = graph_from_occupancy(classes_, grid_.size(), grid_.origin());
    visited_.insert(start.cell);
  }

  Action decide(const Observation & obs)
  {
    odometry(obs.bumped);
    if (obs.readings) observe(*obs.readings);
    scanned_[static_cast<std::size_t>(pose_.orient)] = true;
    if (obs.goal) return remember(Action::Stop);

    target_ = update_target(target_, relative_to_absolute(pose_, obs.relative));
    const auto path = detail::plan_toward(graph_, pose_.cell, target_->mean);
    if (!path) return remember(detail::random_rotation(rng_));
    if (params_.look_ahead) {
      if (const auto turn = inspect(*path)) return remember(*turn);
    }
    return remember(path_to_action(pose_, (*path)[1]));
  }

  Pose believed_pose() const noexcept { return pose_; }
  const OccupancyGrid & grid() const noexcept { return grid_; }
  const NavGraph & graph() const noexcept { return graph_; }
  const std::optional<TargetEstimate> & target() const noexcept { return target_; }

private:
  Action remember(Action a)
  {
    last_ = a;
    return a;
  }

  void odometry(bool bumped)
  {
    if (!last_) return;
    if (is_translation(*last_)) {
      const Pose next = kinematic_step(pose_, *last_);
      if (bumped) {
        blocked_.insert(next.cell);
        refresh(next.cell);
      } else {
        pose_ = next;
        visited_.insert(pose_.cell);
        refresh(pose_.cell);
        scanned_.fill(false);
      }
    } else {
      pose_ = kinematic_step(pose_, *last_);
    }
  }

  void observe(const LocalReadings & readings)
  {
    integrate(grid_, pose_, readings, params_.sensor);
    for (int r = 0; r < kWindowSize; ++r) {
      for (int c = 0; c < kWindowSize; ++c) {
        if (readings[r][c] != Reading::None) refresh(window_cell(pose_, r, c));
      }
    }
  }

  bool passable(Cell c, std::size_t idx) const
  {
    if (visited_.contains(c)) return true;
    if (blocked_.contains(c)) return false;
    return classes_[idx] != CellClass::Obstacle;
  }

  void refresh(Cell c)
  {
    const auto idx = grid_.to_memory(c);
    if (!idx) return;
    classes_[*idx] = classify_belief(grid_.belief(*idx), params_.thresholds);
    const bool want = passable(c, *idx);
    if (want && !graph_.has_node(c)) restore_traversable(graph_, c);
    if (!want && graph_.has_node(c)) remove_obstacle(graph_, c);
  }

  /// Before committing to the plan, turn to look at upcoming path cells
  /// that have never been observed and that some not-yet-used heading at
  /// this cell would bring into view.
  std::optional<Action> inspect(const std::vector<Cell> & path) const
  {
    constexpr std::size_t kHorizon = 6;
    for (std::size_t i = 1; i < path.size() && i <= kHorizon; ++i) {
      const Cell c = path[i];
      const auto idx = grid_.to_memory(c);
      if (!idx || grid_.log_odds(*idx) != 0.0 || visited_.contains(c)) continue;
      for (const Orientation o : kOrientations) {
        if (scanned_[static_cast<std::size_t>(o)] || !in_view(o, c)) continue;
        return detail::rotation_toward(pose_.orient, o);
      }
    }
    return std::nullopt;
  }

  bool in_view(Orientation o, Cell c) const
  {
    const Cell d = c - pose_.cell;
    const Cell f = forward_vector(o);
    const Cell r = right_vector(o);
    const int ahead = d.x * f.x + d.y * f.y;
    const int lateral = d.x * r.x + d.y * r.y;
    return ahead >= 1 && ahead <= kWindowSize && lateral >= -2 && lateral <= 2;
  }

  AgentParams params_;
  Rng & rng_;
  Pose pose_;
  OccupancyGrid grid_;
  std::vector<CellClass> classes_;
  NavGraph graph_;
  std::set<Cell> visited_;
  std::set<Cell> blocked_;
  std::array<bool, 4> scanned_{};
  std::optional<TargetEstimate> target_;
  std::optional<Action> last_;
};

/// Explore-and-act agent. Localizes by retrieval and dead-reckons in between;
/// until the first confident retrieval it works in its own frame. Plans over
/// a lattice where cells of the exploration graph cost 1 and every other
/// cell not yet bumped into costs `unknown_cost`.
class MemoryNavigator
{
public:
  MemoryNavigator(const SpatialMemory & memory, const AgentParams & params, Rng & rng)
  : memory_(memory), params_(params), rng_(rng)
  {
    const std::vector<Pose> traj = memory.trajectory();
    graph_ = graph_from_trajectory(traj);
  }

  Action decide(const Observation & obs)
  {
    odometry(obs.bumped);
    if (obs.view) relocalize(*obs.view);
    if (obs.goal) return remember(Action::Stop);

    target_ = update_target(target_, relative_to_absolute(pose_, obs.relative));
    const Cell goal = detail::round_cell(target_->mean);
    if (goal == pose_.cell) return remember(detail::random_rotation(rng_));
    if (const auto next = lattice_step(goal)) return remember(path_to_action(pose_, *next));
    return remember(detail::random_rotation(rng_));
  }

  Pose believed_pose() const noexcept { return pose_; }
  bool anchored() const noexcept { return anchored_; }
  const NavGraph & graph() const noexcept { return graph_; }
  const std::optional<TargetEstimate> & target() const noexcept { return target_; }

private:
  Action remember(Action a)
  {
    last_ = a;
    return a;
  }

  void odometry(bool bumped)
  {
    if (!last_) return;
    if (is_translation(*last_)) {
      const Pose next = kinematic_step(pose_, *last_);
      if (bumped) {
        blocked_.insert(next.cell);
        if (anchored_) graph_.remove_node(next.cell);
      } else {
        if (anchored_) {
          graph_.add_edge(pose_.cell, next.cell);
        } else {
          visited_.insert(next.cell);
        }
        pose_ = next;
      }
    } else {
      pose_ = kinematic_step(pose_, *last_);
    }
  }

  void relocalize(const FeatureVector & view)
  {
    const Localization loc = localize(memory_, view, params_.localize);
    const bool first = !started_;
    started_ = true;
    const Pose fix{detail::round_cell(loc.coords), memory_.slots[loc.best_slot].orient};
    // A confident best match whose neighbors in the top-k pull the average
    // onto another cell is not trusted.
    const bool confident = loc.confidence >= params_.confidence_threshold &&
                           fix.cell == memory_.slots[loc.best_slot].coords;
    if (!first && !confident) return;
    if (first) {
      pose_ = fix;
      visited_.insert(pose_.cell);
    } else if (fix != pose_) {
      reframe(fix);
    }
    if (confident && !anchored_) {
      anchored_ = true;
      for (const Cell c : visited_) graph_.add_node(c);
      for (const Cell c : blocked_) graph_.remove_node(c);
      visited_.clear();
    }
  }

  /// Moves everything held in the believed frame along with the pose
  /// correction `pose_ -> fix`.
  void reframe(Pose fix)
  {
    const Pose from = pose_;
    auto carry = [&](Point p) {
      return relative_to_absolute(fix, absolute_to_relative(from, p, Units::Cells), Units::Cells);
    };
    auto carry_cells = [&](const std::set<Cell> & cells) {
      std::set<Cell> out;
      for (const Cell c : cells) out.insert(detail::round_cell(carry(to_point(c))));
      return out;
    };
    if (target_) target_->mean = carry(target_->mean);
    blocked_ = carry_cells(blocked_);
    visited_ = carry_cells(visited_);
    pose_ = fix;
  }

  /// First cell of the cheapest route to `goal` over the optimistic lattice:
  /// known cells cost 1, unknown cells `unknown_cost`, bumped cells are
  /// impassable. Explored cells only count once the pose is anchored.
  std::optional<Cell> lattice_step(Cell goal) const
  {
    int x0 = std::min(pose_.cell.x, goal.x);
    int x1 = std::max(pose_.cell.x, goal.x);
    int y0 = std::min(pose_.cell.y, goal.y);
    int y1 = std::max(pose_.cell.y, goal.y);
    auto known = [&](Cell c) { return anchored_ ? graph_.has_node(c) : visited_.contains(c); };
    if (anchored_) {
      for (const Cell c : graph_.nodes()) {
        x0 = std::min(x0, c.x);
        x1 = std::max(x1, c.x);
        y0 = std::min(y0, c.y);
        y1 = std::max(y1, c.y);
      }
    }
    constexpr int kMargin = 4;
    x0 -= kMargin;
    y0 -= kMargin;
    x1 += kMargin;
    y1 += kMargin;
    const int w = x1 - x0 + 1;
    const int h = y1 - y0 + 1;
    auto index = [&](Cell c) { return static_cast<std::size_t>((c.y - y0) * w + (c.x - x0)); };
    auto inside = [&](Cell c) { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; };
    auto enter = [&](Cell c) { return c == goal || known(c) ? 1.0 : params_.unknown_cost; };

    // Search from the goal so the first step can be read off directly.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), kInf);
    using Entry = std::pair<double, Cell>;
    std::set<Entry> open;
    cost[index(goal)] = 0.0;
    open.insert({0.0, goal});
    while (!open.empty()) {
      const auto [d, c] = *open.begin();
      open.erase(open.begin());
      if (c == pose_.cell) break;
      const double step = enter(c);
      for (const Orientation o : kOrientations) {
        const Cell n = c + forward_vector(o);
        if (!inside(n) || (n != pose_.cell && blocked_.contains(n))) continue;
        if (d + step < cost[index(n)]) {
          open.erase({cost[index(n)], n});
          cost[index(n)] = d + step;
          open.insert({d + step, n});
        }
      }
    }
    std::optional<Cell> best;
    double best_d = kInf;
    for (const Orientation o : kOrientations) {
      const Cell n = pose_.cell + forward_vector(o);
      if (!inside(n) || blocked_.contains(n) || cost[index(n)] == kInf) continue;
      const double d = cost[index(n)] + enter(n);
      if (d < best_d || (d == best_d && n < *best)) {
        best_d = d;
        best = n;
      }
    }
    return best;
  }

  const SpatialMemory & memory_;
  AgentParams params_;
  Rng & rng_;
  NavGraph graph_;
  Pose pose_;
  bool started_ = false;
  bool anchored_ = false;
  std::set<Cell> blocked_;  // believed frame
  std::set<Cell> visited_;  // believed frame, before anchoring
  std::optional<TargetEstimate> target_;
  std::optional<Action> last_;
};

enum class Termination : std::uint8_t { Stopped, StepLimit };

constexpr std::string_view termination_name(Termination t)
{
  return t == Termination::Stopped ? "Stopped" : "StepLimit";
}

struct StepRecord
{
  int step = 0;
  Pose pose;  // pose in which the action was taken
  Action action = Action::Stop;
  bool bump = false;
};

struct EpisodeResult
{
  bool success = false;
  int steps_taken = 0;
  int path_length_cells = 0;  // translations that changed the pose
  Termination termination = Termination::StepLimit;
  Pose final_pose;
  std::vector<StepRecord> trajectory;
};

class EpisodeError : public std::runtime_error
{
public:
  enum class Kind { ConfigMismatch, InvalidEpisode };

  EpisodeError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// Optional per-step hook for logging (the pose, the observation, the
/// chosen action).
using StepObserver = std::function<void(int, Pose, const Observation &, Action)>;

/// Final internal state of the planning agents, for debug dumps.
struct EpisodeCapture
{
  std::optional<OccupancyGrid> grid;
  std::optional<NavGraph> graph;
};

/// Runs one episode to Stop or the step limit. `memory` is required for
/// OursExplore and must have been built on `map`.
inline EpisodeResult run_episode(const GridMap & map, const EpisodeConfig & cfg, AgentKind kind,
                                 const AgentParams & params, const SpatialMemory * memory = nullptr,
                                 const StepObserver & observer = {}, EpisodeCapture * capture = nullptr)
{
  if (!map.is_free(cfg.start.cell) || !map.is_free(cfg.source)) {
    throw EpisodeError(EpisodeError::Kind::InvalidEpisode, "episode start and source must be free cells");
  }
  if (kind == AgentKind::OursExplore) {
    if (memory == nullptr || memory->empty()) {
      throw EpisodeError(EpisodeError::Kind::ConfigMismatch, "OursExplore needs a spatial memory");
    }
    if (memory->map_fingerprint != map.fingerprint()) {
      throw EpisodeError(EpisodeError::Kind::ConfigMismatch, "spatial memory was built on a different map");
    }
  }

  Rng acoustic_rng(derive_seed(cfg.seed, {fnv1a("acoustic")}));
  Rng detector_rng(derive_seed(cfg.seed, {fnv1a("detector")}));
  Rng vision_rng(derive_seed(cfg.seed, {fnv1a("vision")}));
  Rng policy_rng(derive_seed(cfg.seed, {fnv1a("policy")}));

  const DistanceField from_source(map, cfg.source);
  std::optional<OccupancyNavigator> occupancy;
  std::optional<MemoryNavigator> retrieval;
  PoseFeatureModel features;
  if (kind == AgentKind::OursNoExplore) occupancy.emplace(cfg.start, params, policy_rng);
  if (kind == AgentKind::OursExplore) {
    retrieval.emplace(*memory, params, policy_rng);
    features = {memory->model_seed, memory->dim, memory->alpha, params.query_noise};
  }

  EpisodeResult result;
  result.trajectory.reserve(static_cast<std::size_t>(std::max(cfg.max_steps, 0)));
  Pose pose = cfg.start;
  bool bumped = false;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const AudioCue cue = simulate_cue(map, pose, from_source);
    Observation obs;
    obs.goal = goal_detected(cue, params.acoustic, detector_rng);
    obs.relative = estimate_relative(cue, params.acoustic, acoustic_rng);
    obs.bumped = bumped;

    Action action = Action::Stop;
    switch (kind) {
      case AgentKind::OursNoExplore:
        obs.readings = sense_local(map, pose, params.sensor, vision_rng);
        action = occupancy->decide(obs);
        break;
      case AgentKind::OursExplore:
        obs.view = feature_of(features, pose, &vision_rng);
        action = retrieval->decide(obs);
        break;
      case AgentKind::GreedyAudio: action = step_greedy(pose, obs.relative, obs.goal); break;
      case AgentKind::RandomWalk: action = step_random(policy_rng); break;
    }
    if (observer) observer(step, pose, obs, action);

    const Pose next = apply_action(map, pose, action);
    bumped = is_translation(action) && next == pose;
    result.trajectory.push_back({step, pose, action, bumped});
    result.steps_taken = step + 1;
    if (action == Action::Stop) {
      result.termination = Termination::Stopped;
      break;
    }
    if (is_translation(action) && !bumped) ++result.path_length_cells;
    pose = next;
  }
  result.final_pose = pose;
  if (capture != nullptr) {
    if (occupancy) {
      capture->grid = occupancy->grid();
      capture->graph = occupancy->graph();
    }
    if (retrieval) capture->graph = retrieval->graph();
  }
  result.success = result.termination == Termination::Stopped && pose.cell == cfg.source;
  return result;
}

/// Line-oriented trajectory dump: `step x y orient action bump`.
inline void write_trajectory(std::ostream & out, const EpisodeResult & r)
{
  out << "# step x y orient action bump\n";
  for (const StepRecord & s : r.trajectory) {
    out << s.step << ' ' << s.pose.cell.x << ' ' << s.pose.cell.y << ' ' << orientation_letter(s.pose.orient) << ' '
        << action_name(s.action) << ' ' << (s.bump ? 1 : 0) << '\n';
  }
}

}  // namespace avnav

#endif  // AVNAV_AGENT_HPP_
