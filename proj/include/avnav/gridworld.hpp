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

#ifndef AVNAV_GRIDWORLD_HPP_
#define AVNAV_GRIDWORLD_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "avnav/rng.hpp"

namespace avnav
{

/// Grid cell coordinates. x grows east, y grows north, origin at the
/// south-west corner. Ordered lexicographically by (x, y).
struct Cell
{
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell &, const Cell &) = default;
  friend constexpr Cell operator+(Cell a, Cell b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Cell operator-(Cell a, Cell b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Cell operator*(int k, Cell a) { return {k * a.x, k * a.y}; }
};

/// Continuous world coordinates in cell units (cell centers at integers).
struct Point
{
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point &, const Point &) = default;
};

constexpr Point to_point(Cell c) { return {static_cast<double>(c.x), static_cast<double>(c.y)}; }

constexpr int manhattan(Cell a, Cell b)
{
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

enum class Orientation : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Orientation, 4> kOrientations = {
  Orientation::North, Orientation::East, Orientation::South, Orientation::West};

constexpr Orientation rotate_left(Orientation o)
{
  return static_cast<Orientation>((static_cast<int>(o) + 3) % 4);
}

constexpr Orientation rotate_right(Orientation o)
{
  return static_cast<Orientation>((static_cast<int>(o) + 1) % 4);
}

/// Unit step along the facing direction.
constexpr Cell forward_vector(Orientation o)
{
  switch (o) {
    case Orientation::North: return {0, 1};
    case Orientation::East: return {1, 0};
    case Orientation::South: return {0, -1};
    case Orientation::West: return {-1, 0};
  }
  return {0, 0};
}

/// Unit step toward the agent's right hand.
constexpr Cell right_vector(Orientation o) { return forward_vector(rotate_right(o)); }

constexpr char orientation_letter(Orientation o) { return "NESW"[static_cast<int>(o)]; }

inline std::optional<Orientation> parse_orientation(std::string_view s)
{
  if (s == "N" || s == "North") return Orientation::North;
  if (s == "E" || s == "East") return Orientation::East;
  if (s == "S" || s == "South") return Orientation::South;
  if (s == "W" || s == "West") return Orientation::West;
  return std::nullopt;
}

struct Pose
{
  Cell cell;
  Orientation orient = Orientation::North;

  friend constexpr bool operator==(const Pose &, const Pose &) = default;
};

enum class Action : std::uint8_t { MoveForward, MoveBackward, RotateLeft, RotateRight, Stop };

inline constexpr std::array<Action, 5> kAllActions = {
  Action::MoveForward, Action::MoveBackward, Action::RotateLeft, Action::RotateRight, Action::Stop};

inline constexpr std::array<Action, 4> kMotionActions = {
  Action::MoveForward, Action::MoveBackward, Action::RotateLeft, Action::RotateRight};

constexpr bool is_translation(Action a)
{
  return a == Action::MoveForward || a == Action::MoveBackward;
}

constexpr std::string_view action_name(Action a)
{
  switch (a) {
    case Action::MoveForward: return "MoveForward";
    case Action::MoveBackward: return "MoveBackward";
    case Action::RotateLeft: return "RotateLeft";
    case Action::RotateRight: return "RotateRight";
    case Action::Stop: return "Stop";
  }
  return "?";
}

inline std::optional<Action> parse_action(std::string_view s)
{
  for (const Action a : kAllActions) {
    if (action_name(a) == s) return a;
  }
  return std::nullopt;
}

/// Kinematics without a map: where the action would take the agent.
constexpr Pose kinematic_step(Pose pose, Action action)
{
  switch (action) {
    case Action::MoveForward: return {pose.cell + forward_vector(pose.orient), pose.orient};
    case Action::MoveBackward: return {pose.cell - forward_vector(pose.orient), pose.orient};
    case Action::RotateLeft: return {pose.cell, rotate_left(pose.orient)};
    case Action::RotateRight: return {pose.cell, rotate_right(pose.orient)};
    case Action::Stop: return pose;
  }
  return pose;
}

class MapError : public std::runtime_error
{
public:
  enum class Kind { Empty, RaggedRows, UnknownChar, NoFreeCell, NoSourceCandidate, DisconnectedFreeSpace, Io };

  MapError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// An apartment discretized into square cells. Immutable after load.
class GridMap
{
public:
  static constexpr double kCellSize = 0.5;  // meters

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double cell_size() const noexcept { return kCellSize; }
  const std::string & name() const noexcept { return name_; }

  bool in_bounds(Cell c) const noexcept
  {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }

  bool is_free(Cell c) const noexcept { return in_bounds(c) && free_[index(c)]; }

  std::size_t index(Cell c) const noexcept
  {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }

  Cell cell_at(std::size_t i) const noexcept
  {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  /// Source and spawn candidates in file reading order (north row first).
  const std::vector<Cell> & source_candidates() const noexcept { return sources_; }
  const std::vector<Cell> & spawn_candidates() const noexcept { return spawns_; }

  bool is_source_candidate(Cell c) const
  {
    for (const Cell s : sources_) {
      if (s == c) return true;
    }
    return false;
  }

  std::vector<Cell> free_cells() const
  {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < free_.size(); ++i) {
      if (free_[i]) out.push_back(cell_at(i));
    }
    return out;
  }

  std::size_t free_count() const
  {
    std::size_t n = 0;
    for (const bool f : free_) n += f ? 1 : 0;
    return n;
  }

  /// Content hash over dimensions, terrain and candidate lists.
  std::uint64_t fingerprint() const
  {
    std::uint64_t h = derive_seed(0x61766e6176ULL, {std::uint64_t(width_), std::uint64_t(height_)});
    for (const bool f : free_) h = mix64(h ^ (f ? 0x9dULL : 0x3bULL));
    for (const Cell c : sources_) h = derive_seed(h, {1, std::uint64_t(c.x), std::uint64_t(c.y)});
    for (const Cell c : spawns_) h = derive_seed(h, {2, std::uint64_t(c.x), std::uint64_t(c.y)});
    return h;
  }

private:
  friend GridMap load_map(std::string_view text, std::string name);

  int width_ = 0;
  int height_ = 0;
  std::vector<bool> free_;
  std::vector<Cell> sources_;
  std::vector<Cell> spawns_;
  std::string name_;
};

/// BFS hop distances from one cell over 4-adjacent free cells.
class DistanceField
{
public:
  static constexpr int kUnreachable = -1;

  DistanceField(const GridMap & map, Cell origin) : width_(map.width()), origin_(origin)
  {
    dist_.assign(static_cast<std::size_t>(map.width()) * static_cast<std::size_t>(map.height()),
                 kUnreachable);
    if (!map.is_free(origin)) return;
    std::deque<Cell> frontier{origin};
    dist_[map.index(origin)] = 0;
    while (!frontier.empty()) {
      const Cell c = frontier.front();
      frontier.pop_front();
      const int d = dist_[map.index(c)];
      for (const Orientation o : kOrientations) {
        const Cell n = c + forward_vector(o);
        if (map.is_free(n) && dist_[map.index(n)] == kUnreachable) {
          dist_[map.index(n)] = d + 1;
          frontier.push_back(n);
        }
      }
    }
  }

  Cell origin() const noexcept { return origin_; }

  std::optional<int> at(Cell c) const
  {
    if (c.x < 0 || c.y < 0 || c.x >= width_) return std::nullopt;
    const std::size_t i =
      static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
    if (i >= dist_.size() || dist_[i] == kUnreachable) return std::nullopt;
    return dist_[i];
  }

private:
  int width_;
  Cell origin_;
  std::vector<int> dist_;
};

/// Parses the ASCII map format:
///   '# ' comment lines, then rows of '#' (obstacle), '.' (free),
///   'G' (free, source candidate), 'S' (free, spawn candidate).
/// The first grid row is the northernmost. Without any 'S', every free cell
/// is a spawn candidate.
inline GridMap load_map(std::string_view text, std::string name = {})
{
  std::vector<std::string> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.size() >= 2 && line[0] == '#' && line[1] == ' ') continue;
    rows.push_back(std::move(line));
    if (end == text.size()) break;
  }
  if (rows.empty()) throw MapError(MapError::Kind::Empty, "map has no grid rows");

  GridMap map;
  map.name_ = std::move(name);
  map.width_ = static_cast<int>(rows.front().size());
  map.height_ = static_cast<int>(rows.size());
  map.free_.assign(static_cast<std::size_t>(map.width_) * static_cast<std::size_t>(map.height_), false);

  bool any_spawn_marker = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != map.width_) {
      throw MapError(MapError::Kind::RaggedRows,
                     "row " + std::to_string(r + 1) + " has length " + std::to_string(rows[r].size()) +
                       ", expected " + std::to_string(map.width_));
    }
    const int y = map.height_ - 1 - static_cast<int>(r);
    for (int x = 0; x < map.width_; ++x) {
      const char ch = rows[r][static_cast<std::size_t>(x)];
      const Cell c{x, y};
      switch (ch) {
        case '#': break;
        case '.': map.free_[map.index(c)] = true; break;
        case 'G':
          map.free_[map.index(c)] = true;
          map.sources_.push_back(c);
          break;
        case 'S':
          map.free_[map.index(c)] = true;
          map.spawns_.push_back(c);
          any_spawn_marker = true;
          break;
        default:
          throw MapError(MapError::Kind::UnknownChar,
                         std::string("unknown map character '") + ch + "' at row " + std::to_string(r + 1));
      }
    }
  }
  if (!any_spawn_marker) {
    for (int r = 0; r < map.height_; ++r) {
      for (int x = 0; x < map.width_; ++x) {
        const Cell c{x, map.height_ - 1 - r};
        if (map.free_[map.index(c)]) map.spawns_.push_back(c);
      }
    }
  }
  if (map.spawns_.empty()) throw MapError(MapError::Kind::NoFreeCell, "map has no free cell");
  if (map.sources_.empty()) throw MapError(MapError::Kind::NoSourceCandidate, "map has no 'G' source candidate");

  const DistanceField reach(map, map.spawns_.front());
  for (std::size_t i = 0; i < map.free_.size(); ++i) {
    if (map.free_[i] && !reach.at(map.cell_at(i))) {
      const Cell c = map.cell_at(i);
      throw MapError(MapError::Kind::DisconnectedFreeSpace,
                     "free cell (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                       ") is not reachable from the first spawn candidate");
    }
  }
  return map;
}

inline GridMap load_map_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapError(MapError::Kind::Io, "cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return load_map(buf.str(), name);
}

/// Applies one action. Translations into obstacles or off the map leave the
/// pose unchanged (a bump); Stop is a no-op.
inline Pose apply_action(const GridMap & map, Pose pose, Action action)
{
  const Pose next = kinematic_step(pose, action);
  if (is_translation(action) && !map.is_free(next.cell)) return pose;
  return next;
}

/// Ground-truth hop distance between two cells, nullopt when unreachable.
inline std::optional<int> shortest_path_cells(const GridMap & map, Cell a, Cell b)
{
  if (!map.is_free(a) || !map.is_free(b)) return std::nullopt;
  if (a == b) return 0;
  return DistanceField(map, a).at(b);
}

enum class WindowCell : std::uint8_t { Free, Obstacle, OutOfBounds };

inline constexpr int kWindowSize = 5;

template <typename T>
using Window = std::array<std::array<T, kWindowSize>, kWindowSize>;

/// World cell seen at window position (row, col): row r is r+1 cells ahead,
/// col c is c-2 cells to the right.
constexpr Cell window_cell(Pose pose, int row, int col)
{
  return pose.cell + (row + 1) * forward_vector(pose.orient) + (col - 2) * right_vector(pose.orient);
}

/// The 5x5 block of cells directly ahead of the agent.
inline Window<WindowCell> visible_window(const GridMap & map, Pose pose)
{
  Window<WindowCell> w{};
  for (int r = 0; r < kWindowSize; ++r) {
    for (int c = 0; c < kWindowSize; ++c) {
      const Cell cell = window_cell(pose, r, c);
      w[r][c] = !map.in_bounds(cell) ? WindowCell::OutOfBounds
                : map.is_free(cell)  ? WindowCell::Free
                                     : WindowCell::Obstacle;
    }
  }
  return w;
}

struct EpisodeConfig
{
  std::string map_id;
  Cell source;
  Pose start;
  int max_steps = 200;
  std::uint64_t seed = 0;
};

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Checks the EpisodeConfig invariants against a map.
inline void validate_episode(const GridMap & map, const EpisodeConfig & cfg)
{
  if (!map.is_source_candidate(cfg.source)) throw ConfigError("episode source is not a source candidate");
  bool spawn = false;
  for (const Cell c : map.spawn_candidates()) spawn = spawn || c == cfg.start.cell;
  if (!spawn) throw ConfigError("episode start is not a spawn candidate");
  if (cfg.start.cell == cfg.source) throw ConfigError("episode start coincides with the source");
  if (cfg.max_steps < 0) throw ConfigError("max_steps must be non-negative");
}

}  // namespace avnav

#endif  // AVNAV_GRIDWORLD_HPP_
