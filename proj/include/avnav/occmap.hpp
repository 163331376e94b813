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

#ifndef AVNAV_OCCMAP_HPP_
#define AVNAV_OCCMAP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "avnav/gridworld.hpp"
#include "avnav/rng.hpp"

namespace avnav
{

enum class Reading : std::uint8_t { Free, Obstacle, None };

using LocalReadings = Window<Reading>;

/// Egocentric free-space sensor: ground truth with independent label flips.
struct SensorModel
{
  double flip_prob = 0.1;
  double p_hit = 0.7;

  double p_free() const noexcept { return 1.0 - p_hit; }

  /// Log-odds increment of one obstacle reading.
  double hit_log_odds() const { return std::log(p_hit / (1.0 - p_hit)); }

  void validate() const
  {
    if (!(flip_prob >= 0.0 && flip_prob < 0.5) || !(p_hit > 0.5 && p_hit < 1.0)) {
      throw std::invalid_argument("sensor model parameters out of range");
    }
  }
};

inline LocalReadings sense_local(const GridMap & map, Pose pose, const SensorModel & sensor, Rng & rng)
{
  const Window<WindowCell> truth = visible_window(map, pose);
  LocalReadings out{};
  for (int r = 0; r < kWindowSize; ++r) {
    for (int c = 0; c < kWindowSize; ++c) {
      if (truth[r][c] == WindowCell::OutOfBounds) {
        out[r][c] = Reading::None;
        continue;
      }
      const bool obstacle = truth[r][c] == WindowCell::Obstacle;
      const bool flipped = sensor.flip_prob > 0.0 && rng.bernoulli(sensor.flip_prob);
      out[r][c] = (obstacle != flipped) ? Reading::Obstacle : Reading::Free;
    }
  }
  return out;
}

enum class CellClass : std::uint8_t { Free, Obstacle, Unknown };

struct ClassThresholds
{
  double free_below = 0.4;
  double occupied_above = 0.6;
};

inline CellClass classify_belief(double belief, const ClassThresholds & t = {})
{
  if (belief < t.free_below) return CellClass::Free;
  if (belief > t.occupied_above) return CellClass::Obstacle;
  return CellClass::Unknown;
}

class MemoryOverflow : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// N x N log-odds occupancy grid centered on the agent's start cell.
/// Memory index (i, j) holds world cell origin + (i - N/2, j - N/2).
class OccupancyGrid
{
public:
  explicit OccupancyGrid(int size = 64, Cell origin = {}, double max_log_odds = 6.0)
  : size_(size), origin_(origin), max_log_odds_(max_log_odds)
  {
    if (size < 1) throw std::invalid_argument("occupancy grid size must be positive");
    log_odds_.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
  }

  int size() const noexcept { return size_; }
  Cell origin() const noexcept { return origin_; }
  double max_log_odds() const noexcept { return max_log_odds_; }

  std::optional<std::size_t> to_memory(Cell world) const
  {
    const int i = world.x - origin_.x + size_ / 2;
    const int j = world.y - origin_.y + size_ / 2;
    if (i < 0 || j < 0 || i >= size_ || j >= size_) return std::nullopt;
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(i);
  }

  Cell to_world(std::size_t index) const
  {
    const int i = static_cast<int>(index % static_cast<std::size_t>(size_));
    const int j = static_cast<int>(index / static_cast<std::size_t>(size_));
    return {i - size_ / 2 + origin_.x, j - size_ / 2 + origin_.y};
  }

  std::size_t cell_count() const noexcept { return log_odds_.size(); }

  double log_odds(std::size_t index) const { return log_odds_.at(index); }

  double belief(std::size_t index) const { return 1.0 / (1.0 + std::exp(-log_odds_.at(index))); }

  std::optional<double> belief_at(Cell world) const
  {
    const auto idx = to_memory(world);
    if (!idx) return std::nullopt;
    return belief(*idx);
  }

  void add_log_odds(std::size_t index, double delta)
  {
    double & l = log_odds_.at(index);
    l = std::clamp(l + delta, -max_log_odds_, max_log_odds_);
  }

private:
  int size_;
  Cell origin_;
  double max_log_odds_;
  std::vector<double> log_odds_;
};

/// Bayes (log-odds) fusion of one local observation. Throws MemoryOverflow,
/// leaving the grid untouched, when any observed cell falls outside the grid.
inline void integrate(OccupancyGrid & grid, Pose pose, const LocalReadings & readings, const SensorModel & sensor)
{
  std::array<std::optional<std::size_t>, kWindowSize * kWindowSize> target{};
  for (int r = 0; r < kWindowSize; ++r) {
    for (int c = 0; c < kWindowSize; ++c) {
      if (readings[r][c] == Reading::None) continue;
      const Cell world = window_cell(pose, r, c);
      const auto idx = grid.to_memory(world);
      if (!idx) {
        throw MemoryOverflow("observation (" + std::to_string(world.x) + "," + std::to_string(world.y) +
                             ") falls outside the " + std::to_string(grid.size()) + "x" +
                             std::to_string(grid.size()) + " occupancy memory");
      }
      target[static_cast<std::size_t>(r * kWindowSize + c)] = idx;
    }
  }
  const double step = sensor.hit_log_odds();
  for (int r = 0; r < kWindowSize; ++r) {
    for (int c = 0; c < kWindowSize; ++c) {
      const auto & idx = target[static_cast<std::size_t>(r * kWindowSize + c)];
      if (!idx) continue;
      grid.add_log_odds(*idx, readings[r][c] == Reading::Obstacle ? step : -step);
    }
  }
}

inline std::vector<CellClass> classify(const OccupancyGrid & grid, const ClassThresholds & t = {})
{
  std::vector<CellClass> out(grid.cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = classify_belief(grid.belief(i), t);
  return out;
}

/// Plain-text belief matrix, north row first, 4-decimal fixed point.
inline void dump_beliefs(std::ostream & out, const OccupancyGrid & grid)
{
  char buf[16];
  const auto n = static_cast<std::size_t>(grid.size());
  for (std::size_t row = n; row-- > 0;) {
    for (std::size_t col = 0; col < n; ++col) {
      std::snprintf(buf, sizeof buf, "%.4f", grid.belief(row * n + col));
      if (col > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace avnav

#endif  // AVNAV_OCCMAP_HPP_
