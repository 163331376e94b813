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

#ifndef AVNAV_ACOUSTICS_HPP_
#define AVNAV_ACOUSTICS_HPP_

#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "avnav/gridworld.hpp"
#include "avnav/rng.hpp"

// Parametric stand-in for a spatial audio renderer plus a learned
// sound-location regressor. Propagation is abstracted to the geodesic
// (shortest free-space path) distance; the regressor is "truth plus
// Gaussian noise" whose spread grows with that distance and is inflated
// without line of sight.

namespace avnav
{

/// Source offset in the agent's body frame.
struct RelativeLocation
{
  double right = 0.0;
  double front = 0.0;

  friend constexpr bool operator==(const RelativeLocation &, const RelativeLocation &) = default;
};

enum class Units { Cells, Meters };

struct AudioCue
{
  double geodesic_distance = 0.0;  // meters along the shortest free path
  double straight_distance = 0.0;  // meters, cell center to cell center
  double straight_bearing = 0.0;   // radians, 0 = ahead, positive = right
  bool line_of_sight = true;
};

struct AcousticNoiseModel
{
  double sigma0 = 0.5;        // meters
  double k = 0.1;             // extra std per meter of geodesic distance
  double nlos_penalty = 1.5;  // std multiplier when the source is occluded
  int detector_radius = 0;    // cells
  double detector_miss_rate = 0.05;

  void validate() const
  {
    if (!(sigma0 >= 0.0) || !(k >= 0.0) || !(nlos_penalty >= 1.0) || detector_radius < 0 ||
        !(detector_miss_rate >= 0.0 && detector_miss_rate < 1.0)) {
      throw std::invalid_argument("acoustic noise parameters out of range");
    }
  }

  static AcousticNoiseModel zero()
  {
    AcousticNoiseModel m;
    m.sigma0 = 0.0;
    m.k = 0.0;
    m.nlos_penalty = 1.0;
    m.detector_miss_rate = 0.0;
    return m;
  }
};

/// Per-category presets. Categories differ only in base spread.
inline std::optional<AcousticNoiseModel> sound_preset(std::string_view name)
{
  AcousticNoiseModel m;
  if (name == "ring") {
    m.sigma0 = 0.50;
  } else if (name == "alarm") {
    m.sigma0 = 0.55;
  } else if (name == "clock") {
    m.sigma0 = 0.45;
  } else {
    return std::nullopt;
  }
  return m;
}

namespace detail
{
inline double unit_scale(Units units, double cell_size) { return units == Units::Meters ? cell_size : 1.0; }
}  // namespace detail

/// Rotates the world-frame offset (source - agent) into the agent frame.
inline RelativeLocation absolute_to_relative(Pose pose, Point source, Units units = Units::Meters,
                                             double cell_size = GridMap::kCellSize)
{
  const double dx = source.x - pose.cell.x;
  const double dy = source.y - pose.cell.y;
  const double s = detail::unit_scale(units, cell_size);
  switch (pose.orient) {
    case Orientation::North: return {dx * s, dy * s};
    case Orientation::East: return {-dy * s, dx * s};
    case Orientation::South: return {-dx * s, -dy * s};
    case Orientation::West: return {dy * s, -dx * s};
  }
  return {};
}

inline RelativeLocation absolute_to_relative(Pose pose, Cell source, Units units = Units::Meters,
                                             double cell_size = GridMap::kCellSize)
{
  return absolute_to_relative(pose, to_point(source), units, cell_size);
}

/// Inverse of absolute_to_relative.
inline Point relative_to_absolute(Pose pose, RelativeLocation rel, Units units = Units::Meters,
                                  double cell_size = GridMap::kCellSize)
{
  const double s = detail::unit_scale(units, cell_size);
  const double r = rel.right / s;
  const double f = rel.front / s;
  const double ax = pose.cell.x;
  const double ay = pose.cell.y;
  switch (pose.orient) {
    case Orientation::North: return {ax + r, ay + f};
    case Orientation::East: return {ax + f, ay - r};
    case Orientation::South: return {ax - r, ay - f};
    case Orientation::West: return {ax - f, ay + r};
  }
  return {ax, ay};
}

/// Visits every cell whose closed square the segment between the centers
/// of a and b touches, including both neighbours at exact corner crossings.
/// Stops early when the visitor returns false.
template <typename Visitor>
bool for_each_supercover_cell(Cell a, Cell b, Visitor && visit)
{
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  const int nx = std::abs(dx);
  const int ny = std::abs(dy);
  const int sx = dx > 0 ? 1 : -1;
  const int sy = dy > 0 ? 1 : -1;
  Cell p = a;
  if (!visit(p)) return false;
  for (int ix = 0, iy = 0; ix < nx || iy < ny;) {
    const long decision = static_cast<long>(1 + 2 * ix) * ny - static_cast<long>(1 + 2 * iy) * nx;
    if (decision == 0) {
      if (!visit(Cell{p.x + sx, p.y}) || !visit(Cell{p.x, p.y + sy})) return false;
      p.x += sx;
      p.y += sy;
      ++ix;
      ++iy;
    } else if (decision < 0) {
      p.x += sx;
      ++ix;
    } else {
      p.y += sy;
      ++iy;
    }
    if (!visit(p)) return false;
  }
  return true;
}

inline bool line_of_sight(const GridMap & map, Cell a, Cell b)
{
  return for_each_supercover_cell(a, b, [&](Cell c) { return map.is_free(c); });
}

/// Audio cue using a BFS field rooted at the source (reused across steps).
inline AudioCue simulate_cue(const GridMap & map, Pose pose, const DistanceField & from_source)
{
  const Cell source = from_source.origin();
  const std::optional<int> hops = from_source.at(pose.cell);
  if (!hops) throw std::logic_error("agent cell is not connected to the sound source");
  const RelativeLocation rel = absolute_to_relative(pose, source, Units::Meters, map.cell_size());
  AudioCue cue;
  cue.geodesic_distance = *hops * map.cell_size();
  cue.straight_distance = std::hypot(rel.right, rel.front);
  cue.straight_bearing = (rel.right == 0.0 && rel.front == 0.0) ? 0.0 : std::atan2(rel.right, rel.front);
  cue.line_of_sight = line_of_sight(map, pose.cell, source);
  return cue;
}

inline AudioCue simulate_cue(const GridMap & map, Pose pose, Cell source)
{
  return simulate_cue(map, pose, DistanceField(map, source));
}

/// Noise-free regressor output: the straight-line offset in the body frame.
inline RelativeLocation cue_truth(const AudioCue & cue)
{
  return {cue.straight_distance * std::sin(cue.straight_bearing),
          cue.straight_distance * std::cos(cue.straight_bearing)};
}

/// Per-axis standard deviation of the estimate for this cue.
inline double estimate_sigma(const AudioCue & cue, const AcousticNoiseModel & noise)
{
  const double base = noise.sigma0 + noise.k * cue.geodesic_distance;
  return cue.line_of_sight ? base : base * noise.nlos_penalty;
}

inline RelativeLocation estimate_relative(const AudioCue & cue, const AcousticNoiseModel & noise, Rng & rng)
{
  RelativeLocation est = cue_truth(cue);
  const double sigma = estimate_sigma(cue, noise);
  if (sigma > 0.0) {
    est.right += sigma * rng.normal();
    est.front += sigma * rng.normal();
  }
  return est;
}

/// Goal-reached classifier: never fires beyond the radius; inside it fires
/// with probability 1 - miss_rate.
inline bool goal_detected(const AudioCue & cue, const AcousticNoiseModel & noise, Rng & rng)
{
  const double radius_m = noise.detector_radius * GridMap::kCellSize;
  if (cue.geodesic_distance > radius_m + 1e-9) return false;
  if (noise.detector_miss_rate <= 0.0) return true;
  return !rng.bernoulli(noise.detector_miss_rate);
}

}  // namespace avnav

#endif  // AVNAV_ACOUSTICS_HPP_
