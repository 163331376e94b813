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

#ifndef AVNAV_VISMEM_HPP_
#define AVNAV_VISMEM_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avnav/gridworld.hpp"
#include "avnav/rng.hpp"

namespace avnav
{

using FeatureVector = std::vector<double>;

inline double dot(const FeatureVector & a, const FeatureVector & b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void normalize(FeatureVector & v)
{
  const double n = std::sqrt(dot(v, v));
  if (n > 0.0) {
    for (double & x : v) x /= n;
  }
}

inline double cosine_similarity(const FeatureVector & a, const FeatureVector & b)
{
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

/// Synthetic replacement for a pretrained image embedding. The feature of a
/// pose mixes a pose-unique random direction with a component shared by the
/// same-heading views of the surrounding 3x3 cells, so nearby poses alias.
struct PoseFeatureModel
{
  std::uint64_t seed = 0;
  int dim = 64;
  double alpha = 0.3;        // weight of the neighbourhood component
  double query_noise = 0.1;  // expected norm of the query perturbation

  void validate() const
  {
    if (dim < 1 || !(alpha >= 0.0 && alpha < 1.0) || !(query_noise >= 0.0)) {
      throw std::invalid_argument("pose feature model parameters out of range");
    }
  }
};

namespace detail
{
inline constexpr std::uint64_t kPoseTag = fnv1a("pose");
inline constexpr std::uint64_t kViewTag = fnv1a("view");

inline FeatureVector random_unit(std::uint64_t seed, int dim)
{
  Rng rng(seed);
  FeatureVector v(static_cast<std::size_t>(dim));
  for (double & x : v) x = rng.normal();
  normalize(v);
  return v;
}

inline std::uint64_t pose_key(std::uint64_t model_seed, std::uint64_t tag, Cell c, Orientation o)
{
  return derive_seed(model_seed, {tag, static_cast<std::uint64_t>(static_cast<std::int64_t>(c.x)),
                                  static_cast<std::uint64_t>(static_cast<std::int64_t>(c.y)),
                                  static_cast<std::uint64_t>(o)});
}
}  // namespace detail

/// Deterministic base feature of a pose; with an rng, an isotropic Gaussian
/// perturbation of expected norm query_noise is added and the result
/// re-normalized.
inline FeatureVector feature_of(const PoseFeatureModel & model, Pose pose, Rng * rng = nullptr)
{
  const auto dim = static_cast<std::size_t>(model.dim);
  FeatureVector own = detail::random_unit(detail::pose_key(model.seed, detail::kPoseTag, pose.cell, pose.orient),
                                          model.dim);
  FeatureVector out(dim, 0.0);
  if (model.alpha > 0.0) {
    FeatureVector shared(dim, 0.0);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const FeatureVector h = detail::random_unit(
          detail::pose_key(model.seed, detail::kViewTag, pose.cell + Cell{dx, dy}, pose.orient), model.dim);
        for (std::size_t i = 0; i < dim; ++i) shared[i] += h[i];
      }
    }
    normalize(shared);
    for (std::size_t i = 0; i < dim; ++i) out[i] = (1.0 - model.alpha) * own[i] + model.alpha * shared[i];
  } else {
    out = std::move(own);
  }
  normalize(out);
  if (rng != nullptr && model.query_noise > 0.0) {
    const double sigma = model.query_noise / std::sqrt(static_cast<double>(model.dim));
    for (double & x : out) x += sigma * rng->normal();
    normalize(out);
  }
  return out;
}

struct MemorySlot
{
  FeatureVector key;
  Cell coords;
  Orientation orient = Orientation::North;
  Action action = Action::Stop;
};

class MemoryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Append-only key-value store written during exploration. Besides the slots
/// it records which feature model produced the keys, the map it was built
/// on, and the exploration start pose so the walk can be replayed as a
/// graph.
struct SpatialMemory
{
  std::vector<MemorySlot> slots;
  std::uint64_t model_seed = 0;
  int dim = 64;
  double alpha = 0.3;
  std::uint64_t map_fingerprint = 0;
  Pose origin;

  bool empty() const noexcept { return slots.empty(); }
  std::size_t size() const noexcept { return slots.size(); }

  /// Exploration start followed by every post-action pose.
  std::vector<Pose> trajectory() const
  {
    std::vector<Pose> out;
    out.reserve(slots.size() + 1);
    out.push_back(origin);
    for (const MemorySlot & s : slots) out.push_back({s.coords, s.orient});
    return out;
  }

  std::set<Cell> visited_cells() const
  {
    std::set<Cell> out{origin.cell};
    for (const MemorySlot & s : slots) out.insert(s.coords);
    return out;
  }
};

struct TrajectoryStep
{
  Pose pose;  // pose after the action
  Action action = Action::Stop;
};

struct Exploration
{
  SpatialMemory memory;
  std::vector<TrajectoryStep> trajectory;
};

/// Random walk over the four motion actions; one memory slot per step,
/// keyed by the post-action view.
inline Exploration explore(const GridMap & map, const PoseFeatureModel & model, Pose start, int budget, Rng & rng)
{
  if (budget < 1) throw std::invalid_argument("exploration budget must be at least 1");
  if (!map.is_free(start.cell)) throw std::invalid_argument("exploration start is not a free cell");
  Exploration out;
  out.memory.model_seed = model.seed;
  out.memory.dim = model.dim;
  out.memory.alpha = model.alpha;
  out.memory.map_fingerprint = map.fingerprint();
  out.memory.origin = start;
  out.memory.slots.reserve(static_cast<std::size_t>(budget));
  out.trajectory.reserve(static_cast<std::size_t>(budget));
  Pose pose = start;
  for (int step = 0; step < budget; ++step) {
    const Action action = kMotionActions[rng.below(kMotionActions.size())];
    pose = apply_action(map, pose, action);
    out.memory.slots.push_back({feature_of(model, pose), pose.cell, pose.orient, action});
    out.trajectory.push_back({pose, action});
  }
  return out;
}

struct LocalizeOptions
{
  int top_k = 3;
  bool similarity_weighted = false;
};

struct Localization
{
  Point coords;
  double confidence = 0.0;  // cosine similarity of the best slot
  std::size_t best_slot = 0;
};

/// Retrieval-based self-localization: average the coordinates of the top-k
/// slots by cosine similarity (ties to the lower slot index).
inline Localization localize(const SpatialMemory & memory, const FeatureVector & query,
                             const LocalizeOptions & options = {})
{
  if (memory.empty()) throw MemoryError("localize on an empty spatial memory");
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.top_k, 1)),
                                              memory.size());
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(memory.size());
  for (std::size_t i = 0; i < memory.size(); ++i) {
    scored.emplace_back(cosine_similarity(memory.slots[i].key, query), i);
  }
  auto better = [](const auto & a, const auto & b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);

  Localization out;
  out.best_slot = scored.front().second;
  out.confidence = scored.front().first;
  double wsum = 0.0;
  if (options.similarity_weighted) {
    for (std::size_t i = 0; i < k; ++i) wsum += std::max(scored[i].first, 0.0);
  }
  const bool weighted = options.similarity_weighted && wsum > 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Cell c = memory.slots[scored[i].second].coords;
    const double w = weighted ? std::max(scored[i].first, 0.0) / wsum : 1.0 / static_cast<double>(k);
    out.coords.x += w * c.x;
    out.coords.y += w * c.y;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence. Two encodings of the same schema: a header (version, dim,
// count, model seed, alpha, map fingerprint, origin) followed by the slots
// in order.

enum class MemoryFormat { Text, Binary };

inline constexpr std::uint32_t kMemoryFormatVersion = 1;

inline void write_memory_text(std::ostream & out, const SpatialMemory & m)
{
  char buf[64];
  out << "avnav-memory " << kMemoryFormatVersion << "\n";
  out << "dim " << m.dim << "\n";
  out << "count " << m.size() << "\n";
  out << "model_seed " << m.model_seed << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", m.alpha);
  out << "alpha " << buf << "\n";
  out << "map " << m.map_fingerprint << "\n";
  out << "origin " << m.origin.cell.x << ' ' << m.origin.cell.y << ' ' << orientation_letter(m.origin.orient) << "\n";
  for (const MemorySlot & s : m.slots) {
    out << "slot " << s.coords.x << ' ' << s.coords.y << ' ' << orientation_letter(s.orient) << ' '
        << action_name(s.action);
    for (const double x : s.key) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << ' ' << buf;
    }
    out << "\n";
  }
}

inline SpatialMemory read_memory_text(std::istream & in)
{
  auto expect = [&](const std::string & word) {
    std::string got;
    if (!(in >> got) || got != word) throw MemoryError("memory file: expected '" + word + "'");
  };
  auto orient = [&]() {
    std::string s;
    in >> s;
    const auto o = parse_orientation(s);
    if (!o) throw MemoryError("memory file: bad orientation '" + s + "'");
    return *o;
  };
  SpatialMemory m;
  std::uint32_t version = 0;
  std::size_t count = 0;
  expect("avnav-memory");
  in >> version;
  if (version != kMemoryFormatVersion) throw MemoryError("memory file: unsupported version");
  expect("dim");
  in >> m.dim;
  expect("count");
  in >> count;
  expect("model_seed");
  in >> m.model_seed;
  expect("alpha");
  in >> m.alpha;
  expect("map");
  in >> m.map_fingerprint;
  expect("origin");
  in >> m.origin.cell.x >> m.origin.cell.y;
  m.origin.orient = orient();
  if (!in || m.dim < 1) throw MemoryError("memory file: malformed header");
  m.slots.resize(count);
  for (MemorySlot & s : m.slots) {
    expect("slot");
    in >> s.coords.x >> s.coords.y;
    s.orient = orient();
    std::string act;
    in >> act;
    const auto a = parse_action(act);
    if (!a) throw MemoryError("memory file: bad action '" + act + "'");
    s.action = *a;
    s.key.resize(static_cast<std::size_t>(m.dim));
    for (double & x : s.key) in >> x;
    if (!in) throw MemoryError("memory file: truncated slot");
  }
  return m;
}

namespace detail
{
template <typename T>
void put_le(std::ostream & out, T value)
{
  std::array<unsigned char, sizeof(T)> bytes{};
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    bits = std::bit_cast<std::uint64_t>(static_cast<double>(value));
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

template <typename T>
T get_le(std::istream & in)
{
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw MemoryError("memory file: truncated binary data");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}
}  // namespace detail

inline constexpr char kMemoryMagic[4] = {'A', 'V', 'N', 'M'};

inline void write_memory_binary(std::ostream & out, const SpatialMemory & m)
{
  out.write(kMemoryMagic, 4);
  detail::put_le<std::uint32_t>(out, kMemoryFormatVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.size()));
  detail::put_le<std::uint64_t>(out, m.model_seed);
  detail::put_le<double>(out, m.alpha);
  detail::put_le<std::uint64_t>(out, m.map_fingerprint);
  detail::put_le<std::int32_t>(out, m.origin.cell.x);
  detail::put_le<std::int32_t>(out, m.origin.cell.y);
  detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(m.origin.orient));
  for (const MemorySlot & s : m.slots) {
    detail::put_le<std::int32_t>(out, s.coords.x);
    detail::put_le<std::int32_t>(out, s.coords.y);
    detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(s.orient));
    detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(s.action));
    for (const double x : s.key) detail::put_le<double>(out, x);
  }
}

inline SpatialMemory read_memory_binary(std::istream & in)
{
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMemoryMagic, 4) != 0) throw MemoryError("memory file: bad magic");
  if (detail::get_le<std::uint32_t>(in) != kMemoryFormatVersion) throw MemoryError("memory file: unsupported version");
  SpatialMemory m;
  m.dim = static_cast<int>(detail::get_le<std::uint32_t>(in));
  const std::uint32_t count = detail::get_le<std::uint32_t>(in);
  m.model_seed = detail::get_le<std::uint64_t>(in);
  m.alpha = detail::get_le<double>(in);
  m.map_fingerprint = detail::get_le<std::uint64_t>(in);
  m.origin.cell.x = detail::get_le<std::int32_t>(in);
  m.origin.cell.y = detail::get_le<std::int32_t>(in);
  const auto origin_orient = detail::get_le<std::uint8_t>(in);
  if (origin_orient > 3) throw MemoryError("memory file: bad orientation");
  m.origin.orient = static_cast<Orientation>(origin_orient);
  m.slots.resize(count);
  for (MemorySlot & s : m.slots) {
    s.coords.x = detail::get_le<std::int32_t>(in);
    s.coords.y = detail::get_le<std::int32_t>(in);
    const auto o = detail::get_le<std::uint8_t>(in);
    const auto a = detail::get_le<std::uint8_t>(in);
    if (o > 3 || a > 4) throw MemoryError("memory file: bad slot metadata");
    s.orient = static_cast<Orientation>(o);
    s.action = static_cast<Action>(a);
    s.key.resize(static_cast<std::size_t>(m.dim));
    for (double & x : s.key) x = detail::get_le<double>(in);
  }
  return m;
}

inline void save_memory(const std::string & path, const SpatialMemory & m, MemoryFormat format)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MemoryError("cannot write memory file: " + path);
  if (format == MemoryFormat::Binary) {
    write_memory_binary(out, m);
  } else {
    write_memory_text(out, m);
  }
  if (!out) throw MemoryError("failed writing memory file: " + path);
}

/// Detects the encoding from the leading magic.
inline SpatialMemory load_memory(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MemoryError("cannot open memory file: " + path);
  char head[4] = {};
  in.read(head, 4);
  in.clear();
  in.seekg(0);
  if (std::memcmp(head, kMemoryMagic, 4) == 0) return read_memory_binary(in);
  return read_memory_text(in);
}

}  // namespace avnav

#endif  // AVNAV_VISMEM_HPP_
