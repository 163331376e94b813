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

#ifndef AVNAV_HARNESS_HPP_
#define AVNAV_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "avnav/agent.hpp"
#include "avnav/gridworld.hpp"
#include "avnav/rng.hpp"
#include "avnav/vismem.hpp"

namespace avnav
{

inline constexpr std::string_view kCodeVersion = "avnav 0.1.0";

// ---------------------------------------------------------------------------
// Metrics

struct SplTerm
{
  bool success = false;
  double path = 0.0;      // p_i
  double shortest = 0.0;  // l_i
};

class MetricsError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Success weighted by path length: mean of S_i * l_i / max(p_i, l_i).
/// A zero-length optimum contributes S_i.
inline double spl(std::span<const SplTerm> terms)
{
  if (terms.empty()) throw MetricsError("spl of an empty result set");
  double sum = 0.0;
  for (const SplTerm & t : terms) {
    if (!t.success) continue;
    sum += t.shortest <= 0.0 ? 1.0 : t.shortest / std::max(t.path, t.shortest);
  }
  return sum / static_cast<double>(terms.size());
}

inline double success_rate(std::span<const SplTerm> terms)
{
  if (terms.empty()) throw MetricsError("success rate of an empty result set");
  std::size_t n = 0;
  for (const SplTerm & t : terms) n += t.success ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(terms.size());
}

// ---------------------------------------------------------------------------
// Episode generation

class InsufficientCandidates : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using WarningSink = std::function<void(const std::string &)>;

inline void warn_to_stderr(const std::string & msg) { std::cerr << "warning: " << msg << '\n'; }

namespace detail
{
/// Draws k distinct elements (partial Fisher-Yates), in draw order.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k, Rng & rng)
{
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}
}  // namespace detail

/// n_sources sources without replacement; per source n_starts distinct
/// (cell, orientation) starts from the spawn candidates other than the
/// source, drawn first from cells outside `exclude`.
inline std::vector<EpisodeConfig> gen_episodes(const GridMap & map, int n_sources, int n_starts, std::uint64_t seed,
                                               const std::set<Cell> * exclude = nullptr, int max_steps = 200,
                                               const WarningSink & warn = warn_to_stderr)
{
  if (n_sources < 1 || n_starts < 1) throw std::invalid_argument("n_sources and n_starts must be positive");
  if (static_cast<std::size_t>(n_sources) > map.source_candidates().size()) {
    throw InsufficientCandidates("map " + map.name() + " has " + std::to_string(map.source_candidates().size()) +
                                 " source candidates, " + std::to_string(n_sources) + " requested");
  }
  Rng rng(derive_seed(seed, {fnv1a("episodes")}));
  const std::vector<Cell> sources =
    detail::sample_without_replacement(map.source_candidates(), static_cast<std::size_t>(n_sources), rng);

  std::vector<EpisodeConfig> out;
  bool warned = false;
  for (const Cell source : sources) {
    std::vector<Pose> preferred;
    std::vector<Pose> fallback;
    for (const Cell c : map.spawn_candidates()) {
      if (c == source) continue;
      auto & bucket = (exclude != nullptr && exclude->contains(c)) ? fallback : preferred;
      for (const Orientation o : kOrientations) bucket.push_back({c, o});
    }
    if (preferred.size() + fallback.size() < static_cast<std::size_t>(n_starts)) {
      throw InsufficientCandidates("map " + map.name() + " has too few spawn poses for " + std::to_string(n_starts) +
                                   " starts");
    }
    if (preferred.empty() && exclude != nullptr && !warned && warn) {
      warn("exploration covered every spawn cell of " + map.name() + "; start/explored overlap rule dropped");
      warned = true;
    }
    std::vector<Pose> starts = detail::sample_without_replacement(preferred, static_cast<std::size_t>(n_starts), rng);
    if (starts.size() < static_cast<std::size_t>(n_starts)) {
      const auto extra = detail::sample_without_replacement(fallback, static_cast<std::size_t>(n_starts) - starts.size(), rng);
      starts.insert(starts.end(), extra.begin(), extra.end());
    }
    for (const Pose start : starts) {
      EpisodeConfig cfg;
      cfg.map_id = map.name();
      cfg.source = source;
      cfg.start = start;
      cfg.max_steps = max_steps;
      cfg.seed = derive_seed(seed, {fnv1a("episode"), static_cast<std::uint64_t>(out.size())});
      out.push_back(std::move(cfg));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

/// A benchmark run. Built from a flat `key = value` file; see
/// configs/default.cfg for the documented keys.
struct BenchmarkSpec
{
  std::vector<std::string> maps;
  std::vector<AgentKind> agents{kAllAgents.begin(), kAllAgents.end()};
  std::vector<std::string> sounds{"ring"};
  int n_starts = 20;
  int n_sources = 5;
  std::uint64_t seed = 1;
  int explore_budget = 400;
  int max_steps = 200;
  int feature_dim = 64;
  double alpha = 0.3;
  AgentParams params;

  // Explicit acoustic overrides; unset values come from the sound preset.
  std::optional<double> sigma0;
  std::optional<double> k;
  std::optional<double> nlos_penalty;

  /// Every key=value pair as read, for the results header.
  std::map<std::string, std::string> echo;

  AgentParams params_for(const std::string & sound) const
  {
    AgentParams p = params;
    const auto preset = sound_preset(sound);
    if (!preset) throw ConfigError("unknown sound preset: " + sound);
    p.acoustic.sigma0 = sigma0.value_or(preset->sigma0);
    p.acoustic.k = k.value_or(preset->k);
    p.acoustic.nlos_penalty = nlos_penalty.value_or(preset->nlos_penalty);
    return p;
  }

  void validate() const
  {
    if (maps.empty()) throw ConfigError("config lists no maps");
    if (agents.empty()) throw ConfigError("config lists no agents");
    if (sounds.empty()) throw ConfigError("config lists no sounds");
    if (n_starts < 1) throw ConfigError("n_starts must be at least 1");
    if (n_sources < 1) throw ConfigError("n_sources must be at least 1");
    if (explore_budget < 1) throw ConfigError("explore_budget must be at least 1");
    if (max_steps < 0) throw ConfigError("max_steps must be non-negative");
    if (feature_dim < 1) throw ConfigError("feature_dim must be positive");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
    for (const std::string & s : sounds) {
      try {
        params_for(s).validate();
      } catch (const std::invalid_argument & e) {
        throw ConfigError(e.what());
      }
    }
  }
};

namespace detail
{
inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s)
{
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    if (std::string item = trim(s.substr(pos, end - pos)); !item.empty()) out.push_back(std::move(item));
    pos = end + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string & key, const std::string & value)
{
  T out{};
  const char * first = value.data();
  const char * last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

inline bool parse_bool(const std::string & key, const std::string & value)
{
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + value + "'");
}
}  // namespace detail

/// Parses the flat config format. Relative map paths resolve against
/// `base_dir`. Lines starting with '#' are comments.
inline BenchmarkSpec parse_config(std::string_view text, const std::filesystem::path & base_dir = {})
{
  using detail::parse_number;
  BenchmarkSpec spec;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    spec.echo[key] = value;

    if (key == "maps") {
      spec.maps.clear();
      for (const std::string & m : detail::split_list(value)) {
        const std::filesystem::path p(m);
        spec.maps.push_back((p.is_relative() && !base_dir.empty() ? base_dir / p : p).lexically_normal().string());
      }
    } else if (key == "agents") {
      spec.agents.clear();
      for (const std::string & a : detail::split_list(value)) {
        const auto kind = parse_agent(a);
        if (!kind) throw ConfigError("line " + std::to_string(lineno) + ": unknown agent '" + a + "'");
        spec.agents.push_back(*kind);
      }
    } else if (key == "sounds" || key == "sound") {
      spec.sounds = detail::split_list(value);
    } else if (key == "n_starts") {
      spec.n_starts = parse_number<int>(key, value);
    } else if (key == "n_sources") {
      spec.n_sources = parse_number<int>(key, value);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "explore_budget") {
      spec.explore_budget = parse_number<int>(key, value);
    } else if (key == "max_steps") {
      spec.max_steps = parse_number<int>(key, value);
    } else if (key == "feature_dim") {
      spec.feature_dim = parse_number<int>(key, value);
    } else if (key == "alpha") {
      spec.alpha = parse_number<double>(key, value);
    } else if (key == "sigma_q") {
      spec.params.query_noise = parse_number<double>(key, value);
    } else if (key == "sigma0") {
      spec.sigma0 = parse_number<double>(key, value);
    } else if (key == "k") {
      spec.k = parse_number<double>(key, value);
    } else if (key == "nlos_penalty") {
      spec.nlos_penalty = parse_number<double>(key, value);
    } else if (key == "detector_radius") {
      spec.params.acoustic.detector_radius = parse_number<int>(key, value);
    } else if (key == "detector_miss_rate") {
      spec.params.acoustic.detector_miss_rate = parse_number<double>(key, value);
    } else if (key == "eps_v") {
      spec.params.sensor.flip_prob = parse_number<double>(key, value);
    } else if (key == "p_hit") {
      spec.params.sensor.p_hit = parse_number<double>(key, value);
    } else if (key == "occupancy_N") {
      spec.params.occupancy_size = parse_number<int>(key, value);
    } else if (key == "max_log_odds") {
      spec.params.max_log_odds = parse_number<double>(key, value);
    } else if (key == "theta_free") {
      spec.params.thresholds.free_below = parse_number<double>(key, value);
    } else if (key == "theta_occ") {
      spec.params.thresholds.occupied_above = parse_number<double>(key, value);
    } else if (key == "thresholds") {
      const auto parts = detail::split_list(value);
      if (parts.size() != 2) throw ConfigError("thresholds expects 'theta_free, theta_occ'");
      spec.params.thresholds.free_below = parse_number<double>(key, parts[0]);
      spec.params.thresholds.occupied_above = parse_number<double>(key, parts[1]);
    } else if (key == "confidence_threshold") {
      spec.params.confidence_threshold = parse_number<double>(key, value);
    } else if (key == "localize_top_k") {
      spec.params.localize.top_k = parse_number<int>(key, value);
    } else if (key == "localize_weighted") {
      spec.params.localize.similarity_weighted = detail::parse_bool(key, value);
    } else if (key == "unknown_cost") {
      spec.params.unknown_cost = parse_number<double>(key, value);
    } else if (key == "look_ahead") {
      spec.params.look_ahead = detail::parse_bool(key, value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

inline BenchmarkSpec load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Benchmark execution

struct EpisodeRecord
{
  std::string map;
  AgentKind agent = AgentKind::RandomWalk;
  std::string sound;
  int index = 0;  // episode index within the map
  Cell source;
  Pose start;
  bool success = false;
  int steps = 0;
  int path_length = 0;
  int shortest = 0;
  Termination termination = Termination::StepLimit;
  std::optional<std::string> error;
};

struct Aggregate
{
  std::string map;  // "*" for the mean over maps
  AgentKind agent = AgentKind::RandomWalk;
  std::string sound;
  int episodes = 0;
  double success_rate = 0.0;
  double spl = 0.0;
};

struct BenchResults
{
  nlohmann::ordered_json meta;
  std::vector<EpisodeRecord> episodes;
  std::vector<Aggregate> aggregates;
};

/// Per-(map, agent, sound) aggregates in first-appearance order, followed by
/// the mean over maps for every (agent, sound). Errored episodes count as
/// failures.
inline std::vector<Aggregate> aggregate(std::span<const EpisodeRecord> records)
{
  struct Key
  {
    std::string map;
    AgentKind agent;
    std::string sound;
    bool operator==(const Key &) const = default;
  };
  std::vector<Key> order;
  std::vector<std::vector<SplTerm>> terms;
  for (const EpisodeRecord & r : records) {
    const Key key{r.map, r.agent, r.sound};
    auto it = std::find(order.begin(), order.end(), key);
    if (it == order.end()) {
      order.push_back(key);
      terms.emplace_back();
      it = order.end() - 1;
    }
    terms[static_cast<std::size_t>(it - order.begin())].push_back(
      {r.success && !r.error, static_cast<double>(r.path_length), static_cast<double>(r.shortest)});
  }
  std::vector<Aggregate> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.push_back({order[i].map, order[i].agent, order[i].sound, static_cast<int>(terms[i].size()),
                   success_rate(terms[i]), spl(terms[i])});
  }
  std::vector<std::pair<AgentKind, std::string>> overall;
  for (const Aggregate & a : std::vector<Aggregate>(out)) {
    const auto key = std::make_pair(a.agent, a.sound);
    if (std::find(overall.begin(), overall.end(), key) != overall.end()) continue;
    overall.push_back(key);
    Aggregate mean{"*", a.agent, a.sound, 0, 0.0, 0.0};
    int maps = 0;
    for (const Aggregate & b : out) {
      if (b.agent != a.agent || b.sound != a.sound) continue;
      mean.episodes += b.episodes;
      mean.success_rate += b.success_rate;
      mean.spl += b.spl;
      ++maps;
    }
    mean.success_rate /= maps;
    mean.spl /= maps;
    out.push_back(mean);
  }
  return out;
}

struct BenchOptions
{
  int workers = 1;
  std::optional<std::filesystem::path> trajectory_dir;
  WarningSink warn = warn_to_stderr;
};

struct PreparedMap
{
  GridMap map;
  SpatialMemory memory;
  std::vector<EpisodeConfig> episodes;
};

/// The exploration run for the map at `map_index` under master seed `seed`:
/// feature model and walk both derive from them, the walk starting at a
/// random spawn cell and heading.
inline Exploration seeded_exploration(const GridMap & map, std::uint64_t seed, std::size_t map_index, int budget,
                                      int feature_dim = 64, double alpha = 0.3, double query_noise = 0.1)
{
  const PoseFeatureModel model{derive_seed(seed, {fnv1a("features"), map_index}), feature_dim, alpha, query_noise};
  model.validate();
  Rng rng(derive_seed(seed, {fnv1a("explore"), map_index}));
  const auto & spawns = map.spawn_candidates();
  const Pose start{spawns[rng.below(spawns.size())], kOrientations[rng.below(4)]};
  return explore(map, model, start, budget, rng);
}

/// Loads a map, runs its one exploration and draws its episodes.
inline PreparedMap prepare_map(const BenchmarkSpec & spec, std::size_t map_index, const WarningSink & warn)
{
  PreparedMap out{load_map_file(spec.maps[map_index]), {}, {}};
  out.memory = seeded_exploration(out.map, spec.seed, map_index, spec.explore_budget, spec.feature_dim, spec.alpha,
                                  spec.params.query_noise)
                 .memory;
  const std::set<Cell> visited = out.memory.visited_cells();
  out.episodes = gen_episodes(out.map, spec.n_sources, spec.n_starts,
                              derive_seed(spec.seed, {fnv1a("episodes"), map_index}), &visited, spec.max_steps, warn);
  return out;
}

inline BenchResults run_bench(const BenchmarkSpec & spec, const BenchOptions & options = {})
{
  spec.validate();
  std::vector<PreparedMap> prepared;
  prepared.reserve(spec.maps.size());
  for (std::size_t i = 0; i < spec.maps.size(); ++i) prepared.push_back(prepare_map(spec, i, options.warn));

  struct Job
  {
    std::size_t map;
    std::size_t episode;
    AgentKind agent;
    std::string sound;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < prepared.size(); ++m) {
    for (const std::string & sound : spec.sounds) {
      for (const AgentKind agent : spec.agents) {
        for (std::size_t e = 0; e < prepared[m].episodes.size(); ++e) jobs.push_back({m, e, agent, sound});
      }
    }
  }
  std::map<std::string, AgentParams> params;
  for (const std::string & s : spec.sounds) params.emplace(s, spec.params_for(s));
  if (options.trajectory_dir) std::filesystem::create_directories(*options.trajectory_dir);

  std::vector<EpisodeRecord> records(jobs.size());
  auto run_job = [&](std::size_t j) {
    const Job & job = jobs[j];
    const PreparedMap & pm = prepared[job.map];
    const EpisodeConfig & cfg = pm.episodes[job.episode];
    EpisodeRecord & rec = records[j];
    rec.map = pm.map.name();
    rec.agent = job.agent;
    rec.sound = job.sound;
    rec.index = static_cast<int>(job.episode);
    rec.source = cfg.source;
    rec.start = cfg.start;
    try {
      rec.shortest = shortest_path_cells(pm.map, cfg.start.cell, cfg.source).value();
      const EpisodeResult r = run_episode(pm.map, cfg, job.agent, params.at(job.sound), &pm.memory);
      rec.success = r.success;
      rec.steps = r.steps_taken;
      rec.path_length = r.path_length_cells;
      rec.termination = r.termination;
      if (options.trajectory_dir) {
        std::ofstream out(*options.trajectory_dir / (rec.map + "_" + std::string(agent_name(job.agent)) + "_" +
                                                     job.sound + "_" + std::to_string(job.episode) + ".traj"));
        write_trajectory(out, r);
      }
    } catch (const std::exception & e) {
      rec.success = false;
      rec.error = e.what();
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) run_job(j);
      });
    }
    for (std::thread & t : pool) t.join();
  }

  BenchResults out;
  out.meta["format"] = "avnav-results";
  out.meta["version"] = 1;
  out.meta["code_version"] = kCodeVersion;
  out.meta["seed"] = spec.seed;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto & [k, v] : spec.echo) config[k] = v;
  out.meta["config"] = config;
  out.episodes = std::move(records);
  out.aggregates = aggregate(out.episodes);
  return out;
}

// ---------------------------------------------------------------------------
// Results file

inline nlohmann::ordered_json to_json(const BenchResults & r)
{
  using json = nlohmann::ordered_json;
  json doc;
  doc["meta"] = r.meta;
  json eps = json::array();
  for (const EpisodeRecord & e : r.episodes) {
    json j;
    j["map"] = e.map;
    j["agent"] = agent_name(e.agent);
    j["sound"] = e.sound;
    j["index"] = e.index;
    j["source"] = {e.source.x, e.source.y};
    j["start"] = {e.start.cell.x, e.start.cell.y, std::string(1, orientation_letter(e.start.orient))};
    j["success"] = e.success;
    j["steps"] = e.steps;
    j["path_length"] = e.path_length;
    j["shortest"] = e.shortest;
    j["termination"] = termination_name(e.termination);
    j["status"] = e.error ? "error" : "ok";
    if (e.error) j["error"] = *e.error;
    eps.push_back(std::move(j));
  }
  doc["episodes"] = std::move(eps);
  json aggs = json::array();
  for (const Aggregate & a : r.aggregates) {
    aggs.push_back({{"map", a.map},
                    {"agent", agent_name(a.agent)},
                    {"sound", a.sound},
                    {"episodes", a.episodes},
                    {"success_rate", a.success_rate},
                    {"spl", a.spl}});
  }
  doc["aggregates"] = std::move(aggs);
  return doc;
}

inline std::string results_text(const BenchResults & r) { return to_json(r).dump(2) + "\n"; }

inline void save_results(const std::string & path, const BenchResults & r)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write results file: " + path);
  out << results_text(r);
}

struct LoadedResults
{
  BenchResults results;  // aggregates recomputed from the episode records
  bool consistent = false;  // stored aggregates match the recomputation
};

inline LoadedResults parse_results(std::string_view text)
{
  using json = nlohmann::ordered_json;
  const json doc = json::parse(text);
  LoadedResults out;
  out.results.meta = doc.at("meta");
  for (const json & j : doc.at("episodes")) {
    EpisodeRecord e;
    e.map = j.at("map").get<std::string>();
    e.agent = parse_agent(j.at("agent").get<std::string>()).value();
    e.sound = j.at("sound").get<std::string>();
    e.index = j.at("index").get<int>();
    e.source = {j.at("source").at(0).get<int>(), j.at("source").at(1).get<int>()};
    e.start = {{j.at("start").at(0).get<int>(), j.at("start").at(1).get<int>()},
               parse_orientation(j.at("start").at(2).get<std::string>()).value()};
    e.success = j.at("success").get<bool>();
    e.steps = j.at("steps").get<int>();
    e.path_length = j.at("path_length").get<int>();
    e.shortest = j.at("shortest").get<int>();
    e.termination = j.at("termination").get<std::string>() == "Stopped" ? Termination::Stopped : Termination::StepLimit;
    if (j.contains("error")) e.error = j.at("error").get<std::string>();
    out.results.episodes.push_back(std::move(e));
  }
  out.results.aggregates = aggregate(out.results.episodes);
  const json & stored = doc.at("aggregates");
  out.consistent = stored.size() == out.results.aggregates.size();
  for (std::size_t i = 0; out.consistent && i < stored.size(); ++i) {
    const Aggregate & a = out.results.aggregates[i];
    out.consistent = stored[i].at("map") == a.map && stored[i].at("agent") == agent_name(a.agent) &&
                     stored[i].at("sound") == a.sound && stored[i].at("episodes") == a.episodes &&
                     std::abs(stored[i].at("success_rate").get<double>() - a.success_rate) < 1e-12 &&
                     std::abs(stored[i].at("spl").get<double>() - a.spl) < 1e-12;
  }
  return out;
}

inline LoadedResults load_results(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_results(buf.str());
}

inline const Aggregate * find_aggregate(std::span<const Aggregate> aggs, std::string_view map, AgentKind agent,
                                        std::string_view sound)
{
  for (const Aggregate & a : aggs) {
    if (a.map == map && a.agent == agent && a.sound == sound) return &a;
  }
  return nullptr;
}

}  // namespace avnav

#endif  // AVNAV_HARNESS_HPP_
