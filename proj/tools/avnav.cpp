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

// avnav command line: benchmark runs, single episodes, exploration and
// debug dumps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avnav/avnav.hpp"

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

using namespace avnav;

Cell parse_cell(const std::string & text)
{
  int x = 0;
  int y = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> x >> comma >> y) || comma != ',' || !in.eof()) {
    throw ConfigError("expected x,y but got '" + text + "'");
  }
  return {x, y};
}

Pose parse_pose(const std::string & text)
{
  const auto last = text.rfind(',');
  if (last == std::string::npos) throw ConfigError("expected x,y,ORIENT but got '" + text + "'");
  const auto orient = parse_orientation(text.substr(last + 1));
  if (!orient) throw ConfigError("unknown orientation in '" + text + "'");
  return {parse_cell(text.substr(0, last)), *orient};
}

AgentKind parse_agent_or_throw(const std::string & text)
{
  const auto kind = parse_agent(text);
  if (!kind) throw ConfigError("unknown agent '" + text + "'");
  return *kind;
}

std::ostream & open_out(const std::string & path, std::ofstream & file)
{
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + path);
  return file;
}

void print_aggregates(const BenchResults & r)
{
  std::printf("%-10s %-14s %-6s %8s %8s %8s\n", "map", "agent", "sound", "episodes", "success", "spl");
  for (const Aggregate & a : r.aggregates) {
    std::printf("%-10s %-14s %-6s %8d %8.3f %8.3f\n", a.map.c_str(), std::string(agent_name(a.agent)).c_str(),
                a.sound.c_str(), a.episodes, a.success_rate, a.spl);
  }
}

struct BenchArgs
{
  std::string config;
  std::vector<std::string> agents;
  std::string out;
  std::string traj_dir;
  int workers = 1;
};

int cmd_bench(const BenchArgs & args)
{
  BenchmarkSpec spec = load_config(args.config);
  if (!args.agents.empty()) {
    spec.agents.clear();
    for (const std::string & a : args.agents) spec.agents.push_back(parse_agent_or_throw(a));
  }
  BenchOptions options;
  options.workers = args.workers;
  if (!args.traj_dir.empty()) options.trajectory_dir = args.traj_dir;
  const BenchResults results = run_bench(spec, options);
  if (!args.out.empty()) save_results(args.out, results);
  print_aggregates(results);
  int errors = 0;
  for (const EpisodeRecord & e : results.episodes) {
    if (!e.error) continue;
    ++errors;
    std::cerr << "episode error: " << e.map << " " << agent_name(e.agent) << " #" << e.index << ": " << *e.error
              << '\n';
  }
  return errors == 0 ? kExitOk : kExitRuntime;
}

struct RunArgs
{
  std::string map;
  std::string agent;
  std::string start;
  std::string source;
  std::uint64_t seed = 1;
  std::string memory;
  std::string config;
  std::string traj;
  int max_steps = 200;
  bool verbose = false;
};

AgentParams params_from(const std::string & config)
{
  if (config.empty()) return BenchmarkSpec{}.params_for("ring");
  const BenchmarkSpec spec = load_config(config);
  return spec.params_for(spec.sounds.front());
}

int cmd_run(const RunArgs & args)
{
  const GridMap map = load_map_file(args.map);
  EpisodeConfig cfg;
  cfg.map_id = map.name();
  cfg.start = parse_pose(args.start);
  cfg.source = parse_cell(args.source);
  cfg.seed = args.seed;
  cfg.max_steps = args.max_steps;
  if (!map.is_free(cfg.start.cell) || !map.is_free(cfg.source)) {
    throw ConfigError("start and source must be free cells of " + map.name());
  }
  const AgentKind kind = parse_agent_or_throw(args.agent);
  const AgentParams params = params_from(args.config);

  std::optional<SpatialMemory> memory;
  if (!args.memory.empty()) {
    memory = load_memory(args.memory);
  } else if (kind == AgentKind::OursExplore) {
    memory = seeded_exploration(map, args.seed, 0, 400).memory;
  }

  StepObserver observer;
  if (args.verbose) {
    std::printf("# step x y orient action right front goal bump\n");
    observer = [](int step, Pose pose, const Observation & obs, Action action) {
      std::printf("%d %d %d %c %s %.3f %.3f %d %d\n", step, pose.cell.x, pose.cell.y, orientation_letter(pose.orient),
                  std::string(action_name(action)).c_str(), obs.relative.right, obs.relative.front, obs.goal ? 1 : 0,
                  obs.bumped ? 1 : 0);
    };
  }
  const EpisodeResult r = run_episode(map, cfg, kind, params, memory ? &*memory : nullptr, observer);
  if (!args.traj.empty()) {
    std::ofstream out(args.traj);
    if (!out) throw ConfigError("cannot write " + args.traj);
    write_trajectory(out, r);
  }
  const int shortest = shortest_path_cells(map, cfg.start.cell, cfg.source).value_or(-1);
  std::printf("success=%d steps=%d path_length=%d shortest=%d termination=%s final=%d,%d,%c\n", r.success ? 1 : 0,
              r.steps_taken, r.path_length_cells, shortest, std::string(termination_name(r.termination)).c_str(),
              r.final_pose.cell.x, r.final_pose.cell.y, orientation_letter(r.final_pose.orient));
  return kExitOk;
}

struct ExploreArgs
{
  std::string map;
  std::uint64_t seed = 1;
  int budget = 400;
  std::string out;
  std::string format = "text";
  int dim = 64;
  double alpha = 0.3;
};

int cmd_explore(const ExploreArgs & args)
{
  const GridMap map = load_map_file(args.map);
  if (args.format != "text" && args.format != "binary") throw ConfigError("format must be text or binary");
  if (args.budget < 1) throw ConfigError("budget must be at least 1");
  const Exploration ex = seeded_exploration(map, args.seed, 0, args.budget, args.dim, args.alpha);
  save_memory(args.out, ex.memory, args.format == "text" ? MemoryFormat::Text : MemoryFormat::Binary);
  std::printf("slots=%zu visited_cells=%zu free_cells=%zu\n", ex.memory.size(), ex.memory.visited_cells().size(),
              map.free_count());
  return kExitOk;
}

int cmd_oracle(const std::string & map_path, const std::string & from, const std::string & to)
{
  const GridMap map = load_map_file(map_path);
  const Cell a = parse_cell(from);
  const Cell b = parse_cell(to);
  if (!map.is_free(a) || !map.is_free(b)) throw ConfigError("oracle endpoints must be free cells");
  const auto d = shortest_path_cells(map, a, b);
  if (!d) {
    std::printf("unreachable\n");
    return kExitRuntime;
  }
  std::printf("%d cells %.2f m\n", *d, *d * map.cell_size());
  return kExitOk;
}

struct DumpArgs
{
  std::string map;
  std::string start;
  std::string source;
  std::uint64_t seed = 1;
  int steps = 200;
  std::string memory;
  std::string out;
  std::string config;
};

EpisodeCapture capture_episode(const DumpArgs & args, const GridMap & map, AgentKind kind,
                               const SpatialMemory * memory)
{
  EpisodeConfig cfg;
  cfg.map_id = map.name();
  cfg.start = parse_pose(args.start);
  cfg.source = parse_cell(args.source);
  cfg.seed = args.seed;
  cfg.max_steps = args.steps;
  EpisodeCapture capture;
  run_episode(map, cfg, kind, params_from(args.config), memory, {}, &capture);
  return capture;
}

int cmd_dump_occupancy(const DumpArgs & args)
{
  const GridMap map = load_map_file(args.map);
  if (args.start.empty() || args.source.empty()) throw ConfigError("dump-occupancy needs --start and --source");
  const EpisodeCapture capture = capture_episode(args, map, AgentKind::OursNoExplore, nullptr);
  std::ofstream file;
  dump_beliefs(open_out(args.out, file), *capture.grid);
  return kExitOk;
}

int cmd_dump_graph(const DumpArgs & args)
{
  const GridMap map = load_map_file(args.map);
  NavGraph graph;
  if (!args.memory.empty() && args.start.empty()) {
    const SpatialMemory memory = load_memory(args.memory);
    const std::vector<Pose> traj = memory.trajectory();
    graph = graph_from_trajectory(traj);
  } else if (!args.start.empty()) {
    if (args.source.empty()) throw ConfigError("dump-graph with --start needs --source");
    std::optional<SpatialMemory> memory;
    if (!args.memory.empty()) memory = load_memory(args.memory);
    const AgentKind kind = memory ? AgentKind::OursExplore : AgentKind::OursNoExplore;
    graph = *capture_episode(args, map, kind, memory ? &*memory : nullptr).graph;
  } else {
    graph = graph_from_map(map);
  }
  std::ofstream file;
  dump_graph(open_out(args.out, file), graph);
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"avnav: audio-visual grid navigation benchmark"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto * bench_cmd = app.add_subcommand("bench", "run a benchmark from a config file");
  bench_cmd->add_option("--config", bench.config, "config file")->required();
  bench_cmd->add_option("--agent", bench.agents, "restrict to these agents (repeatable)");
  bench_cmd->add_option("--out", bench.out, "results file");
  bench_cmd->add_option("--traj-dir", bench.traj_dir, "write one trajectory file per episode here");
  bench_cmd->add_option("--workers", bench.workers, "worker threads")->check(CLI::PositiveNumber);

  RunArgs run;
  auto * run_cmd = app.add_subcommand("run", "run one episode");
  run_cmd->add_option("--map", run.map)->required();
  run_cmd->add_option("--agent", run.agent)->required();
  run_cmd->add_option("--start", run.start, "x,y,ORIENT")->required();
  run_cmd->add_option("--source", run.source, "x,y")->required();
  run_cmd->add_option("--seed", run.seed)->required();
  run_cmd->add_option("--memory", run.memory, "spatial memory file (OursExplore)");
  run_cmd->add_option("--config", run.config, "take noise parameters from this config");
  run_cmd->add_option("--max-steps", run.max_steps);
  run_cmd->add_option("--traj", run.traj, "write the trajectory here");
  run_cmd->add_flag("--verbose", run.verbose, "print one line per step");

  ExploreArgs exp;
  auto * explore_cmd = app.add_subcommand("explore", "random-walk exploration into a memory file");
  explore_cmd->add_option("--map", exp.map)->required();
  explore_cmd->add_option("--seed", exp.seed)->required();
  explore_cmd->add_option("--budget", exp.budget);
  explore_cmd->add_option("--out", exp.out)->required();
  explore_cmd->add_option("--format", exp.format, "text or binary");
  explore_cmd->add_option("--dim", exp.dim);
  explore_cmd->add_option("--alpha", exp.alpha);

  std::string oracle_map;
  std::string oracle_from;
  std::string oracle_to;
  auto * oracle_cmd = app.add_subcommand("oracle", "BFS distance between two cells");
  oracle_cmd->add_option("--map", oracle_map)->required();
  oracle_cmd->add_option("--from", oracle_from, "x,y")->required();
  oracle_cmd->add_option("--to", oracle_to, "x,y")->required();

  DumpArgs occ;
  auto * occ_cmd = app.add_subcommand("dump-occupancy", "belief matrix after an OursNoExplore episode");
  occ_cmd->add_option("--map", occ.map)->required();
  occ_cmd->add_option("--start", occ.start, "x,y,ORIENT")->required();
  occ_cmd->add_option("--source", occ.source, "x,y")->required();
  occ_cmd->add_option("--seed", occ.seed);
  occ_cmd->add_option("--steps", occ.steps, "step limit");
  occ_cmd->add_option("--config", occ.config);
  occ_cmd->add_option("--out", occ.out);

  DumpArgs graph;
  auto * graph_cmd = app.add_subcommand("dump-graph", "edge list of a navigation graph");
  graph_cmd->add_option("--map", graph.map)->required();
  graph_cmd->add_option("--memory", graph.memory, "trajectory graph of this memory");
  graph_cmd->add_option("--start", graph.start, "x,y,ORIENT: graph after an episode");
  graph_cmd->add_option("--source", graph.source, "x,y");
  graph_cmd->add_option("--seed", graph.seed);
  graph_cmd->add_option("--steps", graph.steps, "step limit");
  graph_cmd->add_option("--config", graph.config);
  graph_cmd->add_option("--out", graph.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*bench_cmd) return cmd_bench(bench);
    if (*run_cmd) return cmd_run(run);
    if (*explore_cmd) return cmd_explore(exp);
    if (*oracle_cmd) return cmd_oracle(oracle_map, oracle_from, oracle_to);
    if (*occ_cmd) return cmd_dump_occupancy(occ);
    if (*graph_cmd) return cmd_dump_graph(graph);
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MapError & e) {
    std::cerr << "map error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MemoryError & e) {
    std::cerr << "memory error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InsufficientCandidates & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
