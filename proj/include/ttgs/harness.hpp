#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ttgs/dataset.hpp"
#include "ttgs/distance.hpp"
#include "ttgs/graph.hpp"
#include "ttgs/planner.hpp"
#include "ttgs/simenv.hpp"
#include "ttgs/types.hpp"

namespace ttgs {

// Flat run configuration. Loaded from a flat JSON object; every field can be
// overridden on the command line by a flag of the same name (--tau 12).
struct RunConfig {
  // Environment / data.
  std::string maze = "giant";     // medium | large | giant | random
  Index maze_width = 45;          // random mazes only (odd, >= 5)
  Index maze_height = 45;
  std::uint64_t maze_seed = 1;
  std::string dataset;            // path; empty -> generate from the maze
  std::string regime = "stitch";  // navigate | stitch | explore
  Index transitions = 200000;
  std::uint64_t data_seed = 1;

  // Distance predictor.
  std::string convention = "penalty";  // sparse|penalty|quasimetric|euclidean
  Scalar gamma = 0.99;
  Scalar epsilon_clip = kDefaultEpsilonClip;
  Scalar value_noise = 0.0;            // oracle noise eta in [0, 1)
  std::uint64_t value_noise_seed = 0;
  Index slice_begin = 0;               // euclidean position slice
  Index slice_len = 2;

  // Vertex sampling.
  std::string sampling = "uniform";    // uniform | filter_cluster
  Index m = 4000;
  std::uint64_t sample_seed = 7;
  Index presample = 0;                 // filter_cluster: 0 = filter all states
  Index filter_h = 10;
  Scalar filter_eps = 0.005;
  Scalar cluster_radius = 0.0;         // 0 -> filter_h / 2
  Index cluster_batch = 256;

  // Graph.
  Scalar tau = 24.0;
  Index batch_size = 1024;
  std::string graph_cache;             // path override; empty -> automatic

  // Planner.
  Scalar budget_t = 48.0;              // subgoal budget T
  Index max_steps = 300;
  Index window = 0;                    // 0 = scan the whole guide each step

  // Synthetic policy reliability.
  Scalar r_near = 0.97;
  Scalar r_far = 0.25;
  Scalar d_reliable = 12.0;
  Scalar d_max = 60.0;

  // Evaluation protocol.
  Index tasks = 5;
  Index rollouts = 50;
  Index seeds = 8;
  std::uint64_t master_seed = 17;
  Index bootstrap_samples = 10000;

  // Sweep / viz / output.
  std::string sweep_cells = "12:24 24:24 24:48 24:96 48:96";  // tau:T[:m]
  std::string viz_start;               // "x,y"; empty -> task 0
  std::string viz_goal;
  std::string out_dir = "out";
  Index workers = 0;                   // 0 = hardware; TTGS_WORKERS caps it
};

// One configuration field: name, getter, setter (parses the string form).
struct ConfigField {
  std::string name;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<ConfigField>& config_fields();

RunConfig load_config(const std::filesystem::path& path);
void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value);
void validate_config(const RunConfig& config);

// Number of worker threads to use: config.workers (0 = hardware
// concurrency), capped by the TTGS_WORKERS environment variable.
int resolve_workers(const RunConfig& config);

// Everything assembled from a config: maze, oracle, dataset, predictor.
// Heap members keep addresses stable for the callables that point at them.
struct Experiment {
  std::unique_ptr<MazeGrid> maze;
  std::unique_ptr<OracleDistance> oracle;
  std::unique_ptr<TrajectoryDataset> dataset;
  std::optional<DistancePredictor> predictor;
  ReliabilityProfile profile;
  std::vector<std::pair<Cell, Cell>> task_pairs;
};

Experiment build_experiment(const RunConfig& config);

// Vertex selection for the graph, honoring config.sampling.
VertexSet select_vertices(const Experiment& exp, const RunConfig& config);

struct BuildResult {
  PlanningGraph graph;
  std::filesystem::path cache_path;
  bool loaded_from_cache = false;
  double seconds = 0.0;
  std::uint64_t clipped_queries = 0;
};

// Builds the penalized planning graph, or loads it from the cache when a
// file keyed by (dataset hash, sampling config, predictor fingerprint, tau)
// already exists. An explicit config.graph_cache path is validated against
// the current predictor before it is trusted.
BuildResult build_or_load_graph(const Experiment& exp, const RunConfig& config);

struct ResultRow {
  std::string condition;  // "base" or "ttgs"
  Scalar tau = 0.0;
  Scalar budget_t = 0.0;
  Index m = 0;
  std::string task;       // "0".."4" or "all"
  Scalar mean = 0.0;      // success percent over seeds
  Scalar sd = 0.0;        // sample standard deviation over seeds
  std::string status = "ok";
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::string to_csv() const;
};

// Success percents per (task, seed) for one condition.
using TaskSeedMatrix = RowMatrix;

struct EvalArtifacts {
  ResultTable table;
  TaskSeedMatrix base;   // tasks x seeds
  TaskSeedMatrix ttgs;
  Scalar base_mean = 0.0;
  Scalar ttgs_mean = 0.0;
  Scalar p_value = 1.0;  // paired bootstrap, H1: ttgs > base
  std::string records_jsonl;
};

// One-sided paired bootstrap over the (task, seed) cells: p is the
// bootstrap probability that the mean paired difference (ttgs - base) is
// <= 0, with the usual +1 smoothing.
Scalar paired_bootstrap_p(const TaskSeedMatrix& base, const TaskSeedMatrix& ttgs,
                          Index n_samples, std::uint64_t seed);

// Policy-only rollout: the subgoal is the final goal at every step.
EpisodeRecord one_shot_episode(EnvHandle& env, const PolicyFn& policy,
                               ConstRef<StateVector> start,
                               ConstRef<StateVector> goal, Index max_steps);

// Success-over-distance profile of the bare policy: for each n, sample
// start/goal pairs at exact oracle distance n and roll out with step budget
// floor(budget_factor * n).
struct OneShotPoint {
  int n = 0;
  Index pairs_available = 0;
  std::vector<std::uint8_t> outcomes;  // one per rollout
  Scalar success_rate = 0.0;
};

std::vector<OneShotPoint> one_shot_distance_curve(
    const MazeGrid& maze, const OracleDistance& oracle,
    const ReliabilityProfile& profile, const std::vector<int>& distances,
    Index rollouts, Scalar budget_factor, std::uint64_t master_seed);

// Subcommands. Each writes its artifacts under config.out_dir and also
// returns them so tests can inspect without re-reading files.
BuildResult cmd_build_graph(const RunConfig& config);
EvalArtifacts cmd_eval(const RunConfig& config);
ResultTable cmd_sweep(const RunConfig& config);
std::string cmd_viz(const RunConfig& config);

// Full command-line entry point (exit code 0 = success, 1 = internal error,
// 2 = configuration/precondition error).
int run_cli(int argc, const char* const* argv);

}  // namespace ttgs
