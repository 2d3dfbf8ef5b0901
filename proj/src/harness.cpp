#include "ttgs/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "svg.hpp"
#include "ttgs/rng.hpp"

namespace ttgs {

namespace fs = std::filesystem;

namespace {

std::string format_g(Scalar v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_full(Scalar v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_fixed(Scalar v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

long long parse_int(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw InputError("'" + s + "' is not an integer");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& s) {
  if (!s.empty() && s[0] == '-') {
    throw InputError("'" + s + "' is not a non-negative integer");
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw InputError("'" + s + "' is not a non-negative integer");
  }
  return v;
}

Scalar parse_scalar(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw InputError("'" + s + "' is not a number");
  }
  if (!std::isfinite(v)) {
    throw InputError("'" + s + "' is not a finite number");
  }
  return v;
}

std::string field_text(const std::string& v) { return v; }
std::string field_text(Scalar v) { return format_g(v); }
std::string field_text(Index v) { return std::to_string(v); }
std::string field_text(std::uint64_t v) { return std::to_string(v); }

void field_parse(const std::string& s, std::string& out) { out = s; }
void field_parse(const std::string& s, Scalar& out) { out = parse_scalar(s); }
void field_parse(const std::string& s, Index& out) {
  out = static_cast<Index>(parse_int(s));
}
void field_parse(const std::string& s, std::uint64_t& out) {
  out = parse_uint(s);
}

#define TTGS_FIELD(member, help_text)                                       \
  ConfigField {                                                             \
    #member, help_text,                                                     \
        [](const RunConfig& c) { return field_text(c.member); },            \
        [](RunConfig& c, const std::string& s) { field_parse(s, c.member); } \
  }

}  // namespace

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      TTGS_FIELD(maze, "maze preset (medium|large|giant) or 'random'"),
      TTGS_FIELD(maze_width, "random maze width (odd, >= 5)"),
      TTGS_FIELD(maze_height, "random maze height (odd, >= 5)"),
      TTGS_FIELD(maze_seed, "random maze layout seed"),
      TTGS_FIELD(dataset, "load trajectories from this file instead of "
                          "generating them"),
      TTGS_FIELD(regime, "data collection regime (navigate|stitch|explore)"),
      TTGS_FIELD(transitions, "environment steps to collect"),
      TTGS_FIELD(data_seed, "data collection seed"),
      TTGS_FIELD(convention, "value convention "
                             "(sparse|penalty|quasimetric|euclidean)"),
      TTGS_FIELD(gamma, "discount factor, strictly inside (0, 1)"),
      TTGS_FIELD(epsilon_clip, "clamp margin for the value inversions"),
      TTGS_FIELD(value_noise, "oracle value noise eta in [0, 1)"),
      TTGS_FIELD(value_noise_seed, "oracle value noise seed"),
      TTGS_FIELD(slice_begin, "euclidean convention: first position "
                              "coordinate"),
      TTGS_FIELD(slice_len, "euclidean convention: position block length"),
      TTGS_FIELD(sampling, "vertex selection (uniform|filter_cluster)"),
      TTGS_FIELD(m, "number of graph vertices (uniform sampling)"),
      TTGS_FIELD(sample_seed, "vertex sampling seed"),
      TTGS_FIELD(presample, "filter_cluster: uniform pre-sample size, 0 = "
                            "filter every state"),
      TTGS_FIELD(filter_h, "temporal-efficiency lookahead (steps)"),
      TTGS_FIELD(filter_eps, "temporal-efficiency tolerance"),
      TTGS_FIELD(cluster_radius, "greedy clustering radius, 0 = filter_h/2"),
      TTGS_FIELD(cluster_batch, "re-elect cluster centers every this many "
                                "assignments"),
      TTGS_FIELD(tau, "soft horizon: edges beyond tau predicted steps are "
                      "penalized"),
      TTGS_FIELD(batch_size, "pair chunk size for distance-matrix builds"),
      TTGS_FIELD(graph_cache, "explicit graph cache path (default: keyed "
                              "file under out_dir)"),
      TTGS_FIELD(budget_t, "subgoal budget T in predicted steps"),
      TTGS_FIELD(max_steps, "environment step limit per episode"),
      TTGS_FIELD(window, "waypoints scanned per step, 0 = whole guide"),
      TTGS_FIELD(r_near, "policy reliability at short range"),
      TTGS_FIELD(r_far, "policy reliability floor at long range"),
      TTGS_FIELD(d_reliable, "distance up to which reliability stays r_near"),
      TTGS_FIELD(d_max, "distance at which reliability reaches r_far"),
      TTGS_FIELD(tasks, "number of evaluation tasks (0..5)"),
      TTGS_FIELD(rollouts, "episodes per (task, seed)"),
      TTGS_FIELD(seeds, "evaluation seeds per task"),
      TTGS_FIELD(master_seed, "root seed of the evaluation protocol"),
      TTGS_FIELD(bootstrap_samples, "bootstrap resamples for the paired "
                                    "p-value"),
      TTGS_FIELD(sweep_cells, "sweep grid, space-separated tau:T[:m] cells"),
      TTGS_FIELD(viz_start, "viz start cell \"x,y\" (default: task 0)"),
      TTGS_FIELD(viz_goal, "viz goal cell \"x,y\" (default: task 0)"),
      TTGS_FIELD(out_dir, "artifact directory"),
      TTGS_FIELD(workers, "worker threads, 0 = hardware (TTGS_WORKERS caps "
                          "both)"),
  };
  return fields;
}

#undef TTGS_FIELD

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open config file " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw InputError("config file " + path.string() +
                     ": top level must be a JSON object");
  }
  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    const std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    apply_override(config, key, text);
  }
  return config;
}

void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value) {
  for (const ConfigField& field : config_fields()) {
    if (field.name == key) {
      try {
        field.set(config, value);
      } catch (const InputError& e) {
        throw InputError("config field '" + key + "': " + e.what());
      }
      return;
    }
  }
  throw InputError("unknown configuration key '" + key + "'");
}

void validate_config(const RunConfig& c) {
  if (c.maze != "random") {
    maze_preset_from_string(c.maze);
  }
  if (c.dataset.empty()) {
    data_regime_from_string(c.regime);
    if (c.transitions < 1) {
      throw InputError("transitions must be >= 1");
    }
  }
  const RewardConvention conv = reward_convention_from_string(c.convention);
  if (conv == RewardConvention::kSparseTerminal ||
      conv == RewardConvention::kPerStepPenalty) {
    DiscountFactor probe(c.gamma);
    (void)probe;
    if (!(c.epsilon_clip > 0.0) || c.epsilon_clip >= 1.0) {
      throw InputError("epsilon_clip must lie in (0, 1)");
    }
  }
  if (!(c.value_noise >= 0.0) || c.value_noise >= 1.0) {
    throw InputError("value_noise must lie in [0, 1)");
  }
  if (conv == RewardConvention::kEuclideanNormalized &&
      (c.slice_begin < 0 || c.slice_len < 1)) {
    throw InputError("position slice needs slice_begin >= 0, slice_len >= 1");
  }
  if (c.sampling != "uniform" && c.sampling != "filter_cluster") {
    throw InputError("sampling must be 'uniform' or 'filter_cluster', got '" +
                     c.sampling + "'");
  }
  if (c.m < 1) {
    throw InputError("m must be >= 1");
  }
  if (c.presample < 0) {
    throw InputError("presample must be >= 0");
  }
  if (c.filter_h < 1) {
    throw InputError("filter_h must be >= 1");
  }
  if (!(c.filter_eps > 0.0)) {
    throw InputError("filter_eps must be positive");
  }
  if (!(c.cluster_radius >= 0.0) || !std::isfinite(c.cluster_radius)) {
    throw InputError("cluster_radius must be finite and >= 0");
  }
  if (c.cluster_batch < 1) {
    throw InputError("cluster_batch must be >= 1");
  }
  if (!std::isfinite(c.tau) || !(c.tau > 0.0)) {
    throw InputError("tau must be finite and positive");
  }
  if (c.batch_size < 1) {
    throw InputError("batch_size must be >= 1");
  }
  StepBudget budget_probe(c.budget_t);
  (void)budget_probe;
  if (c.max_steps < 0) {
    throw InputError("max_steps must be >= 0");
  }
  if (c.window < 0) {
    throw InputError("window must be >= 0");
  }
  ReliabilityProfile profile{c.r_near, c.r_far, c.d_reliable, c.d_max};
  profile.validate();
  if (c.tasks < 0 || c.tasks > 5) {
    throw InputError("tasks must lie in [0, 5]");
  }
  if (c.rollouts < 1) {
    throw InputError("rollouts must be >= 1");
  }
  if (c.seeds < 1) {
    throw InputError("seeds must be >= 1");
  }
  if (c.bootstrap_samples < 1) {
    throw InputError("bootstrap_samples must be >= 1");
  }
  if (c.workers < 0) {
    throw InputError("workers must be >= 0");
  }
  if (c.out_dir.empty()) {
    throw InputError("out_dir must not be empty");
  }
}

int resolve_workers(const RunConfig& config) {
  long long n = config.workers;
  if (n <= 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
  }
  if (const char* env = std::getenv("TTGS_WORKERS")) {
    long long cap = 0;
    try {
      cap = parse_int(env);
    } catch (const InputError&) {
      throw InputError("TTGS_WORKERS must be a positive integer, got '" +
                       std::string(env) + "'");
    }
    if (cap < 1) {
      throw InputError("TTGS_WORKERS must be a positive integer");
    }
    n = std::min(n, cap);
  }
  return static_cast<int>(std::max(1ll, n));
}

Experiment build_experiment(const RunConfig& config) {
  validate_config(config);
  Experiment exp;
  if (config.maze == "random") {
    exp.maze = std::make_unique<MazeGrid>(
        MazeGrid::random(static_cast<int>(config.maze_width),
                         static_cast<int>(config.maze_height),
                         config.maze_seed));
  } else {
    exp.maze = std::make_unique<MazeGrid>(
        MazeGrid::preset(maze_preset_from_string(config.maze)));
  }
  exp.oracle = std::make_unique<OracleDistance>(*exp.maze);
  if (config.value_noise > 0.0) {
    exp.oracle->set_noise(config.value_noise, config.value_noise_seed);
  }
  exp.profile = ReliabilityProfile{config.r_near, config.r_far,
                                   config.d_reliable, config.d_max};
  exp.task_pairs = derive_tasks(*exp.maze, *exp.oracle, config.tasks);

  if (!config.dataset.empty()) {
    exp.dataset =
        std::make_unique<TrajectoryDataset>(load_dataset(config.dataset));
  } else {
    exp.dataset = std::make_unique<TrajectoryDataset>(
        generate_dataset(*exp.maze, data_regime_from_string(config.regime),
                         config.transitions, config.data_seed));
  }

  const RewardConvention conv =
      reward_convention_from_string(config.convention);
  if (conv != RewardConvention::kEuclideanNormalized &&
      exp.dataset->state_dim() != 2) {
    throw InputError(
        "the maze-backed value conventions need 2-d grid states; the dataset "
        "has dimension " + std::to_string(exp.dataset->state_dim()));
  }
  switch (conv) {
    case RewardConvention::kSparseTerminal: {
      DiscountFactor gamma(config.gamma);
      exp.predictor = DistancePredictor::sparse_terminal(
          synthetic_value(*exp.maze, *exp.oracle, gamma, conv),
          synthetic_value_id(*exp.maze, *exp.oracle, gamma, conv), gamma,
          config.epsilon_clip);
      break;
    }
    case RewardConvention::kPerStepPenalty: {
      DiscountFactor gamma(config.gamma);
      exp.predictor = DistancePredictor::per_step_penalty(
          synthetic_value(*exp.maze, *exp.oracle, gamma, conv),
          synthetic_value_id(*exp.maze, *exp.oracle, gamma, conv), gamma,
          config.epsilon_clip);
      break;
    }
    case RewardConvention::kQuasiMetric: {
      DiscountFactor gamma(config.gamma);
      exp.predictor = DistancePredictor::quasimetric(
          synthetic_value(*exp.maze, *exp.oracle, gamma, conv),
          synthetic_value_id(*exp.maze, *exp.oracle, gamma, conv));
      break;
    }
    case RewardConvention::kEuclideanNormalized: {
      const IndexRange slice{config.slice_begin, config.slice_len};
      slice.check_within(exp.dataset->state_dim(), "position slice");
      exp.predictor = DistancePredictor::euclidean(
          slice, average_step_length(*exp.dataset, slice));
      break;
    }
  }
  return exp;
}

VertexSet select_vertices(const Experiment& exp, const RunConfig& config) {
  const DistancePredictor& predictor = *exp.predictor;
  if (config.sampling == "uniform") {
    return uniform_sample(*exp.dataset, config.m, config.sample_seed);
  }

  std::vector<StateIndex> candidates;
  if (config.presample > 0) {
    // Filter only a uniform pre-sample instead of every dataset state.
    const VertexSet pre =
        uniform_sample(*exp.dataset, config.presample, config.sample_seed);
    for (const StateIndex& si : pre.provenance) {
      const Trajectory& traj = exp.dataset->trajectory(si.trajectory);
      if (si.time + config.filter_h >= traj.length()) {
        continue;
      }
      const Scalar d =
          predictor(traj.states.row(si.time).transpose(),
                    traj.states.row(si.time + config.filter_h).transpose())
              .steps();
      const Scalar ratio = d / static_cast<Scalar>(config.filter_h);
      if (ratio >= 1.0 - config.filter_eps &&
          ratio <= 1.0 + config.filter_eps) {
        candidates.push_back(si);
      }
    }
  } else {
    candidates = temporal_efficiency_filter(*exp.dataset, predictor,
                                            config.filter_h, config.filter_eps);
  }
  if (candidates.empty()) {
    throw InputError(
        "temporal-efficiency filter kept no states; relax filter_eps or "
        "lower filter_h");
  }
  const Scalar radius = config.cluster_radius > 0.0
                            ? config.cluster_radius
                            : static_cast<Scalar>(config.filter_h) / 2.0;
  VertexSet vertices = greedy_cluster(*exp.dataset, candidates, predictor,
                                      radius, config.cluster_batch);
  vertices.seed = config.sample_seed;
  return vertices;
}

namespace {

std::string sampling_canonical(const RunConfig& c) {
  std::string s = "sampling{mode=" + c.sampling;
  if (c.sampling == "uniform") {
    s += ";m=" + std::to_string(c.m) + ";seed=" + std::to_string(c.sample_seed);
  } else {
    const Scalar radius = c.cluster_radius > 0.0
                              ? c.cluster_radius
                              : static_cast<Scalar>(c.filter_h) / 2.0;
    s += ";presample=" + std::to_string(c.presample) +
         ";h=" + std::to_string(c.filter_h) +
         ";eps=" + format_full(c.filter_eps) +
         ";radius=" + format_full(radius) +
         ";batch=" + std::to_string(c.cluster_batch) +
         ";seed=" + std::to_string(c.sample_seed);
  }
  return s + "}";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << content;
  if (!out) {
    throw Error("short write to " + path.string());
  }
}

}  // namespace

BuildResult build_or_load_graph(const Experiment& exp,
                                const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistancePredictor& predictor = *exp.predictor;

  fs::path path;
  if (!config.graph_cache.empty()) {
    path = config.graph_cache;
  } else {
    const std::string key =
        "graph{data=" + hex(exp.dataset->content_hash()) + ";" +
        sampling_canonical(config) + ";pred=" + predictor.fingerprint_hex() +
        ";tau=" + format_full(config.tau) + "}";
    fs::create_directories(config.out_dir);
    path = fs::path(config.out_dir) /
           ("graph-" + hex(Sha256::of(key)).substr(0, 16) + ".ttgg");
  }

  if (fs::exists(path)) {
    PlanningGraph graph = load_graph(path, predictor.fingerprint());
    if (graph.tau() != config.tau) {
      throw InputError("cached graph " + path.string() + " was built with tau=" +
                       format_g(graph.tau()) + " but the run asks for tau=" +
                       format_g(config.tau) + "; rebuild it");
    }
    if (config.sampling == "uniform" && graph.size() != config.m) {
      throw InputError("cached graph " + path.string() + " has " +
                       std::to_string(graph.size()) +
                       " vertices but the run asks for m=" +
                       std::to_string(config.m) + "; rebuild it");
    }
    return BuildResult{std::move(graph), path, true, seconds_since(t0), 0};
  }

  VertexSet vertices = select_vertices(exp, config);
  predictor.reset_clipped_queries();
  const DistanceMatrix distances = build_distance_matrix(
      predictor, vertices, config.batch_size, resolve_workers(config));
  const std::uint64_t clipped = predictor.clipped_queries();
  PlanningGraph graph = apply_penalty(distances, config.tau,
                                      std::move(vertices),
                                      predictor.fingerprint());
  save_graph(graph, path);
  return BuildResult{std::move(graph), path, false, seconds_since(t0), clipped};
}

std::string ResultTable::to_csv() const {
  std::string out = "condition,tau,T,m,task,mean,sd,status\n";
  for (const ResultRow& r : rows) {
    std::string status = r.status;
    for (char& ch : status) {
      if (ch == ',' || ch == '\n' || ch == '\r') {
        ch = ';';
      }
    }
    out += r.condition;
    out += ',' + format_g(r.tau) + ',' + format_g(r.budget_t) + ',' +
           std::to_string(r.m) + ',' + r.task + ',' +
           format_fixed(r.mean, 4) + ',' + format_fixed(r.sd, 4) + ',' +
           status + '\n';
  }
  return out;
}

Scalar paired_bootstrap_p(const TaskSeedMatrix& base,
                          const TaskSeedMatrix& ttgs, Index n_samples,
                          std::uint64_t seed) {
  if (base.rows() != ttgs.rows() || base.cols() != ttgs.cols()) {
    throw Error("paired bootstrap needs equally shaped result matrices");
  }
  if (n_samples < 1) {
    throw InputError("bootstrap needs n_samples >= 1");
  }
  const Index n = base.size();
  if (n == 0) {
    return 1.0;
  }
  std::vector<Scalar> diff(static_cast<std::size_t>(n));
  for (Index t = 0; t < base.rows(); ++t) {
    for (Index s = 0; s < base.cols(); ++s) {
      diff[static_cast<std::size_t>(t * base.cols() + s)] =
          ttgs(t, s) - base(t, s);
    }
  }
  Rng rng(seed);
  Index at_or_below = 0;
  for (Index b = 0; b < n_samples; ++b) {
    Scalar sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      sum += diff[bounded(rng, static_cast<std::uint64_t>(n))];
    }
    if (sum / static_cast<Scalar>(n) <= 0.0) {
      ++at_or_below;
    }
  }
  return static_cast<Scalar>(at_or_below + 1) /
         static_cast<Scalar>(n_samples + 1);
}

EpisodeRecord one_shot_episode(EnvHandle& env, const PolicyFn& policy,
                               ConstRef<StateVector> start,
                               ConstRef<StateVector> goal, Index max_steps) {
  if (max_steps < 0) {
    throw InputError("one_shot_episode: max_steps must be >= 0");
  }
  if (!env.step || !env.reached || !policy) {
    throw InputError("one_shot_episode: environment and policy handles must "
                     "be set");
  }
  EpisodeRecord record;
  StateVector s = start;
  record.states.push_back(s);
  bool success = false;
  while (record.steps < max_steps) {
    if (env.reached(s, goal)) {
      success = true;
      break;
    }
    const Action a = policy(s, goal);
    s = env.step(a);
    ++record.steps;
    record.states.push_back(s);
    record.subgoals.push_back(goal);
    record.decisions.push_back('G');
  }
  record.success = success || env.reached(s, goal);
  return record;
}

std::vector<OneShotPoint> one_shot_distance_curve(
    const MazeGrid& maze, const OracleDistance& oracle,
    const ReliabilityProfile& profile, const std::vector<int>& distances,
    Index rollouts, Scalar budget_factor, std::uint64_t master_seed) {
  if (rollouts < 1) {
    throw InputError("one_shot_distance_curve: rollouts must be >= 1");
  }
  if (!(budget_factor >= 1.0) || !std::isfinite(budget_factor)) {
    throw InputError("one_shot_distance_curve: budget_factor must be >= 1");
  }
  profile.validate();

  std::vector<OneShotPoint> out;
  out.reserve(distances.size());
  const std::vector<Cell>& cells = maze.free_cells();
  for (const int n : distances) {
    if (n < 1) {
      throw InputError("one_shot_distance_curve: distances must be >= 1");
    }
    std::vector<std::pair<Cell, Cell>> pairs;
    for (const Cell a : cells) {
      for (const Cell b : cells) {
        if (oracle.exact(a, b) == n) {
          pairs.emplace_back(a, b);
        }
      }
    }
    if (pairs.empty()) {
      throw InputError("maze has no cell pair at distance " +
                       std::to_string(n));
    }
    OneShotPoint point;
    point.n = n;
    point.pairs_available = static_cast<Index>(pairs.size());
    point.outcomes.resize(static_cast<std::size_t>(rollouts));
    const Index budget =
        static_cast<Index>(std::floor(budget_factor * static_cast<Scalar>(n)));
    Index hits = 0;
    for (Index r = 0; r < rollouts; ++r) {
      Rng pick(mix_seed({master_seed, static_cast<std::uint64_t>(n),
                         static_cast<std::uint64_t>(r)}));
      const auto& [a, b] = pairs[bounded(pick, pairs.size())];
      SyntheticPolicy policy(maze, oracle, profile,
                             mix_seed({master_seed,
                                       static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(r), 1}));
      PolicyFn pf = policy.as_policy_fn();
      EnvHandle env = make_env(maze, a);
      const EpisodeRecord rec = one_shot_episode(env, pf, maze.to_state(a),
                                                 maze.to_state(b), budget);
      point.outcomes[static_cast<std::size_t>(r)] = rec.success ? 1 : 0;
      hits += rec.success ? 1 : 0;
    }
    point.success_rate =
        static_cast<Scalar>(hits) / static_cast<Scalar>(rollouts);
    out.push_back(std::move(point));
  }
  return out;
}

namespace {

// Episode outcomes of one condition, task-major [task][seed][rollout], plus
// one JSONL record per episode in the same order.
struct ConditionRun {
  std::vector<std::uint8_t> success;
  std::vector<std::string> records;
};

ConditionRun run_condition(const Experiment& exp, const RunConfig& config,
                           const PlanningGraph* graph,
                           const std::vector<GuidePath>& guides,
                           const std::string& condition_name) {
  const Index n_tasks = config.tasks;
  const Index n_seeds = config.seeds;
  const Index n_rollouts = config.rollouts;
  const Index total = n_tasks * n_seeds * n_rollouts;

  ConditionRun out;
  out.success.assign(static_cast<std::size_t>(total), 0);
  out.records.assign(static_cast<std::size_t>(total), {});

  std::atomic<Index> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  // Episodes are fully independent: each slot derives its own seed and
  // writes only its own index, so the thread count never changes results.
  auto work = [&]() {
    for (;;) {
      const Index slot = next.fetch_add(1);
      if (slot >= total) {
        return;
      }
      try {
        const Index task = slot / (n_seeds * n_rollouts);
        const Index seed_idx = (slot / n_rollouts) % n_seeds;
        const Index rollout = slot % n_rollouts;
        const auto& [start_cell, goal_cell] =
            exp.task_pairs[static_cast<std::size_t>(task)];
        const std::uint64_t episode_seed =
            mix_seed({config.master_seed, static_cast<std::uint64_t>(task),
                      static_cast<std::uint64_t>(seed_idx),
                      static_cast<std::uint64_t>(rollout)});
        SyntheticPolicy policy(*exp.maze, *exp.oracle, exp.profile,
                               episode_seed);
        PolicyFn pf = policy.as_policy_fn();
        EnvHandle env = make_env(*exp.maze, start_cell);
        const StateVector s0 = exp.maze->to_state(start_cell);
        const StateVector g = exp.maze->to_state(goal_cell);
        EpisodeRecord rec =
            graph ? run_episode_with_guide(
                        env, pf, guides[static_cast<std::size_t>(task)],
                        *exp.predictor, s0, g, StepBudget(config.budget_t),
                        config.max_steps, config.window)
                  : one_shot_episode(env, pf, s0, g, config.max_steps);
        rec.seed = episode_seed;
        rec.task = static_cast<int>(task);
        out.success[static_cast<std::size_t>(slot)] = rec.success ? 1 : 0;

        nlohmann::ordered_json line;
        line["condition"] = condition_name;
        line["task"] = task;
        line["seed_index"] = seed_idx;
        line["rollout"] = rollout;
        line["episode_seed"] = episode_seed;
        line["success"] = rec.success;
        line["steps"] = rec.steps;
        line["decisions"] = rec.decisions;
        out.records[static_cast<std::size_t>(slot)] = line.dump();
      } catch (...) {
        {
          std::scoped_lock lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
        }
        next.store(total);
        return;
      }
    }
  };

  const int workers = static_cast<int>(
      std::min<Index>(resolve_workers(config), std::max<Index>(total, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
  return out;
}

TaskSeedMatrix success_percent(const std::vector<std::uint8_t>& success,
                               Index n_tasks, Index n_seeds,
                               Index n_rollouts) {
  TaskSeedMatrix percent(n_tasks, n_seeds);
  for (Index t = 0; t < n_tasks; ++t) {
    for (Index s = 0; s < n_seeds; ++s) {
      Index hits = 0;
      for (Index r = 0; r < n_rollouts; ++r) {
        hits += success[static_cast<std::size_t>(
            (t * n_seeds + s) * n_rollouts + r)];
      }
      percent(t, s) =
          100.0 * static_cast<Scalar>(hits) / static_cast<Scalar>(n_rollouts);
    }
  }
  return percent;
}

Scalar sample_sd(ConstRef<Vector<>> x) {
  const Index n = x.size();
  if (n < 2) {
    return 0.0;
  }
  const Scalar mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() /
                   static_cast<Scalar>(n - 1));
}

void append_condition_rows(ResultTable& table, const TaskSeedMatrix& percent,
                           const std::string& condition, Scalar tau,
                           Scalar budget_t, Index m) {
  for (Index t = 0; t < percent.rows(); ++t) {
    const Vector<> row = percent.row(t).transpose();
    table.rows.push_back(ResultRow{condition, tau, budget_t, m,
                                   std::to_string(t), row.mean(),
                                   sample_sd(row), "ok"});
  }
  // Overall: average the tasks within each seed, then summarize over seeds.
  const Vector<> by_seed = percent.colwise().mean().transpose();
  table.rows.push_back(ResultRow{condition, tau, budget_t, m, "all",
                                 by_seed.mean(), sample_sd(by_seed), "ok"});
}

std::vector<GuidePath> plan_task_guides(const Experiment& exp,
                                        const PlanningGraph& graph,
                                        Scalar budget_t) {
  std::vector<GuidePath> guides;
  guides.reserve(exp.task_pairs.size());
  for (const auto& [start, goal] : exp.task_pairs) {
    guides.push_back(plan_episode(graph, *exp.predictor,
                                  exp.maze->to_state(start),
                                  exp.maze->to_state(goal),
                                  StepBudget(budget_t))
                         .guide);
  }
  return guides;
}

std::string join_records(const ConditionRun& a, const ConditionRun& b) {
  std::string out;
  for (const std::string& line : a.records) {
    out += line;
    out += '\n';
  }
  for (const std::string& line : b.records) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

EvalArtifacts cmd_eval(const RunConfig& config) {
  Experiment exp = build_experiment(config);
  fs::create_directories(config.out_dir);

  EvalArtifacts art;
  art.base.resize(config.tasks, config.tasks > 0 ? config.seeds : 0);
  art.ttgs.resize(config.tasks, config.tasks > 0 ? config.seeds : 0);
  if (config.tasks == 0) {
    write_text_file(fs::path(config.out_dir) / "eval_table.csv",
                    art.table.to_csv());
    write_text_file(fs::path(config.out_dir) / "eval_records.jsonl", "");
    std::cout << "no tasks configured; wrote an empty table\n";
    return art;
  }

  const BuildResult built = build_or_load_graph(exp, config);
  const std::vector<GuidePath> guides =
      plan_task_guides(exp, built.graph, config.budget_t);

  const ConditionRun base = run_condition(exp, config, nullptr, {}, "base");
  const ConditionRun ttgs =
      run_condition(exp, config, &built.graph, guides, "ttgs");

  art.base = success_percent(base.success, config.tasks, config.seeds,
                             config.rollouts);
  art.ttgs = success_percent(ttgs.success, config.tasks, config.seeds,
                             config.rollouts);
  art.base_mean = art.base.mean();
  art.ttgs_mean = art.ttgs.mean();
  append_condition_rows(art.table, art.base, "base", config.tau,
                        config.budget_t, built.graph.size());
  append_condition_rows(art.table, art.ttgs, "ttgs", config.tau,
                        config.budget_t, built.graph.size());
  art.p_value = paired_bootstrap_p(art.base, art.ttgs,
                                   config.bootstrap_samples,
                                   mix_seed({config.master_seed, 0xB00157}));
  art.records_jsonl = join_records(base, ttgs);

  write_text_file(fs::path(config.out_dir) / "eval_table.csv",
                  art.table.to_csv());
  write_text_file(fs::path(config.out_dir) / "eval_records.jsonl",
                  art.records_jsonl);

  std::cout << "base success " << format_fixed(art.base_mean, 2)
            << "%, planner success " << format_fixed(art.ttgs_mean, 2)
            << "% (" << config.tasks << " tasks x " << config.seeds
            << " seeds x " << config.rollouts << " rollouts)\n"
            << "paired bootstrap p = " << format_g(art.p_value) << " ("
            << config.bootstrap_samples << " resamples)\n";
  return art;
}

namespace {

struct SweepCell {
  Scalar tau = 0.0;
  Scalar budget_t = 0.0;
  Index m = 0;
};

std::vector<SweepCell> parse_sweep_cells(const std::string& text,
                                         Index default_m) {
  std::string normalized = text;
  for (char& ch : normalized) {
    if (ch == ',') {
      ch = ' ';
    }
  }
  std::vector<SweepCell> cells;
  std::istringstream in(normalized);
  std::string token;
  while (in >> token) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= token.size()) {
      const std::size_t colon = token.find(':', pos);
      if (colon == std::string::npos) {
        parts.push_back(token.substr(pos));
        break;
      }
      parts.push_back(token.substr(pos, colon - pos));
      pos = colon + 1;
    }
    if (parts.size() != 2 && parts.size() != 3) {
      throw InputError("sweep cell '" + token +
                       "' must look like tau:T or tau:T:m");
    }
    SweepCell cell;
    cell.tau = parse_scalar(parts[0]);
    cell.budget_t = parse_scalar(parts[1]);
    cell.m = parts.size() == 3 ? static_cast<Index>(parse_int(parts[2]))
                               : default_m;
    if (!(cell.tau > 0.0)) {
      throw InputError("sweep cell '" + token + "': tau must be positive");
    }
    if (cell.m < 1) {
      throw InputError("sweep cell '" + token + "': m must be >= 1");
    }
    cells.push_back(cell);
  }
  if (cells.empty()) {
    throw InputError("sweep_cells is empty");
  }
  return cells;
}

}  // namespace

ResultTable cmd_sweep(const RunConfig& config) {
  const std::vector<SweepCell> cells =
      parse_sweep_cells(config.sweep_cells, config.m);
  Experiment exp = build_experiment(config);
  fs::create_directories(config.out_dir);

  ResultTable table;
  if (config.tasks == 0) {
    write_text_file(fs::path(config.out_dir) / "sweep_table.csv",
                    table.to_csv());
    std::cout << "no tasks configured; wrote an empty table\n";
    return table;
  }

  // The bare policy ignores tau, T, and the graph, so one run covers every
  // cell.
  const ConditionRun base = run_condition(exp, config, nullptr, {}, "base");
  append_condition_rows(table,
                        success_percent(base.success, config.tasks,
                                        config.seeds, config.rollouts),
                        "base", 0.0, 0.0, 0);

  // The distance matrix depends on the vertex set but not on tau or T, so
  // consecutive cells sharing one m reuse it.
  Index cached_m = -1;
  VertexSet vertices;
  DistanceMatrix distances;
  for (const SweepCell& cell : cells) {
    try {
      if (cell.m != cached_m) {
        RunConfig sub = config;
        sub.m = cell.m;
        vertices = select_vertices(exp, sub);
        distances = build_distance_matrix(*exp.predictor, vertices,
                                          config.batch_size,
                                          resolve_workers(config));
        cached_m = cell.m;
      }
      PlanningGraph graph = apply_penalty(distances, cell.tau, vertices,
                                          exp.predictor->fingerprint());
      RunConfig sub = config;
      sub.tau = cell.tau;
      sub.budget_t = cell.budget_t;
      sub.m = cell.m;
      const std::vector<GuidePath> guides =
          plan_task_guides(exp, graph, cell.budget_t);
      const ConditionRun run =
          run_condition(exp, sub, &graph, guides, "ttgs");
      append_condition_rows(table,
                            success_percent(run.success, config.tasks,
                                            config.seeds, config.rollouts),
                            "ttgs", cell.tau, cell.budget_t, graph.size());
    } catch (const Error& e) {
      // Record the failed cell and keep sweeping the rest of the grid.
      table.rows.push_back(ResultRow{"ttgs", cell.tau, cell.budget_t, cell.m,
                                     "all", 0.0, 0.0,
                                     std::string("error: ") + e.what()});
    }
  }

  const std::string csv = table.to_csv();
  write_text_file(fs::path(config.out_dir) / "sweep_table.csv", csv);
  std::cout << csv;
  return table;
}

BuildResult cmd_build_graph(const RunConfig& config) {
  Experiment exp = build_experiment(config);
  fs::create_directories(config.out_dir);
  write_text_file(fs::path(config.out_dir) / "maze.txt",
                  exp.maze->to_ascii());

  BuildResult built = build_or_load_graph(exp, config);
  std::cout << "maze: " << exp.maze->width() << "x" << exp.maze->height()
            << ", " << exp.maze->num_free() << " free cells, diameter "
            << exp.oracle->diameter() << "\n"
            << "dataset: " << exp.dataset->num_trajectories()
            << " trajectories, " << exp.dataset->total_states() << " states\n"
            << "graph: " << built.graph.size() << " vertices, tau "
            << format_g(built.graph.tau()) << "\n";
  if (built.loaded_from_cache) {
    std::cout << "loaded from cache " << built.cache_path.string() << " in "
              << format_fixed(built.seconds, 2) << " s\n";
  } else {
    std::cout << "built in " << format_fixed(built.seconds, 2)
              << " s (" << built.clipped_queries
              << " clipped distance queries), cached at "
              << built.cache_path.string() << "\n";
  }
  return built;
}

namespace {

Cell parse_cell(const std::string& text, const MazeGrid& maze,
                const std::string& what) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) {
    throw InputError(what + " must look like \"x,y\", got '" + text + "'");
  }
  Cell cell;
  cell.x = static_cast<int>(parse_int(text.substr(0, comma)));
  cell.y = static_cast<int>(parse_int(text.substr(comma + 1)));
  if (!maze.free_cell(cell)) {
    throw InputError(what + " (" + std::to_string(cell.x) + "," +
                     std::to_string(cell.y) + ") is not a free maze cell");
  }
  return cell;
}

std::string render_viz(const MazeGrid& maze, const PlanningGraph& graph,
                       const DistancePredictor& predictor,
                       const GuidePath& guide, Cell start, Cell goal) {
  const Scalar cell = 12.0;
  const Scalar margin = 8.0;
  const Scalar legend_w = 72.0;
  const Scalar grid_w = static_cast<Scalar>(maze.width()) * cell;
  const Scalar grid_h = static_cast<Scalar>(maze.height()) * cell;
  const Scalar width = margin * 2 + grid_w + legend_w;
  const Scalar height = margin * 2 + grid_h;
  const auto cx = [&](Scalar x) { return margin + (x + 0.5) * cell; };
  const auto cy = [&](Scalar y) { return margin + (y + 0.5) * cell; };

  detail::SvgWriter svg(width, height);
  svg.rect(0, 0, width, height, "#ffffff");
  for (int y = 0; y < maze.height(); ++y) {
    for (int x = 0; x < maze.width(); ++x) {
      if (maze.wall(Cell{x, y})) {
        svg.rect(margin + x * cell, margin + y * cell, cell, cell, "#252a33");
      }
    }
  }

  // Vertex scatter, shaded by predicted distance to the goal (bright =
  // close).
  const Vector<> dist =
      predictor.distances_to(graph.vertices().states, maze.to_state(goal));
  const Scalar dmin = dist.minCoeff();
  const Scalar dmax = dist.maxCoeff();
  const Scalar span = dmax > dmin ? dmax - dmin : 1.0;
  for (Index i = 0; i < graph.size(); ++i) {
    const Scalar t = 1.0 - (dist[i] - dmin) / span;
    svg.circle(cx(graph.vertices().states(i, 0)),
               cy(graph.vertices().states(i, 1)), 2.4, detail::colormap(t));
  }

  if (guide.length() > 0) {
    std::vector<std::pair<Scalar, Scalar>> points;
    points.reserve(static_cast<std::size_t>(guide.length()));
    for (Index i = 0; i < guide.length(); ++i) {
      points.emplace_back(cx(guide.waypoint_states(i, 0)),
                          cy(guide.waypoint_states(i, 1)));
    }
    svg.polyline(points, "#e8590c", 2.5);
  }
  svg.circle(cx(start.x), cy(start.y), 4.5, "#2f9e44");
  svg.circle(cx(goal.x), cy(goal.y), 4.5, "#e03131");

  // Legend: colormap swatches with the distance scale.
  const Scalar lx = margin + grid_w + 14.0;
  const Scalar swatch = 14.0;
  const int steps = 9;
  for (int i = 0; i < steps; ++i) {
    const Scalar t = 1.0 - static_cast<Scalar>(i) / (steps - 1);
    svg.rect(lx, margin + 14.0 + i * swatch, swatch, swatch,
             detail::colormap(t));
  }
  svg.text(lx, margin + 8.0, 10.0, "d to goal");
  svg.text(lx + swatch + 4.0, margin + 14.0 + 10.0, 9.0, format_fixed(dmin, 1));
  svg.text(lx + swatch + 4.0, margin + 14.0 + steps * swatch - 2.0, 9.0,
           format_fixed(dmax, 1));
  return svg.finish();
}

}  // namespace

std::string cmd_viz(const RunConfig& config) {
  Experiment exp = build_experiment(config);
  fs::create_directories(config.out_dir);
  if (exp.dataset->state_dim() != 2) {
    throw InputError("visualization needs 2-d grid states; the dataset has "
                     "dimension " + std::to_string(exp.dataset->state_dim()));
  }
  if ((config.viz_start.empty() || config.viz_goal.empty()) &&
      exp.task_pairs.empty()) {
    throw InputError("set viz_start/viz_goal or configure tasks >= 1");
  }
  const Cell start = config.viz_start.empty()
                         ? exp.task_pairs.front().first
                         : parse_cell(config.viz_start, *exp.maze, "viz_start");
  const Cell goal = config.viz_goal.empty()
                        ? exp.task_pairs.front().second
                        : parse_cell(config.viz_goal, *exp.maze, "viz_goal");

  const BuildResult built = build_or_load_graph(exp, config);
  const PlannerState plan = plan_episode(built.graph, *exp.predictor,
                                         exp.maze->to_state(start),
                                         exp.maze->to_state(goal),
                                         StepBudget(config.budget_t));
  const std::string svg = render_viz(*exp.maze, built.graph, *exp.predictor,
                                     plan.guide, start, goal);
  const fs::path path = fs::path(config.out_dir) /
                        ("viz-tau" + format_g(config.tau) + ".svg");
  write_text_file(path, svg);
  std::cout << "wrote " << path.string() << " (guide: " << plan.guide.length()
            << " waypoints, cost " << format_fixed(plan.guide.cost, 2)
            << ")\n";
  return svg;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "plan over offline trajectories: turn value estimates into step "
      "distances, build a penalized graph, and steer a frozen policy along "
      "its shortest paths"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file with run configuration (flat object; every key "
                 "matches a flag below)");

  const RunConfig defaults;
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const ConfigField& field : config_fields()) {
    app.add_option_function<std::string>(
        "--" + field.name,
        [&overrides, name = field.name](const std::string& value) {
          overrides.emplace_back(name, value);
        },
        field.help + " [" + field.get(defaults) + "]");
  }

  CLI::App* sub_build = app.add_subcommand(
      "build-graph", "sample vertices, build the penalized graph, cache it");
  CLI::App* sub_eval = app.add_subcommand(
      "eval", "paired bare-policy vs. planner evaluation on the task set");
  CLI::App* sub_sweep = app.add_subcommand(
      "sweep", "evaluate a grid of tau:T[:m] cells against one base run");
  CLI::App* sub_viz = app.add_subcommand(
      "viz", "render the maze, vertex scatter, and guide path as SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help and friends
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
    }
    for (const auto& [key, value] : overrides) {
      apply_override(config, key, value);
    }
    validate_config(config);
    if (sub_build->parsed()) {
      cmd_build_graph(config);
    } else if (sub_eval->parsed()) {
      cmd_eval(config);
    } else if (sub_sweep->parsed()) {
      cmd_sweep(config);
    } else if (sub_viz->parsed()) {
      cmd_viz(config);
    }
    return 0;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ttgs
