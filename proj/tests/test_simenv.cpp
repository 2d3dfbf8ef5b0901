#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "ttgs/hash.hpp"
#include "ttgs/rng.hpp"
#include "ttgs/simenv.hpp"

namespace {

using namespace ttgs;

// Small reference BFS, independent of OracleDistance.
int bfs_steps(const MazeGrid& maze, Cell from, Cell to) {
  std::vector<int> dist(static_cast<std::size_t>(maze.width() * maze.height()),
                        -1);
  auto at = [&](Cell c) -> int& {
    return dist[static_cast<std::size_t>(c.y * maze.width() + c.x)];
  };
  std::deque<Cell> queue{from};
  at(from) = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == to) {
      return at(c);
    }
    const Cell next[4] = {{c.x, c.y - 1}, {c.x, c.y + 1},
                          {c.x + 1, c.y}, {c.x - 1, c.y}};
    for (const Cell& n : next) {
      if (maze.free_cell(n) && at(n) < 0) {
        at(n) = at(c) + 1;
        queue.push_back(n);
      }
    }
  }
  return -1;
}

const char* kOpenRoom =
    "#########\n"
    "#.......#\n"
    "#.......#\n"
    "#.......#\n"
    "#.......#\n"
    "#.......#\n"
    "#.......#\n"
    "#.......#\n"
    "#########\n";

Cell random_free(const MazeGrid& maze, Rng& rng) {
  return maze.free_cells()[bounded(
      rng, static_cast<std::uint64_t>(maze.num_free()))];
}

}  // namespace

TEST_CASE("presets are frozen layouts") {
  const MazeGrid medium = MazeGrid::preset(MazePreset::kMedium);
  CHECK(medium.width() == 15);
  CHECK(medium.height() == 15);
  CHECK(medium.num_free() == 97);
  CHECK(hex(Sha256::of(medium.to_ascii())) ==
        "4f76e974debec147db5682466025a53b255f15c0b45b5a13d17939eb3b0ce648");

  const MazeGrid large = MazeGrid::preset(MazePreset::kLarge);
  CHECK(large.width() == 25);
  CHECK(large.height() == 25);
  CHECK(large.num_free() == 287);
  CHECK(hex(Sha256::of(large.to_ascii())) ==
        "d2a5d0cd556fb27e073380e77f78eb57699e7c4249a23e16d3e4ada286042cb6");

  const MazeGrid giant = MazeGrid::preset(MazePreset::kGiant);
  CHECK(giant.width() == 45);
  CHECK(giant.height() == 45);
  CHECK(giant.num_free() == 967);
  CHECK(hex(Sha256::of(giant.to_ascii())) ==
        "55cf949f6438c680e508f955e86012f6397003f6fed0f4a8de7d3115ae764205");

  CHECK(OracleDistance(medium).diameter() == 46);
  CHECK(OracleDistance(large).diameter() == 108);
  CHECK(OracleDistance(giant).diameter() == 212);

  // A preset survives its own text export.
  const MazeGrid reparsed = MazeGrid::from_ascii(medium.to_ascii());
  CHECK(reparsed.to_ascii() == medium.to_ascii());
}

TEST_CASE("preset names parse") {
  CHECK(maze_preset_from_string("medium") == MazePreset::kMedium);
  CHECK(maze_preset_from_string("large") == MazePreset::kLarge);
  CHECK(maze_preset_from_string("giant") == MazePreset::kGiant);
  CHECK_THROWS_AS(maze_preset_from_string("immense"), InputError);
}

TEST_CASE("random mazes are seeded and structurally sound") {
  const MazeGrid a = MazeGrid::random(15, 15, 7);
  const MazeGrid b = MazeGrid::random(15, 15, 7);
  CHECK(a.to_ascii() == b.to_ascii());

  const MazeGrid c = MazeGrid::random(15, 15, 8);
  CHECK(c.to_ascii() != a.to_ascii());

  // Border walls, and every free cell reachable from the first one.
  for (int x = 0; x < a.width(); ++x) {
    REQUIRE(a.wall({x, 0}));
    REQUIRE(a.wall({x, a.height() - 1}));
  }
  for (int y = 0; y < a.height(); ++y) {
    REQUIRE(a.wall({0, y}));
    REQUIRE(a.wall({a.width() - 1, y}));
  }
  int reachable = 0;
  for (const Cell& cell : a.free_cells()) {
    if (bfs_steps(a, a.free_cells().front(), cell) >= 0) {
      ++reachable;
    }
  }
  CHECK(reachable == a.num_free());

  CHECK_THROWS_AS(MazeGrid::random(14, 15, 1), InputError);
  CHECK_THROWS_AS(MazeGrid::random(15, 3, 1), InputError);
}

TEST_CASE("ascii parsing rejects broken grids") {
  CHECK_THROWS_AS(MazeGrid::from_ascii(""), InputError);
  CHECK_THROWS_AS(MazeGrid::from_ascii("####\n#..#\n##x#\n####\n"), InputError);
  // Hole in the border.
  CHECK_THROWS_AS(MazeGrid::from_ascii("####\n...#\n####\n"), InputError);
  // Two free components.
  CHECK_THROWS_AS(MazeGrid::from_ascii("#####\n#.#.#\n#####\n"), InputError);
  // Ragged rows.
  CHECK_THROWS_AS(MazeGrid::from_ascii("####\n#.#\n####\n"), InputError);
}

TEST_CASE("step moves in screen coordinates and walls block") {
  const MazeGrid room = MazeGrid::from_ascii(kOpenRoom);
  const Cell mid{4, 4};
  CHECK(room.step(mid, MoveAction::kNorth) == Cell{4, 3});
  CHECK(room.step(mid, MoveAction::kSouth) == Cell{4, 5});
  CHECK(room.step(mid, MoveAction::kEast) == Cell{5, 4});
  CHECK(room.step(mid, MoveAction::kWest) == Cell{3, 4});
  CHECK(room.step(mid, MoveAction::kStay) == mid);

  // Pushing into the border wall is a no-op.
  CHECK(room.step({1, 1}, MoveAction::kNorth) == Cell{1, 1});
  CHECK(room.step({1, 1}, MoveAction::kWest) == Cell{1, 1});
}

TEST_CASE("cell ids and states round-trip") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  Index next = 0;
  for (const Cell& cell : maze.free_cells()) {
    CHECK(maze.cell_id(cell) == next);
    ++next;
    const StateVector s = maze.to_state(cell);
    CHECK(s.size() == 2);
    CHECK(s[0] == static_cast<Scalar>(cell.x));
    CHECK(s[1] == static_cast<Scalar>(cell.y));
    CHECK(maze.to_cell(s) == cell);
  }
  CHECK(maze.cell_id({0, 0}) == -1);
}

TEST_CASE("oracle distances are a metric and match BFS") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance oracle(maze);
  const auto& cells = maze.free_cells();
  const Index n = maze.num_free();

  int bad_identity = 0;
  int bad_symmetry = 0;
  for (Index i = 0; i < n; ++i) {
    if (oracle.exact(cells[static_cast<std::size_t>(i)],
                     cells[static_cast<std::size_t>(i)]) != 0) {
      ++bad_identity;
    }
    for (Index j = i + 1; j < n; ++j) {
      const Cell a = cells[static_cast<std::size_t>(i)];
      const Cell b = cells[static_cast<std::size_t>(j)];
      if (oracle.exact(a, b) != oracle.exact(b, a)) {
        ++bad_symmetry;
      }
    }
  }
  CHECK(bad_identity == 0);
  CHECK(bad_symmetry == 0);

  // Triangle inequality over random triples, BFS agreement over random
  // pairs; both aggregated so the loop stays cheap.
  Rng rng(mix_seed({606, 1}));
  int triangle_violations = 0;
  for (int t = 0; t < 20000; ++t) {
    const Cell a = random_free(maze, rng);
    const Cell b = random_free(maze, rng);
    const Cell c = random_free(maze, rng);
    if (oracle.exact(a, c) > oracle.exact(a, b) + oracle.exact(b, c)) {
      ++triangle_violations;
    }
  }
  CHECK(triangle_violations == 0);

  int bfs_mismatches = 0;
  int max_seen = 0;
  for (int t = 0; t < 300; ++t) {
    const Cell a = random_free(maze, rng);
    const Cell b = random_free(maze, rng);
    if (oracle.exact(a, b) != bfs_steps(maze, a, b)) {
      ++bfs_mismatches;
    }
  }
  CHECK(bfs_mismatches == 0);

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      max_seen = std::max(max_seen,
                          oracle.exact(cells[static_cast<std::size_t>(i)],
                                       cells[static_cast<std::size_t>(j)]));
    }
  }
  CHECK(oracle.diameter() == max_seen);

  // Adjacent free cells are one step apart.
  const Cell first = cells.front();
  const Cell east = maze.step(first, MoveAction::kEast);
  if (!(east == first)) {
    CHECK(oracle.exact(first, east) == 1);
  }
}

TEST_CASE("oracle counts steps around walls, not through them") {
  const MazeGrid maze = MazeGrid::from_ascii(
      "#####\n"
      "#.#.#\n"
      "#...#\n"
      "#####\n");
  const OracleDistance oracle(maze);
  // Manhattan distance would say 2; the wall at (2, 1) forces a detour.
  CHECK(oracle.exact({1, 1}, {3, 1}) == 4);
  CHECK(oracle.exact({1, 1}, {2, 2}) == 2);
  CHECK_THROWS_AS(oracle.query({0, 0}, {1, 1}), InputError);
}

TEST_CASE("query noise stays inside the band and is reproducible") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  OracleDistance clean(maze);
  OracleDistance noisy(maze);
  noisy.set_noise(0.1, 4242);
  OracleDistance same(maze);
  same.set_noise(0.1, 4242);
  OracleDistance other(maze);
  other.set_noise(0.1, 4243);

  Rng rng(mix_seed({606, 2}));
  int out_of_band = 0;
  int mismatched_replays = 0;
  int differs_from_exact = 0;
  int differs_across_seeds = 0;
  for (int t = 0; t < 2000; ++t) {
    const Cell a = random_free(maze, rng);
    const Cell b = random_free(maze, rng);
    const Scalar d = clean.query(a, b);
    CHECK(d == static_cast<Scalar>(clean.exact(a, b)));  // eta = 0 passthrough

    const Scalar q = noisy.query(a, b);
    if (q < 0.9 * d || q > 1.1 * d) {
      ++out_of_band;
    }
    if (q != noisy.query(a, b) || q != same.query(a, b)) {
      ++mismatched_replays;
    }
    if (d > 0.0 && q != d) {
      ++differs_from_exact;
    }
    if (q != other.query(a, b)) {
      ++differs_across_seeds;
    }
  }
  CHECK(out_of_band == 0);
  CHECK(mismatched_replays == 0);
  // Multiplicative noise should essentially never hit the exact value.
  CHECK(differs_from_exact > 1900);
  CHECK(differs_across_seeds > 1900);

  // exact() ignores the noise configuration entirely.
  CHECK(noisy.exact({1, 1}, {1, 2}) == clean.exact({1, 1}, {1, 2}));
}

TEST_CASE("asymmetry scales one direction only") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  OracleDistance plain(maze);
  plain.set_noise(0.1, 99);
  OracleDistance skewed(maze);
  skewed.set_noise(0.1, 99);
  skewed.set_asymmetric(true);

  Rng rng(mix_seed({606, 3}));
  for (int t = 0; t < 500; ++t) {
    const Cell a = random_free(maze, rng);
    const Cell b = random_free(maze, rng);
    const Scalar base = plain.query(a, b);
    const Scalar skew = skewed.query(a, b);
    if (maze.cell_id(a) > maze.cell_id(b)) {
      CHECK(skew == 1.5 * base);
    } else {
      CHECK(skew == base);
    }
  }
}

TEST_CASE("reliability profile is piecewise linear") {
  const ReliabilityProfile r{0.97, 0.25, 12.0, 60.0};
  r.validate();
  CHECK(r.at(0.0) == 0.97);
  CHECK(r.at(12.0) == 0.97);
  CHECK(r.at(60.0) == 0.25);
  CHECK(r.at(500.0) == 0.25);
  CHECK(r.at(36.0) == doctest::Approx(0.61));  // halfway down the ramp

  CHECK_THROWS_AS((ReliabilityProfile{0.5, 0.8, 12.0, 60.0}.validate()),
                  InputError);
  CHECK_THROWS_AS((ReliabilityProfile{0.9, 0.2, 60.0, 12.0}.validate()),
                  InputError);
  CHECK_THROWS_AS((ReliabilityProfile{0.9, -0.1, 12.0, 60.0}.validate()),
                  InputError);
}

TEST_CASE("expert first step follows BFS with N,S,E,W tie order") {
  const MazeGrid room = MazeGrid::from_ascii(kOpenRoom);
  const OracleDistance oracle(room);

  CHECK(first_step_towards(room, oracle, {4, 4}, {4, 3}) == MoveAction::kNorth);
  CHECK(first_step_towards(room, oracle, {4, 4}, {4, 4}) == MoveAction::kStay);
  // North and East both start shortest paths to the upper-right; N wins.
  CHECK(first_step_towards(room, oracle, {2, 2}, {3, 1}) == MoveAction::kNorth);
  // South and West tie towards the lower-left; S comes first in the order.
  CHECK(first_step_towards(room, oracle, {4, 4}, {3, 5}) == MoveAction::kSouth);

  // Iterating the expert step walks a shortest path to the goal.
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance md(maze);
  Cell at{1, 1};
  const Cell goal{13, 13};
  int steps = 0;
  while (!(at == goal)) {
    at = maze.step(at, first_step_towards(maze, md, at, goal));
    ++steps;
    REQUIRE(steps <= md.diameter());
  }
  CHECK(steps == md.exact({1, 1}, goal));
}

TEST_CASE("expert path cells are a valid shortest path") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance oracle(maze);
  const Cell from{1, 13};
  const Cell to{13, 1};

  const std::vector<Cell> path = shortest_path_cells(maze, oracle, from, to);
  REQUIRE(static_cast<int>(path.size()) == oracle.exact(from, to) + 1);
  CHECK(path.front() == from);
  CHECK(path.back() == to);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    CHECK(oracle.exact(path[i], path[i + 1]) == 1);
  }
  CHECK(shortest_path_cells(maze, oracle, from, to) == path);
}

TEST_CASE("fully reliable policy always plays the expert move") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance oracle(maze);
  SyntheticPolicy policy(maze, oracle, {1.0, 1.0, 12.0, 60.0}, 5);

  Rng rng(mix_seed({606, 4}));
  int deviations = 0;
  for (int t = 0; t < 500; ++t) {
    const Cell s = random_free(maze, rng);
    const Cell g = random_free(maze, rng);
    if (policy.act(s, g) != first_step_towards(maze, oracle, s, g)) {
      ++deviations;
    }
  }
  CHECK(deviations == 0);
}

TEST_CASE("unreliable moves are uniform over the legal directions") {
  const MazeGrid room = MazeGrid::from_ascii(kOpenRoom);
  const OracleDistance oracle(room);
  // r(d) = 0 everywhere: every move is a random legal one.
  SyntheticPolicy policy(room, oracle, {0.0, 0.0, 1.0, 2.0}, 31);

  std::array<int, 5> counts{};
  for (int t = 0; t < 10000; ++t) {
    counts[static_cast<std::size_t>(policy.act({4, 4}, {1, 1}))]++;
  }
  CHECK(counts[static_cast<std::size_t>(MoveAction::kStay)] == 0);

  // Chi-squared against uniform over the four directions, df = 3; 16.27 is
  // the 0.001 critical value, and the draw is deterministic anyway.
  Scalar chi2 = 0.0;
  for (int a = 0; a < 4; ++a) {
    const Scalar gap = static_cast<Scalar>(counts[static_cast<std::size_t>(a)]) - 2500.0;
    chi2 += gap * gap / 2500.0;
  }
  CHECK(chi2 < 16.27);

  // Reseeding replays the exact action stream.
  policy.reseed(77);
  std::vector<MoveAction> first;
  for (int t = 0; t < 50; ++t) {
    first.push_back(policy.act({4, 4}, {1, 1}));
  }
  policy.reseed(77);
  for (int t = 0; t < 50; ++t) {
    CHECK(policy.act({4, 4}, {1, 1}) == first[static_cast<std::size_t>(t)]);
  }
}

TEST_CASE("boxed-in policy can only stay") {
  const MazeGrid cage = MazeGrid::from_ascii("###\n#.#\n###\n");
  const OracleDistance oracle(cage);
  SyntheticPolicy policy(cage, oracle, {0.0, 0.0, 1.0, 2.0}, 1);
  for (int t = 0; t < 10; ++t) {
    CHECK(policy.act({1, 1}, {1, 1}) == MoveAction::kStay);
  }
}

TEST_CASE("synthetic values follow the closed forms") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance oracle(maze);
  const DiscountFactor gamma(0.95);

  const ValueFn sparse =
      synthetic_value(maze, oracle, gamma, RewardConvention::kSparseTerminal);
  const ValueFn dense =
      synthetic_value(maze, oracle, gamma, RewardConvention::kPerStepPenalty);
  const ValueFn raw =
      synthetic_value(maze, oracle, gamma, RewardConvention::kQuasiMetric);

  // A five-step pair: gamma^5 and -(1 - gamma^5) / (1 - gamma).
  Rng rng(mix_seed({606, 5}));
  Cell a = random_free(maze, rng);
  Cell b = a;
  for (int t = 0; oracle.exact(a, b) != 5; ++t) {
    REQUIRE(t < 100000);
    a = random_free(maze, rng);
    b = random_free(maze, rng);
  }
  const StateVector sa = maze.to_state(a);
  const StateVector sb = maze.to_state(b);
  CHECK(sparse(sa, sb) == doctest::Approx(0.7737809375).epsilon(1e-12));
  CHECK(dense(sa, sb) == doctest::Approx(-(1.0 - 0.7737809375) / 0.05)
                             .epsilon(1e-12));
  CHECK(raw(sa, sb) == 5.0);

  // Ids separate the conventions and the discount.
  const std::string id_sparse = synthetic_value_id(
      maze, oracle, gamma, RewardConvention::kSparseTerminal);
  const std::string id_dense = synthetic_value_id(
      maze, oracle, gamma, RewardConvention::kPerStepPenalty);
  const std::string id_other = synthetic_value_id(
      maze, oracle, DiscountFactor(0.99), RewardConvention::kSparseTerminal);
  CHECK(id_sparse != id_dense);
  CHECK(id_sparse != id_other);
  CHECK(id_sparse == synthetic_value_id(maze, oracle, gamma,
                                        RewardConvention::kSparseTerminal));
}

TEST_CASE("value transforms recover the oracle distance exactly") {
  // End-to-end calibration: synthetic values fed through the matching
  // transform reproduce the BFS step count for every ordered pair of free
  // cells with d >= 1.
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance oracle(maze);
  const DiscountFactor gamma(0.99);

  const DistancePredictor dense = DistancePredictor::per_step_penalty(
      synthetic_value(maze, oracle, gamma, RewardConvention::kPerStepPenalty),
      synthetic_value_id(maze, oracle, gamma,
                         RewardConvention::kPerStepPenalty),
      gamma);
  const DistancePredictor sparse = DistancePredictor::sparse_terminal(
      synthetic_value(maze, oracle, gamma, RewardConvention::kSparseTerminal),
      synthetic_value_id(maze, oracle, gamma,
                         RewardConvention::kSparseTerminal),
      gamma);

  Scalar worst_dense = 0.0;
  Scalar worst_sparse = 0.0;
  const auto& cells = maze.free_cells();
  for (const Cell& from : cells) {
    const StateVector s = maze.to_state(from);
    for (const Cell& to : cells) {
      const int d = oracle.exact(from, to);
      if (d < 1) {
        continue;
      }
      const StateVector g = maze.to_state(to);
      worst_dense = std::max(
          worst_dense, std::abs(dense(s, g).steps() - static_cast<Scalar>(d)));
      worst_sparse = std::max(
          worst_sparse,
          std::abs(sparse(s, g).steps() - static_cast<Scalar>(d)));
    }
  }
  CHECK(worst_dense < 1e-6);
  CHECK(worst_sparse < 1e-6);
}

TEST_CASE("noisy values land within the noise band after the transform") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  OracleDistance oracle(maze);
  oracle.set_noise(0.1, 2026);
  const DiscountFactor gamma(0.99);

  const DistancePredictor pred = DistancePredictor::per_step_penalty(
      synthetic_value(maze, oracle, gamma, RewardConvention::kPerStepPenalty),
      synthetic_value_id(maze, oracle, gamma,
                         RewardConvention::kPerStepPenalty),
      gamma);

  // Multiplicative noise on d passes through the log transform untouched,
  // so the recovered distance sits inside [0.9 d, 1.1 d] (plus a hair of
  // floating-point slack).
  int out_of_band = 0;
  const auto& cells = maze.free_cells();
  for (const Cell& from : cells) {
    const StateVector s = maze.to_state(from);
    for (const Cell& to : cells) {
      const int d = oracle.exact(from, to);
      if (d < 1) {
        continue;
      }
      const Scalar got = pred(s, maze.to_state(to)).steps();
      if (got < 0.9 * d - 1e-9 || got > 1.1 * d + 1e-9) {
        ++out_of_band;
      }
    }
  }
  CHECK(out_of_band == 0);
}

TEST_CASE("datasets stay on free cells and respect regime shapes") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);

  const TrajectoryDataset navigate =
      generate_dataset(maze, DataRegime::kNavigate, 60000, 11);
  const TrajectoryDataset stitch =
      generate_dataset(maze, DataRegime::kStitch, 20000, 12);
  const TrajectoryDataset explore =
      generate_dataset(maze, DataRegime::kExplore, 20000, 13);

  for (const TrajectoryDataset* ds : {&navigate, &stitch, &explore}) {
    Index transitions = 0;
    int off_grid = 0;
    for (const Trajectory& traj : ds->trajectories()) {
      transitions += traj.length() - 1;
      for (Index t = 0; t < traj.length(); ++t) {
        const Cell c{static_cast<int>(traj.states(t, 0)),
                     static_cast<int>(traj.states(t, 1))};
        if (!maze.free_cell(c)) {
          ++off_grid;
        }
      }
    }
    CHECK(off_grid == 0);
    CHECK(transitions >= 20000);
  }

  // Stitch trajectories are hops of bounded length.
  Index longest = 0;
  for (const Trajectory& traj : stitch.trajectories()) {
    longest = std::max(longest, traj.length());
  }
  CHECK(longest <= 48);

  // The noisy expert still reaches its goal in nearly every navigate
  // trajectory; reaching it is what sets the terminal flag.
  Index reached = 0;
  const Index n_navigate =
      static_cast<Index>(navigate.trajectories().size());
  REQUIRE(n_navigate >= 1000);
  for (const Trajectory& traj : navigate.trajectories()) {
    reached += traj.terminal ? 1 : 0;
  }
  CHECK(static_cast<Scalar>(reached) >= 0.9 * static_cast<Scalar>(n_navigate));

  // Random walks never claim to have finished anything.
  for (const Trajectory& traj : explore.trajectories()) {
    REQUIRE(!traj.terminal);
  }

  CHECK(explore.content_hash() ==
        generate_dataset(maze, DataRegime::kExplore, 20000, 13).content_hash());
  CHECK(explore.content_hash() !=
        generate_dataset(maze, DataRegime::kExplore, 20000, 14).content_hash());

  CHECK_THROWS_AS(generate_dataset(maze, DataRegime::kExplore, 0, 1),
                  InputError);
}

TEST_CASE("regime names parse") {
  CHECK(data_regime_from_string("navigate") == DataRegime::kNavigate);
  CHECK(data_regime_from_string("stitch") == DataRegime::kStitch);
  CHECK(data_regime_from_string("explore") == DataRegime::kExplore);
  CHECK_THROWS_AS(data_regime_from_string("wander"), InputError);
}

TEST_CASE("derived tasks are frozen per maze") {
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance oracle(maze);

  const auto tasks = derive_tasks(maze, oracle, 5);
  REQUIRE(tasks.size() == 5);
  const std::vector<std::pair<Cell, Cell>> expected = {
      {{1, 13}, {13, 1}}, {{1, 1}, {13, 13}}, {{13, 1}, {1, 13}},
      {{13, 13}, {1, 1}}, {{7, 7}, {1, 3}}};
  const int expected_d[5] = {32, 40, 32, 40, 26};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(tasks[i].first == expected[i].first);
    CHECK(tasks[i].second == expected[i].second);
    CHECK(oracle.exact(tasks[i].first, tasks[i].second) == expected_d[i]);
  }

  const auto prefix = derive_tasks(maze, oracle, 3);
  REQUIRE(prefix.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(prefix[i] == tasks[i]);
  }
  CHECK(derive_tasks(maze, oracle, 0).empty());
  CHECK_THROWS_AS(derive_tasks(maze, oracle, 6), InputError);
}

TEST_CASE("environment handle steps the maze and reports arrival") {
  const MazeGrid room = MazeGrid::from_ascii(kOpenRoom);
  EnvHandle env = make_env(room, {2, 2});

  StateVector s = env.step(static_cast<Action>(MoveAction::kEast));
  CHECK(room.to_cell(s) == Cell{3, 2});
  s = env.step(static_cast<Action>(MoveAction::kNorth));
  CHECK(room.to_cell(s) == Cell{3, 1});
  s = env.step(static_cast<Action>(MoveAction::kNorth));  // blocked by border
  CHECK(room.to_cell(s) == Cell{3, 1});

  CHECK(env.reached(s, room.to_state({3, 1})));
  CHECK(!env.reached(s, room.to_state({4, 1})));

  CHECK_THROWS_AS(env.step(9), InputError);
  CHECK_THROWS_AS(make_env(room, {0, 0}), InputError);
}

TEST_CASE("one-shot success decays as the goal moves out") {
  // Miniature of the distance sweep with the default reliability profile
  // and budget 1.5 n. The decay shows up once the distance climbs the
  // unreliable part of the profile; at short range the growing budget slack
  // can locally offset it (n = 2 leaves one spare step, n = 20 leaves ten),
  // so the test compares a ramp pair, 20 versus 40.
  const MazeGrid maze = MazeGrid::preset(MazePreset::kMedium);
  const OracleDistance oracle(maze);
  const ReliabilityProfile profile{};
  SyntheticPolicy policy(maze, oracle, profile, 0);

  auto success_rate = [&](int n, int rollouts) {
    std::vector<std::pair<Cell, Cell>> pairs;
    for (const Cell& a : maze.free_cells()) {
      for (const Cell& b : maze.free_cells()) {
        if (oracle.exact(a, b) == n) {
          pairs.push_back({a, b});
        }
      }
    }
    REQUIRE(!pairs.empty());
    int wins = 0;
    const Index budget = static_cast<Index>(1.5 * n);
    for (int r = 0; r < rollouts; ++r) {
      Rng pick(mix_seed({909, static_cast<std::uint64_t>(n),
                         static_cast<std::uint64_t>(r)}));
      const auto [start, goal] = pairs[bounded(pick, pairs.size())];
      policy.reseed(mix_seed({910, static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(r)}));
      Cell at = start;
      for (Index step = 0; step < budget && !(at == goal); ++step) {
        at = maze.step(at, policy.act(at, goal));
      }
      wins += at == goal ? 1 : 0;
    }
    return static_cast<Scalar>(wins) / static_cast<Scalar>(rollouts);
  };

  const Scalar near = success_rate(20, 200);
  const Scalar far = success_rate(40, 200);
  CHECK(near > 0.95);
  CHECK(far < near);
}
