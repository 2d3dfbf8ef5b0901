#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ttgs/dataset.hpp"
#include "ttgs/distance.hpp"
#include "ttgs/planner.hpp"
#include "ttgs/rng.hpp"
#include "ttgs/types.hpp"

namespace ttgs {

// Grid coordinates: x is the column, y is the row, (0, 0) is the top-left
// corner of the ASCII rendering. North decreases y.
struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell&) const = default;
};

// Action order matters: ties in the synthetic policy resolve in N, S, E, W
// order, and this is also the action encoding used by the env handle.
enum class MoveAction : Action {
  kNorth = 0,
  kSouth = 1,
  kEast = 2,
  kWest = 3,
  kStay = 4,
};

enum class MazePreset { kMedium, kLarge, kGiant };
MazePreset maze_preset_from_string(const std::string& s);

// A rectangular grid of wall/free cells. Mazes are always bordered by walls
// and their free cells form a single connected component; construction
// validates both.
class MazeGrid {
 public:
  static MazeGrid preset(MazePreset which);

  // Recursive-division maze; width and height must be odd and >= 5.
  static MazeGrid random(int width, int height, std::uint64_t seed);

  // '#' wall, '.' free, one row per line.
  static MazeGrid from_ascii(std::string_view ascii);
  std::string to_ascii() const;

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  bool wall(Cell c) const { return walls_[index(c)] != 0; }
  bool free_cell(Cell c) const { return in_bounds(c) && !wall(c); }

  // Moving into a wall (or off the grid) leaves the agent in place.
  Cell step(Cell from, MoveAction action) const;

  const std::vector<Cell>& free_cells() const { return free_cells_; }
  Index num_free() const { return static_cast<Index>(free_cells_.size()); }
  // Compact id of a free cell in free_cells() order, -1 for walls.
  Index cell_id(Cell c) const { return in_bounds(c) ? ids_[index(c)] : -1; }

  StateVector to_state(Cell c) const;
  Cell to_cell(ConstRef<StateVector> state) const;  // rounds, must be free

 private:
  MazeGrid() = default;
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  void finalize(const std::string& what);  // builds ids, validates

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> walls_;
  std::vector<Cell> free_cells_;
  std::vector<Index> ids_;
};

// All-pairs BFS step distances between free cells. exact() is the true step
// count; query() optionally applies deterministic multiplicative noise in
// [1 - eta, 1 + eta] (a fixed function of the cell pair and the noise seed)
// and an asymmetry toggle that stretches queries from a higher cell id to a
// lower one by 1.5x.
class OracleDistance {
 public:
  explicit OracleDistance(const MazeGrid& maze);

  int exact(Cell a, Cell b) const;
  Scalar query(Cell a, Cell b) const;

  void set_noise(Scalar eta, std::uint64_t seed);
  void set_asymmetric(bool on) { asymmetric_ = on; }
  Scalar noise_eta() const { return eta_; }
  std::uint64_t noise_seed() const { return noise_seed_; }
  bool asymmetric() const { return asymmetric_; }

  int diameter() const { return diameter_; }

 private:
  const MazeGrid* maze_;
  Index n_ = 0;
  std::vector<std::int32_t> dist_;  // n_ x n_
  int diameter_ = 0;
  Scalar eta_ = 0.0;
  std::uint64_t noise_seed_ = 0;
  bool asymmetric_ = false;
};

// Probability of a correct move as a function of the true distance to the
// current subgoal: r_near up to d_reliable, then linear decay to r_far at
// d_max, constant beyond.
struct ReliabilityProfile {
  Scalar r_near = 0.97;
  Scalar r_far = 0.25;
  Scalar d_reliable = 12.0;
  Scalar d_max = 60.0;

  void validate() const;
  Scalar at(Scalar d) const;
};

// First move of a BFS shortest path from `from` to `to`; among equally good
// moves the first in N, S, E, W order wins. `from == to` yields kStay.
MoveAction first_step_towards(const MazeGrid& maze, const OracleDistance& oracle,
                              Cell from, Cell to);

// The full deterministic expert path, endpoints included.
std::vector<Cell> shortest_path_cells(const MazeGrid& maze,
                                      const OracleDistance& oracle, Cell from,
                                      Cell to);

// Distance-limited goal-reaching policy: with probability r(d) it takes the
// expert move toward the subgoal, otherwise a uniformly random legal move.
class SyntheticPolicy {
 public:
  SyntheticPolicy(const MazeGrid& maze, const OracleDistance& oracle,
                  ReliabilityProfile profile, std::uint64_t seed);

  MoveAction act(Cell state, Cell subgoal);
  void reseed(std::uint64_t seed) { rng_.seed(seed); }
  const ReliabilityProfile& profile() const { return profile_; }

  // Adapter for the planner's control loop; captures `this`, so the policy
  // must outlive the returned callable.
  PolicyFn as_policy_fn();

 private:
  const MazeGrid* maze_;
  const OracleDistance* oracle_;
  ReliabilityProfile profile_;
  Rng rng_;
};

enum class DataRegime { kNavigate, kStitch, kExplore };
DataRegime data_regime_from_string(const std::string& s);

// Noise level of the noisy-expert walks in the navigate/stitch regimes.
inline constexpr Scalar kMoveNoise = 0.2;
// Reference tau used to cap stitch trajectories (cap = 4 * kTauDefaultStitch
// states per trajectory).
inline constexpr Scalar kTauDefaultStitch = 12.0;

// Generates trajectories until at least n_transitions environment steps are
// collected. navigate: noisy-expert walks to a random goal, capped near the
// maze diameter; stitch: short noisy-expert hops between nearby endpoints;
// explore: uniform random walks.
TrajectoryDataset generate_dataset(const MazeGrid& maze, DataRegime regime,
                                   Index n_transitions, std::uint64_t seed);

// Value oracle for the two value conventions (V = gamma^d or
// V = -(1 - gamma^d)/(1 - gamma)) or the raw distance for the quasimetric
// convention, all driven by OracleDistance::query. The returned callable
// keeps pointers to maze and oracle; both must outlive it.
ValueFn synthetic_value(const MazeGrid& maze, const OracleDistance& oracle,
                        DiscountFactor gamma, RewardConvention convention);

// Canonical id of that value source, folded into predictor fingerprints.
std::string synthetic_value_id(const MazeGrid& maze,
                               const OracleDistance& oracle,
                               DiscountFactor gamma,
                               RewardConvention convention);

// Control-loop adapter. The environment owns the current position (starting
// at `start`) and declares success when state and goal round to the same
// cell. Captures the maze by pointer; the maze must outlive the handle.
EnvHandle make_env(const MazeGrid& maze, Cell start);

// Five fixed start/goal pairs per maze, derived deterministically from the
// layout (corner-to-corner crossings plus a center-to-farthest task; see
// README). n must be in [0, 5].
std::vector<std::pair<Cell, Cell>> derive_tasks(const MazeGrid& maze,
                                                const OracleDistance& oracle,
                                                Index n);

}  // namespace ttgs
