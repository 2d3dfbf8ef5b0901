#include "ttgs/simenv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <memory>
#include <sstream>

#include "ttgs/hash.hpp"

namespace ttgs {

namespace {

std::string format_scalar(Scalar x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

constexpr MoveAction kDirections[4] = {MoveAction::kNorth, MoveAction::kSouth,
                                       MoveAction::kEast, MoveAction::kWest};

}  // namespace

MazePreset maze_preset_from_string(const std::string& s) {
  if (s == "medium") return MazePreset::kMedium;
  if (s == "large") return MazePreset::kLarge;
  if (s == "giant") return MazePreset::kGiant;
  throw InputError("unknown maze preset '" + s +
                   "' (expected medium|large|giant)");
}

DataRegime data_regime_from_string(const std::string& s) {
  if (s == "navigate") return DataRegime::kNavigate;
  if (s == "stitch") return DataRegime::kStitch;
  if (s == "explore") return DataRegime::kExplore;
  throw InputError("unknown data regime '" + s +
                   "' (expected navigate|stitch|explore)");
}

void MazeGrid::finalize(const std::string& what) {
  if (width_ < 3 || height_ < 3) {
    throw InputError(what + ": maze must be at least 3x3");
  }
  for (int x = 0; x < width_; ++x) {
    if (!wall({x, 0}) || !wall({x, height_ - 1})) {
      throw InputError(what + ": maze border must be walls");
    }
  }
  for (int y = 0; y < height_; ++y) {
    if (!wall({0, y}) || !wall({width_ - 1, y})) {
      throw InputError(what + ": maze border must be walls");
    }
  }
  ids_.assign(walls_.size(), -1);
  free_cells_.clear();
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!wall({x, y})) {
        ids_[index({x, y})] = static_cast<Index>(free_cells_.size());
        free_cells_.push_back({x, y});
      }
    }
  }
  if (free_cells_.empty()) {
    throw InputError(what + ": maze has no free cells");
  }
  // Flood fill from the first free cell; every free cell must be reachable.
  std::vector<char> seen(free_cells_.size(), 0);
  std::deque<Cell> queue{free_cells_.front()};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (MoveAction a : kDirections) {
      const Cell n = step(c, a);
      const Index id = cell_id(n);
      if (id >= 0 && !seen[static_cast<std::size_t>(id)]) {
        seen[static_cast<std::size_t>(id)] = 1;
        ++reached;
        queue.push_back(n);
      }
    }
  }
  if (reached != free_cells_.size()) {
    throw InputError(what + ": free cells are not connected (" +
                     std::to_string(reached) + " of " +
                     std::to_string(free_cells_.size()) + " reachable)");
  }
}

MazeGrid MazeGrid::from_ascii(std::string_view ascii) {
  MazeGrid maze;
  std::vector<std::string> rows;
  std::string row;
  std::istringstream in{std::string(ascii)};
  while (std::getline(in, row)) {
    if (!row.empty() && row.back() == '\r') {
      row.pop_back();
    }
    if (row.empty()) {
      continue;
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw InputError("maze ascii: no rows");
  }
  maze.height_ = static_cast<int>(rows.size());
  maze.width_ = static_cast<int>(rows.front().size());
  maze.walls_.assign(static_cast<std::size_t>(maze.width_) *
                         static_cast<std::size_t>(maze.height_),
                     0);
  for (int y = 0; y < maze.height_; ++y) {
    if (static_cast<int>(rows[static_cast<std::size_t>(y)].size()) !=
        maze.width_) {
      throw InputError("maze ascii: row " + std::to_string(y) +
                       " has a different length");
    }
    for (int x = 0; x < maze.width_; ++x) {
      const char c = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      if (c == '#') {
        maze.walls_[maze.index({x, y})] = 1;
      } else if (c != '.') {
        throw InputError(std::string("maze ascii: unexpected character '") +
                         c + "' (expected '#' or '.')");
      }
    }
  }
  maze.finalize("maze ascii");
  return maze;
}

std::string MazeGrid::to_ascii() const {
  std::string out;
  out.reserve(static_cast<std::size_t>((width_ + 1) * height_));
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      out.push_back(wall({x, y}) ? '#' : '.');
    }
    out.push_back('\n');
  }
  return out;
}

MazeGrid MazeGrid::random(int width, int height, std::uint64_t seed) {
  if (width < 5 || height < 5 || width % 2 == 0 || height % 2 == 0) {
    throw InputError("random maze: width and height must be odd and >= 5");
  }
  MazeGrid maze;
  maze.width_ = width;
  maze.height_ = height;
  maze.walls_.assign(static_cast<std::size_t>(width) *
                         static_cast<std::size_t>(height),
                     0);
  for (int x = 0; x < width; ++x) {
    maze.walls_[maze.index({x, 0})] = 1;
    maze.walls_[maze.index({x, height - 1})] = 1;
  }
  for (int y = 0; y < height; ++y) {
    maze.walls_[maze.index({0, y})] = 1;
    maze.walls_[maze.index({width - 1, y})] = 1;
  }

  Rng rng(seed);
  // Recursive division on the odd grid: dividing walls sit on even
  // coordinates, doors on odd ones, so doors are never blocked later.
  auto divide = [&](auto&& self, int x0, int y0, int x1, int y1) -> void {
    const bool can_v = x1 - x0 >= 2;
    const bool can_h = y1 - y0 >= 2;
    if (!can_v && !can_h) {
      return;
    }
    bool vertical;
    if (can_v && can_h) {
      if (x1 - x0 != y1 - y0) {
        vertical = x1 - x0 > y1 - y0;
      } else {
        vertical = bounded(rng, 2) == 0;
      }
    } else {
      vertical = can_v;
    }
    if (vertical) {
      const int n_lines = (x1 - x0) / 2;
      const int wx = x0 + 1 + 2 * static_cast<int>(bounded(rng, n_lines));
      const int n_doors = (y1 - y0) / 2 + 1;
      const int dy = y0 + 2 * static_cast<int>(bounded(rng, n_doors));
      for (int y = y0; y <= y1; ++y) {
        if (y != dy) {
          maze.walls_[maze.index({wx, y})] = 1;
        }
      }
      self(self, x0, y0, wx - 1, y1);
      self(self, wx + 1, y0, x1, y1);
    } else {
      const int n_lines = (y1 - y0) / 2;
      const int wy = y0 + 1 + 2 * static_cast<int>(bounded(rng, n_lines));
      const int n_doors = (x1 - x0) / 2 + 1;
      const int dx = x0 + 2 * static_cast<int>(bounded(rng, n_doors));
      for (int x = x0; x <= x1; ++x) {
        if (x != dx) {
          maze.walls_[maze.index({x, wy})] = 1;
        }
      }
      self(self, x0, y0, x1, wy - 1);
      self(self, x0, wy + 1, x1, y1);
    }
  };
  divide(divide, 1, 1, width - 2, height - 2);
  maze.finalize("random maze");
  return maze;
}

Cell MazeGrid::step(Cell from, MoveAction action) const {
  Cell to = from;
  switch (action) {
    case MoveAction::kNorth: to.y -= 1; break;
    case MoveAction::kSouth: to.y += 1; break;
    case MoveAction::kEast: to.x += 1; break;
    case MoveAction::kWest: to.x -= 1; break;
    case MoveAction::kStay: return from;
  }
  return free_cell(to) ? to : from;
}

StateVector MazeGrid::to_state(Cell c) const {
  StateVector s(2);
  s << static_cast<Scalar>(c.x), static_cast<Scalar>(c.y);
  return s;
}

Cell MazeGrid::to_cell(ConstRef<StateVector> state) const {
  if (state.size() != 2) {
    throw InputError("maze state must be 2-dimensional, got " +
                     std::to_string(state.size()));
  }
  const Cell c{static_cast<int>(std::llround(state[0])),
               static_cast<int>(std::llround(state[1]))};
  if (!free_cell(c)) {
    throw InputError("state (" + std::to_string(state[0]) + ", " +
                     std::to_string(state[1]) +
                     ") does not round to a free maze cell");
  }
  return c;
}

OracleDistance::OracleDistance(const MazeGrid& maze) : maze_(&maze) {
  n_ = maze.num_free();
  dist_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), -1);
  std::vector<Index> frontier;
  for (Index src = 0; src < n_; ++src) {
    auto row = dist_.begin() + static_cast<std::ptrdiff_t>(src * n_);
    row[src] = 0;
    frontier.assign(1, src);
    std::int32_t depth = 0;
    std::vector<Index> next;
    while (!frontier.empty()) {
      ++depth;
      next.clear();
      for (Index id : frontier) {
        const Cell c = maze.free_cells()[static_cast<std::size_t>(id)];
        for (MoveAction a : kDirections) {
          const Cell nb = maze.step(c, a);
          const Index nid = maze.cell_id(nb);
          if (nid != id && row[nid] < 0) {
            row[nid] = depth;
            next.push_back(nid);
          }
        }
      }
      frontier.swap(next);
    }
    diameter_ = std::max(
        diameter_, *std::max_element(row, row + static_cast<std::ptrdiff_t>(n_)));
  }
}

int OracleDistance::exact(Cell a, Cell b) const {
  const Index ia = maze_->cell_id(a);
  const Index ib = maze_->cell_id(b);
  if (ia < 0 || ib < 0) {
    throw InputError("oracle distance: both endpoints must be free cells");
  }
  return dist_[static_cast<std::size_t>(ia * n_ + ib)];
}

void OracleDistance::set_noise(Scalar eta, std::uint64_t seed) {
  if (!std::isfinite(eta) || eta < 0.0 || eta >= 1.0) {
    throw InputError("oracle noise level must lie in [0, 1)");
  }
  eta_ = eta;
  noise_seed_ = seed;
}

Scalar OracleDistance::query(Cell a, Cell b) const {
  const Index ia = maze_->cell_id(a);
  const Index ib = maze_->cell_id(b);
  if (ia < 0 || ib < 0) {
    throw InputError("oracle distance: both endpoints must be free cells");
  }
  Scalar d = static_cast<Scalar>(dist_[static_cast<std::size_t>(ia * n_ + ib)]);
  if (eta_ > 0.0) {
    const std::uint64_t h =
        mix_seed({noise_seed_, static_cast<std::uint64_t>(ia),
                  static_cast<std::uint64_t>(ib)});
    const Scalar u = static_cast<Scalar>(h >> 11) * 0x1.0p-53;
    d *= 1.0 - eta_ + 2.0 * eta_ * u;
  }
  if (asymmetric_ && ia > ib) {
    d *= 1.5;
  }
  return d;
}

void ReliabilityProfile::validate() const {
  if (!(r_far >= 0.0) || !(r_near <= 1.0) || !(r_far <= r_near)) {
    throw InputError("reliability profile: need 0 <= r_far <= r_near <= 1");
  }
  if (!(d_reliable > 0.0) || !(d_max > d_reliable)) {
    throw InputError("reliability profile: need 0 < d_reliable < d_max");
  }
}

Scalar ReliabilityProfile::at(Scalar d) const {
  if (d <= d_reliable) {
    return r_near;
  }
  if (d >= d_max) {
    return r_far;
  }
  return r_near + (d - d_reliable) * (r_far - r_near) / (d_max - d_reliable);
}

MoveAction first_step_towards(const MazeGrid& maze, const OracleDistance& oracle,
                              Cell from, Cell to) {
  if (from == to) {
    return MoveAction::kStay;
  }
  const int d = oracle.exact(from, to);
  for (MoveAction a : kDirections) {
    const Cell next = maze.step(from, a);
    if (!(next == from) && oracle.exact(next, to) == d - 1) {
      return a;
    }
  }
  throw Error("first_step_towards: no descending neighbor (corrupt oracle?)");
}

std::vector<Cell> shortest_path_cells(const MazeGrid& maze,
                                      const OracleDistance& oracle, Cell from,
                                      Cell to) {
  std::vector<Cell> cells{from};
  Cell cur = from;
  while (!(cur == to)) {
    cur = maze.step(cur, first_step_towards(maze, oracle, cur, to));
    cells.push_back(cur);
  }
  return cells;
}

SyntheticPolicy::SyntheticPolicy(const MazeGrid& maze,
                                 const OracleDistance& oracle,
                                 ReliabilityProfile profile, std::uint64_t seed)
    : maze_(&maze), oracle_(&oracle), profile_(profile), rng_(seed) {
  profile_.validate();
}

MoveAction SyntheticPolicy::act(Cell state, Cell subgoal) {
  const Scalar d = static_cast<Scalar>(oracle_->exact(state, subgoal));
  const Scalar p = profile_.at(d);
  if (uniform_unit(rng_) < p) {
    return first_step_towards(*maze_, *oracle_, state, subgoal);
  }
  MoveAction legal[4];
  std::size_t n_legal = 0;
  for (MoveAction a : kDirections) {
    if (!(maze_->step(state, a) == state)) {
      legal[n_legal++] = a;
    }
  }
  if (n_legal == 0) {
    return MoveAction::kStay;
  }
  return legal[bounded(rng_, n_legal)];
}

PolicyFn SyntheticPolicy::as_policy_fn() {
  return [this](ConstRef<StateVector> state, ConstRef<StateVector> subgoal) {
    return static_cast<Action>(
        act(maze_->to_cell(state), maze_->to_cell(subgoal)));
  };
}

namespace {

Cell random_free_cell(const MazeGrid& maze, Rng& rng) {
  return maze.free_cells()[bounded(
      rng, static_cast<std::uint64_t>(maze.num_free()))];
}

// Noisy-expert walk toward `goal`: expert move with probability
// 1 - kMoveNoise, otherwise a random legal move. Stops on arrival or when
// cap_states states have been collected.
std::vector<Cell> noisy_expert_walk(const MazeGrid& maze,
                                    const OracleDistance& oracle, Cell start,
                                    Cell goal, Index cap_states, Rng& rng) {
  std::vector<Cell> cells{start};
  Cell cur = start;
  while (!(cur == goal) && static_cast<Index>(cells.size()) < cap_states) {
    MoveAction a;
    if (uniform_unit(rng) < kMoveNoise) {
      MoveAction legal[4];
      std::size_t n_legal = 0;
      for (MoveAction dir : kDirections) {
        if (!(maze.step(cur, dir) == cur)) {
          legal[n_legal++] = dir;
        }
      }
      a = n_legal > 0 ? legal[bounded(rng, n_legal)] : MoveAction::kStay;
    } else {
      a = first_step_towards(maze, oracle, cur, goal);
    }
    cur = maze.step(cur, a);
    cells.push_back(cur);
  }
  return cells;
}

Trajectory cells_to_trajectory(const std::vector<Cell>& cells,
                               bool terminal) {
  Trajectory traj;
  traj.terminal = terminal;
  traj.states.resize(static_cast<Index>(cells.size()), 2);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    traj.states(static_cast<Index>(i), 0) = static_cast<Scalar>(cells[i].x);
    traj.states(static_cast<Index>(i), 1) = static_cast<Scalar>(cells[i].y);
  }
  return traj;
}

}  // namespace

TrajectoryDataset generate_dataset(const MazeGrid& maze, DataRegime regime,
                                   Index n_transitions, std::uint64_t seed) {
  if (n_transitions < 1) {
    throw InputError("generate_dataset: n_transitions must be >= 1");
  }
  if (maze.num_free() < 2) {
    throw InputError("generate_dataset: maze has fewer than two free cells");
  }
  const OracleDistance oracle(maze);
  Rng rng(seed);
  std::vector<Trajectory> trajectories;
  Index total = 0;

  const Index stitch_cap = static_cast<Index>(4 * kTauDefaultStitch);  // states
  const Index explore_cap = stitch_cap;
  const Index navigate_cap = std::max<Index>(2, 2 * oracle.diameter());
  const int stitch_radius = static_cast<int>(2 * kTauDefaultStitch);

  std::vector<Cell> nearby;  // scratch for stitch goal sampling
  while (total < n_transitions) {
    std::vector<Cell> cells;
    bool terminal = false;
    switch (regime) {
      case DataRegime::kNavigate: {
        const Cell start = random_free_cell(maze, rng);
        Cell goal = start;
        while (goal == start) {
          goal = random_free_cell(maze, rng);
        }
        cells = noisy_expert_walk(maze, oracle, start, goal, navigate_cap, rng);
        terminal = cells.back() == goal;
        break;
      }
      case DataRegime::kStitch: {
        const Cell start = random_free_cell(maze, rng);
        nearby.clear();
        for (const Cell& c : maze.free_cells()) {
          const int d = oracle.exact(start, c);
          if (d >= 1 && d <= stitch_radius) {
            nearby.push_back(c);
          }
        }
        Cell goal;
        if (nearby.empty()) {
          goal = start;
          while (goal == start) {
            goal = random_free_cell(maze, rng);
          }
        } else {
          goal = nearby[bounded(rng, nearby.size())];
        }
        cells = noisy_expert_walk(maze, oracle, start, goal, stitch_cap, rng);
        terminal = cells.back() == goal;
        break;
      }
      case DataRegime::kExplore: {
        Cell cur = random_free_cell(maze, rng);
        cells.push_back(cur);
        while (static_cast<Index>(cells.size()) < explore_cap) {
          MoveAction legal[4];
          std::size_t n_legal = 0;
          for (MoveAction dir : kDirections) {
            if (!(maze.step(cur, dir) == cur)) {
              legal[n_legal++] = dir;
            }
          }
          if (n_legal == 0) {
            break;
          }
          cur = maze.step(cur, legal[bounded(rng, n_legal)]);
          cells.push_back(cur);
        }
        break;
      }
    }
    if (cells.size() < 2) {
      continue;
    }
    total += static_cast<Index>(cells.size()) - 1;
    trajectories.push_back(cells_to_trajectory(cells, terminal));
  }
  return TrajectoryDataset(std::move(trajectories));
}

ValueFn synthetic_value(const MazeGrid& maze, const OracleDistance& oracle,
                        DiscountFactor gamma, RewardConvention convention) {
  const MazeGrid* m = &maze;
  const OracleDistance* o = &oracle;
  const Scalar g = gamma.value();
  switch (convention) {
    case RewardConvention::kSparseTerminal:
      return [m, o, g](ConstRef<StateVector> s, ConstRef<StateVector> t) {
        return std::pow(g, o->query(m->to_cell(s), m->to_cell(t)));
      };
    case RewardConvention::kPerStepPenalty:
      return [m, o, g](ConstRef<StateVector> s, ConstRef<StateVector> t) {
        const Scalar d = o->query(m->to_cell(s), m->to_cell(t));
        return -(1.0 - std::pow(g, d)) / (1.0 - g);
      };
    case RewardConvention::kQuasiMetric:
      return [m, o](ConstRef<StateVector> s, ConstRef<StateVector> t) {
        return o->query(m->to_cell(s), m->to_cell(t));
      };
    case RewardConvention::kEuclideanNormalized:
      throw InputError("synthetic_value: the euclidean convention needs no "
                       "value source");
  }
  throw Error("unknown reward convention");
}

std::string synthetic_value_id(const MazeGrid& maze,
                               const OracleDistance& oracle,
                               DiscountFactor gamma,
                               RewardConvention convention) {
  return std::string("oracle:conv=") + to_string(convention) +
         ";gamma=" + format_scalar(gamma.value()) +
         ";maze=" + hex(Sha256::of(maze.to_ascii())).substr(0, 12) +
         ";eta=" + format_scalar(oracle.noise_eta()) +
         ";nseed=" + std::to_string(oracle.noise_seed()) +
         ";asym=" + (oracle.asymmetric() ? "1" : "0");
}

EnvHandle make_env(const MazeGrid& maze, Cell start) {
  if (!maze.free_cell(start)) {
    throw InputError("environment start cell must be free");
  }
  const MazeGrid* m = &maze;
  auto cur = std::make_shared<Cell>(start);
  EnvHandle env;
  env.step = [m, cur](Action a) {
    if (a < 0 || a > static_cast<Action>(MoveAction::kStay)) {
      throw InputError("environment action out of range: " +
                       std::to_string(a));
    }
    *cur = m->step(*cur, static_cast<MoveAction>(a));
    return m->to_state(*cur);
  };
  env.reached = [m](ConstRef<StateVector> s, ConstRef<StateVector> g) {
    return m->to_cell(s) == m->to_cell(g);
  };
  return env;
}

std::vector<std::pair<Cell, Cell>> derive_tasks(const MazeGrid& maze,
                                                const OracleDistance& oracle,
                                                Index n) {
  if (n < 0 || n > 5) {
    throw InputError("derive_tasks: task count must lie in [0, 5]");
  }
  auto nearest_free = [&maze](Scalar tx, Scalar ty) {
    Cell best = maze.free_cells().front();
    Scalar best_d2 = kInfinity;
    for (const Cell& c : maze.free_cells()) {
      const Scalar dx = static_cast<Scalar>(c.x) - tx;
      const Scalar dy = static_cast<Scalar>(c.y) - ty;
      const Scalar d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    return best;
  };
  auto farthest_from = [&](Cell c) {
    Cell best = c;
    int best_d = -1;
    for (const Cell& other : maze.free_cells()) {
      const int d = oracle.exact(c, other);
      if (d > best_d) {
        best_d = d;
        best = other;
      }
    }
    return best;
  };
  const Scalar w = static_cast<Scalar>(maze.width() - 1);
  const Scalar h = static_cast<Scalar>(maze.height() - 1);
  const Cell bl = nearest_free(0.0, h);
  const Cell tl = nearest_free(0.0, 0.0);
  const Cell tr = nearest_free(w, 0.0);
  const Cell br = nearest_free(w, h);
  const Cell center = nearest_free(w / 2.0, h / 2.0);
  const std::vector<std::pair<Cell, Cell>> all = {
      {bl, tr}, {tl, br}, {tr, bl}, {br, tl}, {center, farthest_from(center)},
  };
  return {all.begin(), all.begin() + n};
}

namespace {

// Frozen layouts. Each was drawn from MazeGrid::random once and embedded so
// the presets never shift under generator changes; anyone can regenerate a
// comparable maze with MazeGrid::random and re-embed it here.
constexpr const char* kMediumAscii =
      "###############\n"
      "#...#.........#\n"
      "#.#.#.###.#.###\n"
      "#.#...#...#...#\n"
      "###########.###\n"
      "#...#.#.......#\n"
      "#.#.#.###.###.#\n"
      "#.#...#...#.#.#\n"
      "###.#.#.#.#.#.#\n"
      "#...#...#...#.#\n"
      "#.#####.#######\n"
      "#...#...#.#.#.#\n"
      "###.#.###.#.#.#\n"
      "#...#.........#\n"
      "###############\n";

constexpr const char* kLargeAscii =
      "#########################\n"
      "#...#.#.........#.....#.#\n"
      "###.#.###.#.#########.#.#\n"
      "#.....#...#...#...#...#.#\n"
      "#.#####.###.###.#.#.#.#.#\n"
      "#.....#...#...#.#...#.#.#\n"
      "#.#######.#.###.#.#####.#\n"
      "#.#.#.....#.....#.#...#.#\n"
      "#.#.#.###.###.###.#.#.#.#\n"
      "#.....#...#.....#...#.#.#\n"
      "###.###################.#\n"
      "#.....#.#.......#.#...#.#\n"
      "#.#.#.#.#.#.#.#.#.#.###.#\n"
      "#.#.#.#...#.#.#.#.#...#.#\n"
      "###.###.###.###.#.#.###.#\n"
      "#.#...#.#.....#...#.#.#.#\n"
      "#.#.#.#########.###.#.#.#\n"
      "#...#.....#.....#.#.....#\n"
      "#####.###.#.#####.###.#.#\n"
      "#.#...#...#.....#.#...#.#\n"
      "#.#.#.###.#####.#.###.#.#\n"
      "#...#.#.......#.#.#...#.#\n"
      "#.#####.###.###.#.#.###.#\n"
      "#.....#...#...........#.#\n"
      "#########################\n";

constexpr const char* kGiantAscii =
      "#############################################\n"
      "#...#.#...#.#...#...........#.#...........#.#\n"
      "###.#.#.###.#.#.#.#.#.###.#.#.#######.#####.#\n"
      "#.....#.......#...#.#.#...#...#.#.....#.#.#.#\n"
      "###.#.###.###.#.#########.#.###.###.#.#.#.#.#\n"
      "#...#.#.....#.#.....#.....#...#.....#.#...#.#\n"
      "#####.###.#########.###.#####.#.###.#.#.#.#.#\n"
      "#.....#...#...#.#.#.#.#...#...#.#...#...#...#\n"
      "#####.#.#.#.#.#.#.#.#.###.###.###.#########.#\n"
      "#.....#.#...#.#.....#.....#.#.#.#.#...#...#.#\n"
      "#.#.###.###.#.#####.#.#.#.#.#.#.#.#.#.#.###.#\n"
      "#.#.......#.#.#.....#.#.#.#...#.....#.....#.#\n"
      "#########.###########.#####.#####.###.###.#.#\n"
      "#.#...#.#.........#.#...#.#.......#...#...#.#\n"
      "#.#.#.#.#.###.###.#.###.#.###.#.#.###.###.#.#\n"
      "#...#.#.#...#...#...#.....#...#.#.#...#...#.#\n"
      "###.###.#.#####.###.#############.#########.#\n"
      "#.#...#.#...#.....#.#.....#.#.#...#.#...#.#.#\n"
      "#.#.#.#.###.#.#.#.#.#.#.###.#.###.#.#.###.#.#\n"
      "#...#.......#.#.#.#.#.#.......#...#.#.#...#.#\n"
      "#################.###.#####.###.###.#.#.#.#.#\n"
      "#.#.#...#...#.#.....#.....#.............#.#.#\n"
      "#.#.#.#.#.#.#.#.###.#####.###################\n"
      "#.....#...#.......#.#.....#...#...#...#...#.#\n"
      "#.#.#####.#.###.###.#.###.#.###.#####.#.###.#\n"
      "#.#.....#.#...#...#.#.#...#...#...#...#...#.#\n"
      "#########.###########.###.#.#.#.###.###.###.#\n"
      "#.#.....#.#.....#.#.#.#.#.#.#.#.......#.....#\n"
      "#.#.#.###.#####.#.#.#.#.#.#.###.#.#.###.###.#\n"
      "#.#.#...#.......#.#.#.#...#.....#.#...#...#.#\n"
      "#.###.###.###.#.#.#.#.###.#.#########.###.#.#\n"
      "#.#.....#.#...#.....#.#.......#...........#.#\n"
      "#.#.#.#.#.#.#####.#.#####.###################\n"
      "#...#.#.#.#.....#.#.#...#...#.#.#...#.....#.#\n"
      "#.#.#####.#############.###.#.#.#.#####.#.#.#\n"
      "#.#.........#...#...#...#.....#.#...#...#...#\n"
      "#.###.###.#.#.###.#####.#.###.#.#.#####.###.#\n"
      "#.#.#.#.#.#.#.....#.#...#...#.#.#...#.....#.#\n"
      "#.#.#.#.###.#.###.#.###.#.###.#.#.#######.###\n"
      "#.#.....#.......#...#.......#...........#.#.#\n"
      "#.#####.#######.#.###.#########.###.###.#.#.#\n"
      "#.#.#...#.....#.#...#.......#.#.#...#.....#.#\n"
      "#.#.###.#.#.#.#.#.###.#.#.###.#.###.#.#####.#\n"
      "#.#.....#.#.#...#...#.#.#.....#.#...#.......#\n"
      "#############################################\n";

}  // namespace

MazeGrid MazeGrid::preset(MazePreset which) {
  switch (which) {
    case MazePreset::kMedium: return MazeGrid::from_ascii(kMediumAscii);
    case MazePreset::kLarge: return MazeGrid::from_ascii(kLargeAscii);
    case MazePreset::kGiant: return MazeGrid::from_ascii(kGiantAscii);
  }
  throw Error("unknown maze preset");
}

}  // namespace ttgs
