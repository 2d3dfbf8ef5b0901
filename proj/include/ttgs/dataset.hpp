#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ttgs/hash.hpp"
#include "ttgs/types.hpp"

namespace ttgs {

class DistancePredictor;

// One rollout: states as rows, plus whether the episode actually ended here
// (as opposed to being truncated).
struct Trajectory {
  StateMatrix states;
  bool terminal = false;

  Index length() const { return states.rows(); }
};

// A nonempty collection of trajectories with a common state dimension.
class TrajectoryDataset {
 public:
  explicit TrajectoryDataset(std::vector<Trajectory> trajectories);

  Index state_dim() const { return state_dim_; }
  Index num_trajectories() const { return static_cast<Index>(trajectories_.size()); }
  Index total_states() const { return total_states_; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  const Trajectory& trajectory(Index i) const { return trajectories_.at(i); }

  // SHA-256 over the binary serialization; used to key graph caches.
  Digest content_hash() const;

 private:
  std::vector<Trajectory> trajectories_;
  Index state_dim_ = 0;
  Index total_states_ = 0;
};

// Position of a single state within a dataset.
struct StateIndex {
  Index trajectory = 0;
  Index time = 0;

  bool operator==(const StateIndex&) const = default;
};

// Graph vertices: sampled states (one per row) plus where each came from and
// the seed that produced the sample.
struct VertexSet {
  StateMatrix states;
  std::vector<StateIndex> provenance;
  std::uint64_t seed = 0;

  Index size() const { return states.rows(); }
};

// Loads either format; binary files are recognized by their magic bytes,
// anything else is parsed as JSON-lines text. Errors carry line numbers
// (text) or byte offsets (binary).
TrajectoryDataset load_dataset(const std::filesystem::path& path);

// Text: one JSON object {"states": [[...], ...], "terminal": bool} per line.
void save_dataset_text(const TrajectoryDataset& dataset,
                       const std::filesystem::path& path);

// Binary companion format for bulk data; see the project README for the
// exact layout.
void save_dataset_binary(const TrajectoryDataset& dataset,
                         const std::filesystem::path& path);

// m distinct (trajectory, time) positions, uniform without replacement.
// Deterministic given (dataset, m, seed); errors when m exceeds the number
// of states or m <= 0.
VertexSet uniform_sample(const TrajectoryDataset& dataset, Index m,
                         std::uint64_t seed);

// Keeps indices t whose h-step lookahead is covered efficiently by the
// predictor: 1 - eps <= d(s_t, s_{t+h}) / h <= 1 + eps. Indices with
// t + h out of range contribute nothing.
std::vector<StateIndex> temporal_efficiency_filter(
    const TrajectoryDataset& dataset, const DistancePredictor& predictor,
    Index horizon, Scalar eps = 0.005);

// Single-pass greedy clustering of the candidate states under predicted
// distance. The first candidate seeds the first center; a candidate farther
// than radius from every center becomes a new center; otherwise it joins its
// nearest center (ties to the lowest center index). After every update_batch
// assignments, and once at the end, each center is re-elected as the member
// minimizing the total predicted distance to its cluster.
VertexSet greedy_cluster(const TrajectoryDataset& dataset,
                         const std::vector<StateIndex>& candidates,
                         const DistancePredictor& predictor, Scalar radius,
                         Index update_batch = 256);

}  // namespace ttgs
