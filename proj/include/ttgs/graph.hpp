#pragma once

#include <filesystem>
#include <vector>

#include "ttgs/dataset.hpp"
#include "ttgs/distance.hpp"
#include "ttgs/types.hpp"

namespace ttgs {

// Dense all-pairs predicted distances between vertices; entries(i, j) is the
// predicted step count from vertex i to vertex j (row-major, not symmetric
// in general). Every entry is finite and >= 1.
struct DistanceMatrix {
  RowMatrix entries;

  Index size() const { return entries.rows(); }
};

// Distance matrix with the soft-horizon penalty applied, plus everything
// needed to plan over it and to detect a stale cache.
class PlanningGraph {
 public:
  PlanningGraph(VertexSet vertices, RowMatrix weights, Scalar tau,
                Digest predictor_fingerprint);

  Index size() const { return weights_.rows(); }
  const VertexSet& vertices() const { return vertices_; }
  ConstRef<StateVector> vertex_state(Index i) const;
  const RowMatrix& weights() const { return weights_; }
  Scalar tau() const { return tau_; }
  const Digest& predictor_fingerprint() const { return fingerprint_; }

 private:
  VertexSet vertices_;
  RowMatrix weights_;
  Scalar tau_;
  Digest fingerprint_;
};

// Vertex index sequence of a shortest path; waypoint_states mirrors the
// indices (one state per row). cost is the sum of traversed edge weights.
struct GuidePath {
  std::vector<Index> waypoint_indices;
  RowMatrix waypoint_states;
  Scalar cost = 0.0;

  Index length() const { return static_cast<Index>(waypoint_indices.size()); }
};

// Evaluates the predictor on all ordered vertex pairs. batch_size only
// controls chunking (and with it how work is split across workers); the
// result is identical for any batch size. workers <= 1 runs serially.
DistanceMatrix build_distance_matrix(const DistancePredictor& predictor,
                                     const VertexSet& vertices,
                                     Index batch_size = 1024, int workers = 1);

// Soft-horizon penalty: edges up to tau predicted steps keep their distance,
// longer edges blow up as w = D * 1000^(D / tau), and self-loops are +inf.
// Weights whose logarithm exceeds the largest finite double become +inf.
RowMatrix penalized_weights(const DistanceMatrix& distances, Scalar tau);

PlanningGraph apply_penalty(const DistanceMatrix& distances, Scalar tau,
                            VertexSet vertices, Digest predictor_fingerprint);

// Dijkstra over the dense weight matrix with a binary heap. Deterministic:
// among equal-cost predecessors the lowest vertex index wins. source ==
// target yields the single-waypoint path with cost 0. Throws NoPathError
// when the target is unreachable.
GuidePath shortest_path(const PlanningGraph& graph, Index source, Index target);

// Vertex closest to the state under predicted distance state -> vertex
// (nearest_vertex_from) or vertex -> goal (nearest_vertex_to). Ties break to
// the lowest vertex index.
Index nearest_vertex_from(ConstRef<StateVector> state, const PlanningGraph& graph,
                          const DistancePredictor& predictor);
Index nearest_vertex_to(ConstRef<StateVector> goal, const PlanningGraph& graph,
                        const DistancePredictor& predictor);

// Binary graph cache; layout documented in the README. Round-trips are
// bit-exact as long as vertex states are exactly representable in float32
// (always true for the built-in simulator).
void save_graph(const PlanningGraph& graph, const std::filesystem::path& path);
PlanningGraph load_graph(const std::filesystem::path& path);

// Same, but rejects a cache whose stored fingerprint differs from the
// predictor that is about to plan on it.
PlanningGraph load_graph(const std::filesystem::path& path,
                         const Digest& expected_fingerprint);

}  // namespace ttgs
