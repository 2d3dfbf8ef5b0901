#include "ttgs/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <queue>
#include <thread>

#include "byteio.hpp"

namespace ttgs {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'G', 'G'};
constexpr std::uint8_t kFormatVersion = 1;

const Scalar kLogMaxWeight = std::log(std::numeric_limits<Scalar>::max());
const Scalar kLog1000 = std::log(1000.0);

void check_vertices(const VertexSet& vertices) {
  if (vertices.size() < 1) {
    throw InputError("vertex set is empty");
  }
  if (static_cast<Index>(vertices.provenance.size()) != vertices.size()) {
    throw InputError("vertex set provenance does not match state count");
  }
}

}  // namespace

PlanningGraph::PlanningGraph(VertexSet vertices, RowMatrix weights, Scalar tau,
                             Digest predictor_fingerprint)
    : vertices_(std::move(vertices)),
      weights_(std::move(weights)),
      tau_(tau),
      fingerprint_(predictor_fingerprint) {
  check_vertices(vertices_);
  if (weights_.rows() != weights_.cols() ||
      weights_.rows() != vertices_.size()) {
    throw InputError("planning graph: weight matrix shape does not match "
                     "vertex count");
  }
  if (!std::isfinite(tau_) || tau_ <= 0.0) {
    throw InputError("planning graph: tau must be positive and finite");
  }
  for (Index i = 0; i < weights_.rows(); ++i) {
    if (!std::isinf(weights_(i, i))) {
      throw InputError("planning graph: self-loop weight must be +inf");
    }
    for (Index j = 0; j < weights_.cols(); ++j) {
      const Scalar w = weights_(i, j);
      if (std::isnan(w) || w < 1.0) {
        throw InputError("planning graph: weights must be >= 1 (or +inf)");
      }
    }
  }
}

ConstRef<StateVector> PlanningGraph::vertex_state(Index i) const {
  return vertices_.states.row(i).transpose();
}

DistanceMatrix build_distance_matrix(const DistancePredictor& predictor,
                                     const VertexSet& vertices,
                                     Index batch_size, int workers) {
  check_vertices(vertices);
  if (batch_size < 1) {
    throw InputError("build_distance_matrix: batch_size must be >= 1");
  }
  const Index m = vertices.size();
  DistanceMatrix dm;
  dm.entries.resize(m, m);

  const Index total = m * m;
  const Index n_chunks = (total + batch_size - 1) / batch_size;

  auto fill_chunk = [&](Index chunk) {
    const Index begin = chunk * batch_size;
    const Index end = std::min(begin + batch_size, total);
    for (Index p = begin; p < end; ++p) {
      const Index i = p / m;
      const Index j = p % m;
      dm.entries(i, j) = predictor(vertices.states.row(i).transpose(),
                                   vertices.states.row(j).transpose())
                             .steps();
    }
  };

  if (workers <= 1 || n_chunks <= 1) {
    for (Index c = 0; c < n_chunks; ++c) {
      fill_chunk(c);
    }
  } else {
    // Chunks are claimed from a shared counter; every entry is written to
    // its own slot, so the result does not depend on scheduling.
    std::atomic<Index> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker_loop = [&] {
      try {
        for (;;) {
          const Index c = next.fetch_add(1);
          if (c >= n_chunks) {
            return;
          }
          fill_chunk(c);
        }
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(workers, static_cast<int>(n_chunks));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker_loop);
    }
    for (std::thread& t : pool) {
      t.join();
    }
    if (first_error) {
      std::rethrow_exception(first_error);
    }
  }
  return dm;
}

RowMatrix penalized_weights(const DistanceMatrix& distances, Scalar tau) {
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw InputError("penalized_weights: tau must be positive and finite");
  }
  const Index m = distances.size();
  if (m < 1 || distances.entries.cols() != m) {
    throw InputError("penalized_weights: distance matrix must be square and "
                     "nonempty");
  }
  RowMatrix w(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i == j) {
        w(i, j) = kInfinity;
        continue;
      }
      const Scalar d = distances.entries(i, j);
      if (std::isnan(d) || d < 1.0) {
        throw InputError("penalized_weights: distances must be >= 1");
      }
      if (d < tau) {
        w(i, j) = d;
        continue;
      }
      // Penalty p(d) = d * 1000^(d / tau). The log-space value decides
      // whether the result is representable; the direct product keeps exact
      // arithmetic for moderate d (e.g. p(tau) = 1000 * tau exactly).
      const Scalar exponent = d / tau;
      const Scalar log_p = std::log(d) + exponent * kLog1000;
      if (log_p >= kLogMaxWeight) {
        w(i, j) = kInfinity;
        continue;
      }
      const Scalar p = d * std::pow(1000.0, exponent);
      w(i, j) = std::isfinite(p) ? p : kInfinity;
    }
  }
  return w;
}

PlanningGraph apply_penalty(const DistanceMatrix& distances, Scalar tau,
                            VertexSet vertices, Digest predictor_fingerprint) {
  if (distances.size() != vertices.size()) {
    throw InputError("apply_penalty: distance matrix size does not match "
                     "vertex count");
  }
  return PlanningGraph(std::move(vertices), penalized_weights(distances, tau),
                       tau, predictor_fingerprint);
}

GuidePath shortest_path(const PlanningGraph& graph, Index source, Index target) {
  const Index m = graph.size();
  if (source < 0 || source >= m || target < 0 || target >= m) {
    throw InputError("shortest_path: vertex index out of range");
  }

  GuidePath path;
  if (source == target) {
    path.waypoint_indices = {source};
    path.waypoint_states.resize(1, graph.vertices().states.cols());
    path.waypoint_states.row(0) = graph.vertices().states.row(source);
    path.cost = 0.0;
    return path;
  }

  std::vector<Scalar> dist(static_cast<std::size_t>(m), kInfinity);
  std::vector<Index> pred(static_cast<std::size_t>(m), -1);
  std::vector<char> settled(static_cast<std::size_t>(m), 0);
  using Entry = std::pair<Scalar, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  dist[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);

  // The queue is drained completely (no early exit at the target) so that
  // the predecessor of every settled vertex is the smallest index among its
  // equal-cost predecessors; that makes tie-breaking order-independent.
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[static_cast<std::size_t>(u)]) {
      continue;
    }
    settled[static_cast<std::size_t>(u)] = 1;
    const auto row = graph.weights().row(u);
    for (Index v = 0; v < m; ++v) {
      const Scalar w = row(v);
      if (std::isinf(w)) {
        continue;
      }
      const Scalar nd = d + w;
      auto& dv = dist[static_cast<std::size_t>(v)];
      auto& pv = pred[static_cast<std::size_t>(v)];
      if (nd < dv) {
        dv = nd;
        pv = u;
        heap.emplace(nd, v);
      } else if (nd == dv && u < pv) {
        pv = u;
      }
    }
  }

  if (std::isinf(dist[static_cast<std::size_t>(target)])) {
    throw NoPathError("no path between vertices " + std::to_string(source) +
                      " and " + std::to_string(target) +
                      " in the planning graph");
  }

  std::vector<Index> rev;
  for (Index v = target; v != -1; v = pred[static_cast<std::size_t>(v)]) {
    rev.push_back(v);
  }
  std::reverse(rev.begin(), rev.end());
  if (rev.front() != source) {
    throw Error("shortest_path: predecessor chain did not reach the source");
  }
  path.waypoint_indices = std::move(rev);
  path.waypoint_states.resize(path.length(), graph.vertices().states.cols());
  for (Index i = 0; i < path.length(); ++i) {
    path.waypoint_states.row(i) =
        graph.vertices().states.row(path.waypoint_indices[static_cast<std::size_t>(i)]);
  }
  path.cost = dist[static_cast<std::size_t>(target)];
  return path;
}

namespace {

Index argmin_lowest(const Vector<>& values) {
  Index best = 0;
  for (Index i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) {
      best = i;
    }
  }
  return best;
}

}  // namespace

Index nearest_vertex_from(ConstRef<StateVector> state, const PlanningGraph& graph,
                          const DistancePredictor& predictor) {
  return argmin_lowest(predictor.distances_from(state, graph.vertices().states));
}

Index nearest_vertex_to(ConstRef<StateVector> goal, const PlanningGraph& graph,
                        const DistancePredictor& predictor) {
  return argmin_lowest(predictor.distances_to(graph.vertices().states, goal));
}

void save_graph(const PlanningGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write graph cache: " + path.string());
  }
  detail::Sink sink = [&out](const void* data, std::size_t len) {
    out.write(static_cast<const char*>(data),
              static_cast<std::streamsize>(len));
  };
  const Index m = graph.size();
  const Index dim = graph.vertices().states.cols();
  sink(kMagic, 4);
  detail::put_u8(sink, kFormatVersion);
  detail::put_u64(sink, static_cast<std::uint64_t>(m));
  detail::put_u64(sink, static_cast<std::uint64_t>(dim));
  detail::put_f64(sink, graph.tau());
  sink(graph.predictor_fingerprint().data(), graph.predictor_fingerprint().size());
  detail::put_u64(sink, graph.vertices().seed);
  for (const StateIndex& si : graph.vertices().provenance) {
    detail::put_u64(sink, static_cast<std::uint64_t>(si.trajectory));
    detail::put_u64(sink, static_cast<std::uint64_t>(si.time));
  }
  for (Index i = 0; i < m; ++i) {
    for (Index d = 0; d < dim; ++d) {
      detail::put_f32(sink, static_cast<float>(graph.vertices().states(i, d)));
    }
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      detail::put_f64(sink, graph.weights()(i, j));
    }
  }
  if (!out) {
    throw Error("failed writing graph cache: " + path.string());
  }
}

PlanningGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open graph cache: " + path.string());
  }
  detail::ByteReader r(in, path.string());
  char magic[4];
  r.read_exact(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw InputError(path.string() + ": not a graph cache (bad magic bytes)");
  }
  const std::uint8_t version = r.u8();
  if (version != kFormatVersion) {
    throw InputError(path.string() + ": unsupported graph cache version " +
                     std::to_string(version));
  }
  const std::uint64_t m = r.u64();
  const std::uint64_t dim = r.u64();
  if (m == 0 || dim == 0) {
    throw InputError(path.string() + ": empty graph cache header");
  }
  const Scalar tau = r.f64();
  Digest fingerprint{};
  r.read_exact(fingerprint.data(), fingerprint.size());
  VertexSet vs;
  vs.seed = r.u64();
  vs.provenance.resize(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    vs.provenance[i].trajectory = static_cast<Index>(r.u64());
    vs.provenance[i].time = static_cast<Index>(r.u64());
  }
  vs.states.resize(static_cast<Index>(m), static_cast<Index>(dim));
  for (Index i = 0; i < vs.states.rows(); ++i) {
    for (Index d = 0; d < vs.states.cols(); ++d) {
      vs.states(i, d) = static_cast<Scalar>(r.f32());
    }
  }
  RowMatrix weights(static_cast<Index>(m), static_cast<Index>(m));
  for (Index i = 0; i < weights.rows(); ++i) {
    for (Index j = 0; j < weights.cols(); ++j) {
      weights(i, j) = r.f64();
    }
  }
  return PlanningGraph(std::move(vs), std::move(weights), tau, fingerprint);
}

PlanningGraph load_graph(const std::filesystem::path& path,
                         const Digest& expected_fingerprint) {
  PlanningGraph graph = load_graph(path);
  if (graph.predictor_fingerprint() != expected_fingerprint) {
    throw InputError(path.string() +
                     ": graph cache was built with a different predictor "
                     "(fingerprint mismatch); rebuild the graph");
  }
  return graph;
}

}  // namespace ttgs
