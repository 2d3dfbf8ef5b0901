#include "ttgs/dataset.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "byteio.hpp"
#include "ttgs/distance.hpp"
#include "ttgs/rng.hpp"

namespace ttgs {

namespace {

using detail::ByteReader;
using detail::Sink;
using detail::put_f32;
using detail::put_u32;
using detail::put_u64;
using detail::put_u8;

constexpr char kMagic[4] = {'T', 'T', 'G', 'S'};
constexpr std::uint8_t kFormatVersion = 1;

void serialize_binary(const TrajectoryDataset& dataset, const Sink& sink) {
  sink(kMagic, 4);
  put_u8(sink, kFormatVersion);
  put_u32(sink, static_cast<std::uint32_t>(dataset.state_dim()));
  put_u64(sink, static_cast<std::uint64_t>(dataset.num_trajectories()));
  for (const Trajectory& traj : dataset.trajectories()) {
    put_u64(sink, static_cast<std::uint64_t>(traj.length()));
    put_u8(sink, traj.terminal ? 1 : 0);
    for (Index t = 0; t < traj.length(); ++t) {
      for (Index d = 0; d < dataset.state_dim(); ++d) {
        put_f32(sink, static_cast<float>(traj.states(t, d)));
      }
    }
  }
}

TrajectoryDataset parse_binary(std::istream& in, const std::string& name) {
  ByteReader r(in, name);
  char magic[4];
  r.read_exact(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw InputError(name + ": bad magic bytes for binary dataset");
  }
  const std::uint8_t version = r.u8();
  if (version != kFormatVersion) {
    throw InputError(name + ": unsupported binary dataset version " +
                     std::to_string(version));
  }
  const std::uint32_t dim = r.u32();
  if (dim == 0) {
    throw InputError(name + ": state dimension must be positive");
  }
  const std::uint64_t n_traj = r.u64();
  if (n_traj == 0) {
    throw InputError(name + ": dataset contains no trajectories");
  }
  std::vector<Trajectory> trajectories;
  trajectories.reserve(n_traj);
  for (std::uint64_t i = 0; i < n_traj; ++i) {
    const std::uint64_t length = r.u64();
    if (length == 0) {
      throw InputError(name + ": trajectory " + std::to_string(i) +
                       " has zero length");
    }
    Trajectory traj;
    traj.terminal = r.u8() != 0;
    traj.states.resize(static_cast<Index>(length), static_cast<Index>(dim));
    for (Index t = 0; t < traj.states.rows(); ++t) {
      for (Index d = 0; d < traj.states.cols(); ++d) {
        traj.states(t, d) = static_cast<Scalar>(r.f32());
      }
    }
    trajectories.push_back(std::move(traj));
  }
  return TrajectoryDataset(std::move(trajectories));
}

TrajectoryDataset parse_text(std::istream& in, const std::string& name) {
  std::vector<Trajectory> trajectories;
  std::string line;
  std::size_t line_no = 0;
  Index dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::string where = name + " line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("states")) {
      throw InputError(where + ": expected an object with a 'states' field");
    }
    const auto& states = obj["states"];
    if (!states.is_array() || states.empty()) {
      throw InputError(where + ": 'states' must be a nonempty array");
    }
    Trajectory traj;
    if (obj.contains("terminal")) {
      if (!obj["terminal"].is_boolean()) {
        throw InputError(where + ": 'terminal' must be a boolean");
      }
      traj.terminal = obj["terminal"].get<bool>();
    }
    for (std::size_t t = 0; t < states.size(); ++t) {
      const auto& row = states[t];
      if (!row.is_array() || row.empty()) {
        throw InputError(where + ": state " + std::to_string(t) +
                         " must be a nonempty array of numbers");
      }
      if (dim < 0) {
        dim = static_cast<Index>(row.size());
      }
      if (static_cast<Index>(row.size()) != dim) {
        throw InputError(where + ": state " + std::to_string(t) + " has " +
                         std::to_string(row.size()) +
                         " components, expected " + std::to_string(dim));
      }
      if (t == 0) {
        traj.states.resize(static_cast<Index>(states.size()), dim);
      }
      for (std::size_t d = 0; d < row.size(); ++d) {
        if (!row[d].is_number()) {
          throw InputError(where + ": state " + std::to_string(t) +
                           " component " + std::to_string(d) +
                           " is not a number");
        }
        traj.states(static_cast<Index>(t), static_cast<Index>(d)) =
            row[d].get<Scalar>();
      }
    }
    trajectories.push_back(std::move(traj));
  }
  if (trajectories.empty()) {
    throw InputError(name + ": dataset file contains no trajectories");
  }
  return TrajectoryDataset(std::move(trajectories));
}

}  // namespace

TrajectoryDataset::TrajectoryDataset(std::vector<Trajectory> trajectories)
    : trajectories_(std::move(trajectories)) {
  if (trajectories_.empty()) {
    throw InputError("dataset must contain at least one trajectory");
  }
  state_dim_ = trajectories_.front().states.cols();
  if (state_dim_ <= 0) {
    throw InputError("dataset states must have positive dimension");
  }
  for (std::size_t i = 0; i < trajectories_.size(); ++i) {
    const Trajectory& traj = trajectories_[i];
    if (traj.length() < 1) {
      throw InputError("trajectory " + std::to_string(i) + " is empty");
    }
    if (traj.states.cols() != state_dim_) {
      throw InputError("trajectory " + std::to_string(i) + " has dimension " +
                       std::to_string(traj.states.cols()) + ", expected " +
                       std::to_string(state_dim_));
    }
    if (!traj.states.allFinite()) {
      throw InputError("trajectory " + std::to_string(i) +
                       " contains non-finite states");
    }
    total_states_ += traj.length();
  }
}

Digest TrajectoryDataset::content_hash() const {
  Sha256 hasher;
  serialize_binary(*this, [&hasher](const void* data, std::size_t len) {
    hasher.update(data, len);
  });
  return hasher.finish();
}

TrajectoryDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open dataset file: " + path.string());
  }
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  const bool binary =
      in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0;
  in.clear();
  in.seekg(0);
  if (binary) {
    return parse_binary(in, path.string());
  }
  return parse_text(in, path.string());
}

void save_dataset_text(const TrajectoryDataset& dataset,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write dataset file: " + path.string());
  }
  for (const Trajectory& traj : dataset.trajectories()) {
    nlohmann::json states = nlohmann::json::array();
    for (Index t = 0; t < traj.length(); ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (Index d = 0; d < dataset.state_dim(); ++d) {
        row.push_back(traj.states(t, d));
      }
      states.push_back(std::move(row));
    }
    nlohmann::json obj;
    obj["states"] = std::move(states);
    obj["terminal"] = traj.terminal;
    out << obj.dump() << '\n';
  }
  if (!out) {
    throw Error("failed writing dataset file: " + path.string());
  }
}

void save_dataset_binary(const TrajectoryDataset& dataset,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write dataset file: " + path.string());
  }
  serialize_binary(dataset, [&out](const void* data, std::size_t len) {
    out.write(static_cast<const char*>(data),
              static_cast<std::streamsize>(len));
  });
  if (!out) {
    throw Error("failed writing dataset file: " + path.string());
  }
}

VertexSet uniform_sample(const TrajectoryDataset& dataset, Index m,
                         std::uint64_t seed) {
  if (m <= 0) {
    throw InputError("uniform_sample: m must be positive, got " +
                     std::to_string(m));
  }
  if (m > dataset.total_states()) {
    throw InputError("uniform_sample: m=" + std::to_string(m) +
                     " exceeds dataset size " +
                     std::to_string(dataset.total_states()));
  }
  std::vector<StateIndex> all;
  all.reserve(dataset.total_states());
  for (Index i = 0; i < dataset.num_trajectories(); ++i) {
    for (Index t = 0; t < dataset.trajectory(i).length(); ++t) {
      all.push_back({i, t});
    }
  }
  // Partial Fisher-Yates: the first m slots end up as a uniform draw
  // without replacement over all positions.
  Rng rng(seed);
  const std::uint64_t n = all.size();
  for (Index i = 0; i < m; ++i) {
    const std::uint64_t j =
        static_cast<std::uint64_t>(i) +
        bounded(rng, n - static_cast<std::uint64_t>(i));
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  VertexSet vs;
  vs.seed = seed;
  vs.states.resize(m, dataset.state_dim());
  vs.provenance.assign(all.begin(), all.begin() + m);
  for (Index i = 0; i < m; ++i) {
    const StateIndex& si = vs.provenance[static_cast<std::size_t>(i)];
    vs.states.row(i) = dataset.trajectory(si.trajectory).states.row(si.time);
  }
  return vs;
}

std::vector<StateIndex> temporal_efficiency_filter(
    const TrajectoryDataset& dataset, const DistancePredictor& predictor,
    Index horizon, Scalar eps) {
  if (horizon < 1) {
    throw InputError("temporal_efficiency_filter: horizon must be >= 1");
  }
  if (!std::isfinite(eps) || eps < 0.0) {
    throw InputError("temporal_efficiency_filter: eps must be >= 0");
  }
  std::vector<StateIndex> kept;
  for (Index i = 0; i < dataset.num_trajectories(); ++i) {
    const Trajectory& traj = dataset.trajectory(i);
    for (Index t = 0; t + horizon < traj.length(); ++t) {
      const Scalar d = predictor(traj.states.row(t).transpose(),
                                 traj.states.row(t + horizon).transpose())
                           .steps();
      const Scalar ratio = d / static_cast<Scalar>(horizon);
      if (ratio >= 1.0 - eps && ratio <= 1.0 + eps) {
        kept.push_back({i, t});
      }
    }
  }
  return kept;
}

namespace {

StateVector state_at(const TrajectoryDataset& dataset, const StateIndex& si) {
  return dataset.trajectory(si.trajectory).states.row(si.time).transpose();
}

}  // namespace

VertexSet greedy_cluster(const TrajectoryDataset& dataset,
                         const std::vector<StateIndex>& candidates,
                         const DistancePredictor& predictor, Scalar radius,
                         Index update_batch) {
  if (candidates.empty()) {
    throw InputError("greedy_cluster: no candidate states");
  }
  if (!std::isfinite(radius) || radius <= 0.0) {
    throw InputError("greedy_cluster: radius must be positive");
  }
  if (update_batch < 1) {
    throw InputError("greedy_cluster: update_batch must be >= 1");
  }
  for (const StateIndex& si : candidates) {
    if (si.trajectory < 0 || si.trajectory >= dataset.num_trajectories() ||
        si.time < 0 ||
        si.time >= dataset.trajectory(si.trajectory).length()) {
      throw InputError("greedy_cluster: candidate index out of range");
    }
  }

  struct Cluster {
    StateVector center;
    std::size_t center_candidate;      // index into `candidates`
    std::vector<std::size_t> members;  // indices into `candidates`
  };
  std::vector<Cluster> clusters;

  // Re-elect the member whose total predicted distance to the rest of the
  // cluster is smallest (ties to the earliest member).
  auto recenter = [&](Cluster& c) {
    if (c.members.size() < 2) {
      return;
    }
    std::vector<StateVector> member_states;
    member_states.reserve(c.members.size());
    for (std::size_t m : c.members) {
      member_states.push_back(state_at(dataset, candidates[m]));
    }
    Scalar best_cost = kInfinity;
    std::size_t best = 0;
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      Scalar cost = 0.0;
      for (std::size_t j = 0; j < c.members.size(); ++j) {
        if (i == j) continue;
        cost += predictor(member_states[i], member_states[j]).steps();
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
      }
    }
    c.center_candidate = c.members[best];
    c.center = member_states[best];
  };

  Index assignments = 0;
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const StateVector x = state_at(dataset, candidates[ci]);
    Scalar best_d = kInfinity;
    std::size_t best_cluster = 0;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      const Scalar d = predictor(x, clusters[k].center).steps();
      if (d < best_d) {
        best_d = d;
        best_cluster = k;
      }
    }
    if (clusters.empty() || best_d > radius) {
      clusters.push_back({x, ci, {ci}});
      continue;
    }
    clusters[best_cluster].members.push_back(ci);
    ++assignments;
    if (assignments % update_batch == 0) {
      for (Cluster& c : clusters) {
        recenter(c);
      }
    }
  }
  for (Cluster& c : clusters) {
    recenter(c);
  }

  VertexSet vs;
  vs.seed = 0;
  vs.states.resize(static_cast<Index>(clusters.size()), dataset.state_dim());
  vs.provenance.reserve(clusters.size());
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    vs.states.row(static_cast<Index>(k)) = clusters[k].center.transpose();
    vs.provenance.push_back(candidates[clusters[k].center_candidate]);
  }
  return vs;
}

}  // namespace ttgs
