#include "ttgs/distance.hpp"

#include <cmath>
#include <cstdio>

#include "ttgs/dataset.hpp"

namespace ttgs {

DiscountFactor::DiscountFactor(Scalar gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw InputError("discount factor must lie strictly inside (0, 1), got " +
                     std::to_string(gamma));
  }
}

ValueEstimate::ValueEstimate(Scalar v) : v_(v) {
  if (!std::isfinite(v)) {
    throw InputError("value estimate must be finite; a NaN/inf prediction "
                     "signals a broken predictor");
  }
}

StepDistance::StepDistance(Scalar steps) : steps_(steps) {
  if (!std::isfinite(steps) || steps < 1.0) {
    throw Error("step distance must be finite and >= 1, got " +
                std::to_string(steps));
  }
}

const char* to_string(RewardConvention c) {
  switch (c) {
    case RewardConvention::kSparseTerminal: return "sparse";
    case RewardConvention::kPerStepPenalty: return "penalty";
    case RewardConvention::kQuasiMetric: return "quasimetric";
    case RewardConvention::kEuclideanNormalized: return "euclidean";
  }
  throw Error("unknown reward convention");
}

RewardConvention reward_convention_from_string(const std::string& s) {
  if (s == "sparse") return RewardConvention::kSparseTerminal;
  if (s == "penalty") return RewardConvention::kPerStepPenalty;
  if (s == "quasimetric") return RewardConvention::kQuasiMetric;
  if (s == "euclidean") return RewardConvention::kEuclideanNormalized;
  throw InputError("unknown reward convention '" + s +
                   "' (expected sparse|penalty|quasimetric|euclidean)");
}

namespace {

struct TransformOut {
  Scalar steps;
  bool clipped;
};

void check_epsilon(Scalar eps) {
  if (!std::isfinite(eps) || eps <= 0.0 || eps >= 1.0) {
    throw InputError("epsilon_clip must lie in (0, 1), got " +
                     std::to_string(eps));
  }
}

TransformOut sparse_impl(Scalar v, Scalar gamma, Scalar eps) {
  // V = gamma^d lives in (0, 1]; pull out-of-range predictions back in.
  bool clipped = false;
  if (v <= 0.0) {
    v = eps;
    clipped = true;
  } else if (v > 1.0) {
    v = 1.0;
    clipped = true;
  }
  Scalar d = std::log(v) / std::log(gamma);
  if (d < 1.0) {
    d = 1.0;
    clipped = true;
  }
  return {d, clipped};
}

TransformOut per_step_impl(Scalar v, Scalar gamma, Scalar eps) {
  // V = -(1 - gamma^d) / (1 - gamma) lives in (-1/(1-gamma), 0); clamp with
  // margin eps so the inverse stays finite.
  const Scalar lo = -1.0 / (1.0 - gamma) + eps;
  const Scalar hi = -eps;
  if (!(lo < hi)) {
    throw InputError("epsilon_clip too large for gamma: clamp interval empty");
  }
  bool clipped = false;
  Scalar vc = v;
  if (vc < lo) {
    vc = lo;
    clipped = true;
  } else if (vc > hi) {
    vc = hi;
    clipped = true;
  }
  Scalar d = std::log(1.0 + (1.0 - gamma) * vc) / std::log(gamma);
  if (d < 1.0) {
    d = 1.0;
    clipped = true;
  }
  return {d, clipped};
}

TransformOut quasi_impl(Scalar raw) {
  if (std::isnan(raw)) {
    throw InputError("quasimetric distance is NaN; refusing to clamp a broken "
                     "prediction");
  }
  if (raw < 1.0) {
    return {1.0, true};
  }
  if (!std::isfinite(raw)) {
    throw InputError("quasimetric distance must be finite");
  }
  return {raw, false};
}

TransformOut l2_impl(ConstRef<StateVector> state, ConstRef<StateVector> goal,
                     const IndexRange& slice, Scalar avg_step_length) {
  if (state.size() != goal.size()) {
    throw InputError("l2 distance: state dim " + std::to_string(state.size()) +
                     " != goal dim " + std::to_string(goal.size()));
  }
  slice.check_within(state.size(), "l2 distance");
  if (!std::isfinite(avg_step_length) || avg_step_length <= 0.0) {
    throw InputError("l2 distance: average step length must be positive");
  }
  const Scalar n = (state.segment(slice.start, slice.length) -
                    goal.segment(slice.start, slice.length))
                       .norm();
  if (std::isnan(n)) {
    throw InputError("l2 distance: non-finite state coordinates");
  }
  Scalar d = n / avg_step_length;
  if (d < 1.0) {
    return {1.0, true};
  }
  return {d, false};
}

std::string format_scalar(Scalar x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

StepDistance sparse_terminal_to_distance(ValueEstimate v, DiscountFactor gamma,
                                         Scalar epsilon_clip) {
  check_epsilon(epsilon_clip);
  return StepDistance(sparse_impl(v.value(), gamma.value(), epsilon_clip).steps);
}

StepDistance per_step_penalty_to_distance(ValueEstimate v, DiscountFactor gamma,
                                          Scalar epsilon_clip) {
  check_epsilon(epsilon_clip);
  return StepDistance(per_step_impl(v.value(), gamma.value(), epsilon_clip).steps);
}

StepDistance quasimetric_passthrough(Scalar raw) {
  return StepDistance(quasi_impl(raw).steps);
}

StepDistance l2_position_distance(ConstRef<StateVector> state,
                                  ConstRef<StateVector> goal,
                                  const IndexRange& position_slice,
                                  Scalar avg_step_length) {
  return StepDistance(l2_impl(state, goal, position_slice, avg_step_length).steps);
}

Scalar average_step_length(const TrajectoryDataset& dataset,
                           const IndexRange& position_slice) {
  position_slice.check_within(dataset.state_dim(), "average_step_length");
  Scalar sum = 0.0;
  Index count = 0;
  for (const Trajectory& traj : dataset.trajectories()) {
    for (Index t = 0; t + 1 < traj.length(); ++t) {
      sum += (traj.states.row(t + 1) - traj.states.row(t))
                 .segment(position_slice.start, position_slice.length)
                 .norm();
      ++count;
    }
  }
  if (count == 0) {
    throw InputError("average_step_length: dataset has no consecutive state "
                     "pairs");
  }
  const Scalar mean = sum / static_cast<Scalar>(count);
  if (!(mean > 0.0)) {
    throw InputError("average_step_length: all position deltas are zero");
  }
  return mean;
}

DistancePredictor DistancePredictor::sparse_terminal(ValueFn values,
                                                     std::string source_id,
                                                     DiscountFactor gamma,
                                                     Scalar epsilon_clip) {
  check_epsilon(epsilon_clip);
  if (!values) {
    throw InputError("sparse_terminal predictor: null value function");
  }
  DistancePredictor p;
  p.convention_ = RewardConvention::kSparseTerminal;
  p.gamma_ = gamma.value();
  p.epsilon_clip_ = epsilon_clip;
  p.signal_ = std::move(values);
  p.source_id_ = std::move(source_id);
  p.fingerprint_ = Sha256::of("predictor{conv=sparse;gamma=" +
                              format_scalar(p.gamma_) + ";eps=" +
                              format_scalar(epsilon_clip) + ";src=" +
                              p.source_id_ + "}");
  p.clipped_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return p;
}

DistancePredictor DistancePredictor::per_step_penalty(ValueFn values,
                                                      std::string source_id,
                                                      DiscountFactor gamma,
                                                      Scalar epsilon_clip) {
  check_epsilon(epsilon_clip);
  if (!values) {
    throw InputError("per_step_penalty predictor: null value function");
  }
  DistancePredictor p;
  p.convention_ = RewardConvention::kPerStepPenalty;
  p.gamma_ = gamma.value();
  p.epsilon_clip_ = epsilon_clip;
  p.signal_ = std::move(values);
  p.source_id_ = std::move(source_id);
  p.fingerprint_ = Sha256::of("predictor{conv=penalty;gamma=" +
                              format_scalar(p.gamma_) + ";eps=" +
                              format_scalar(epsilon_clip) + ";src=" +
                              p.source_id_ + "}");
  p.clipped_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return p;
}

DistancePredictor DistancePredictor::quasimetric(ValueFn raw_distances,
                                                 std::string source_id) {
  if (!raw_distances) {
    throw InputError("quasimetric predictor: null distance function");
  }
  DistancePredictor p;
  p.convention_ = RewardConvention::kQuasiMetric;
  p.signal_ = std::move(raw_distances);
  p.source_id_ = std::move(source_id);
  p.fingerprint_ =
      Sha256::of("predictor{conv=quasimetric;src=" + p.source_id_ + "}");
  p.clipped_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return p;
}

DistancePredictor DistancePredictor::euclidean(IndexRange position_slice,
                                               Scalar avg_step_length) {
  if (!std::isfinite(avg_step_length) || avg_step_length <= 0.0) {
    throw InputError("euclidean predictor: average step length must be "
                     "positive");
  }
  DistancePredictor p;
  p.convention_ = RewardConvention::kEuclideanNormalized;
  p.position_slice_ = position_slice;
  p.avg_step_length_ = avg_step_length;
  p.source_id_ = "euclidean";
  p.fingerprint_ = Sha256::of(
      "predictor{conv=euclidean;slice=" + std::to_string(position_slice.start) +
      "+" + std::to_string(position_slice.length) + ";avg=" +
      format_scalar(avg_step_length) + "}");
  p.clipped_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return p;
}

StepDistance DistancePredictor::operator()(ConstRef<StateVector> state,
                                           ConstRef<StateVector> goal) const {
  TransformOut out{};
  switch (convention_) {
    case RewardConvention::kSparseTerminal:
      out = sparse_impl(ValueEstimate(signal_(state, goal)).value(), gamma_,
                        epsilon_clip_);
      break;
    case RewardConvention::kPerStepPenalty:
      out = per_step_impl(ValueEstimate(signal_(state, goal)).value(), gamma_,
                          epsilon_clip_);
      break;
    case RewardConvention::kQuasiMetric:
      out = quasi_impl(signal_(state, goal));
      break;
    case RewardConvention::kEuclideanNormalized:
      out = l2_impl(state, goal, position_slice_, avg_step_length_);
      break;
  }
  if (out.clipped) {
    clipped_->fetch_add(1, std::memory_order_relaxed);
  }
  return StepDistance(out.steps);
}

Vector<> DistancePredictor::distances_from(ConstRef<StateVector> state,
                                           ConstRef<StateMatrix> goals) const {
  Vector<> out(goals.rows());
  for (Index i = 0; i < goals.rows(); ++i) {
    out[i] = (*this)(state, goals.row(i).transpose()).steps();
  }
  return out;
}

Vector<> DistancePredictor::distances_to(ConstRef<StateMatrix> states,
                                         ConstRef<StateVector> goal) const {
  Vector<> out(states.rows());
  for (Index i = 0; i < states.rows(); ++i) {
    out[i] = (*this)(states.row(i).transpose(), goal).steps();
  }
  return out;
}

}  // namespace ttgs
