#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "ttgs/hash.hpp"
#include "ttgs/types.hpp"

namespace ttgs {

class TrajectoryDataset;

// Discount factor in the open interval (0, 1); both endpoints are rejected
// because the closed-form transforms divide by log(gamma) and by (1 - gamma).
class DiscountFactor {
 public:
  explicit DiscountFactor(Scalar gamma);
  Scalar value() const { return gamma_; }

 private:
  Scalar gamma_;
};

// A raw value-function output. NaN and infinities are rejected at
// construction: a non-finite prediction signals a broken predictor and must
// never be silently clamped into range.
class ValueEstimate {
 public:
  explicit ValueEstimate(Scalar v);
  Scalar value() const { return v_; }

 private:
  Scalar v_;
};

// Predicted number of environment steps; always finite and at least 1.
class StepDistance {
 public:
  explicit StepDistance(Scalar steps);
  Scalar steps() const { return steps_; }

 private:
  Scalar steps_;
};

enum class RewardConvention {
  kSparseTerminal,        // V = gamma^d, goal-reached reward 1
  kPerStepPenalty,        // V = -(1 - gamma^d) / (1 - gamma), reward -1 per step
  kQuasiMetric,           // model already outputs a step distance
  kEuclideanNormalized,   // position-space L2 over an average step length
};

const char* to_string(RewardConvention c);
RewardConvention reward_convention_from_string(const std::string& s);

inline constexpr Scalar kDefaultEpsilonClip = 1e-3;

// Closed-form inversions of the two value conventions. Values are clamped
// into the invertible range first (margin epsilon_clip), and every result is
// lower-bounded by one step.
StepDistance sparse_terminal_to_distance(ValueEstimate v, DiscountFactor gamma,
                                         Scalar epsilon_clip = kDefaultEpsilonClip);
StepDistance per_step_penalty_to_distance(ValueEstimate v, DiscountFactor gamma,
                                          Scalar epsilon_clip = kDefaultEpsilonClip);

// For models that already emit distances; NaN is an error, raw values below
// one step are floored to 1.
StepDistance quasimetric_passthrough(Scalar raw);

// L2 over the position block of the state, normalized by the dataset's
// average step length so the result is measured in steps.
StepDistance l2_position_distance(ConstRef<StateVector> state,
                                  ConstRef<StateVector> goal,
                                  const IndexRange& position_slice,
                                  Scalar avg_step_length);

// Mean position-delta norm over consecutive states within each trajectory.
// Errors on an empty dataset and on all-zero deltas (degenerate data).
Scalar average_step_length(const TrajectoryDataset& dataset,
                           const IndexRange& position_slice);

// Raw signal backing a predictor: a value estimate for the two value
// conventions, a raw step distance for the quasimetric convention.
using ValueFn =
    std::function<Scalar(ConstRef<StateVector>, ConstRef<StateVector>)>;

// A (state, goal) -> predicted-step-distance model: a raw signal plus the
// convention-specific transform. Evaluation depends only on immutable
// configuration, so a predictor can be shared freely across threads; the
// clipped-query counter is an atomic diagnostic on the side.
class DistancePredictor {
 public:
  static DistancePredictor sparse_terminal(ValueFn values, std::string source_id,
                                           DiscountFactor gamma,
                                           Scalar epsilon_clip = kDefaultEpsilonClip);
  static DistancePredictor per_step_penalty(ValueFn values, std::string source_id,
                                            DiscountFactor gamma,
                                            Scalar epsilon_clip = kDefaultEpsilonClip);
  static DistancePredictor quasimetric(ValueFn raw_distances, std::string source_id);
  static DistancePredictor euclidean(IndexRange position_slice,
                                     Scalar avg_step_length);

  StepDistance operator()(ConstRef<StateVector> state,
                          ConstRef<StateVector> goal) const;

  // Batched forms. Each entry is produced by the same scalar code path, so a
  // batched call equals element-wise scalar calls bit for bit.
  Vector<> distances_from(ConstRef<StateVector> state,
                          ConstRef<StateMatrix> goals) const;
  Vector<> distances_to(ConstRef<StateMatrix> states,
                        ConstRef<StateVector> goal) const;

  RewardConvention convention() const { return convention_; }
  const std::string& source_id() const { return source_id_; }
  Scalar gamma() const { return gamma_; }
  Scalar epsilon_clip() const { return epsilon_clip_; }

  // Hash of the predictor configuration; graph caches are validated
  // against it before a cached graph is trusted.
  const Digest& fingerprint() const { return fingerprint_; }
  std::string fingerprint_hex() const { return hex(fingerprint_); }

  // Number of queries so far whose raw signal had to be clamped (value
  // outside the invertible range, or a raw distance below one step).
  std::uint64_t clipped_queries() const { return clipped_->load(); }
  void reset_clipped_queries() const { clipped_->store(0); }

 private:
  DistancePredictor() = default;

  RewardConvention convention_ = RewardConvention::kQuasiMetric;
  Scalar gamma_ = 0;
  Scalar epsilon_clip_ = kDefaultEpsilonClip;
  IndexRange position_slice_;
  Scalar avg_step_length_ = 0;
  ValueFn signal_;
  std::string source_id_;
  Digest fingerprint_{};
  std::shared_ptr<std::atomic<std::uint64_t>> clipped_;
};

}  // namespace ttgs
