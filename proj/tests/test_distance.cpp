#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ttgs/dataset.hpp"
#include "ttgs/distance.hpp"
#include "ttgs/rng.hpp"

using namespace ttgs;

namespace {

constexpr Scalar kNan = std::numeric_limits<Scalar>::quiet_NaN();
constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

Scalar sparse(Scalar v, Scalar g, Scalar eps = kDefaultEpsilonClip) {
  return sparse_terminal_to_distance(ValueEstimate(v), DiscountFactor(g), eps)
      .steps();
}

Scalar penalty(Scalar v, Scalar g, Scalar eps = kDefaultEpsilonClip) {
  return per_step_penalty_to_distance(ValueEstimate(v), DiscountFactor(g), eps)
      .steps();
}

StateVector vec2(Scalar x, Scalar y) {
  StateVector v(2);
  v << x, y;
  return v;
}

TrajectoryDataset line_dataset(const std::vector<std::vector<Scalar>>& ys) {
  std::vector<Trajectory> trajs;
  for (const auto& traj_ys : ys) {
    Trajectory t;
    t.states.resize(static_cast<Index>(traj_ys.size()), 2);
    for (std::size_t i = 0; i < traj_ys.size(); ++i) {
      t.states(static_cast<Index>(i), 0) = 0.0;
      t.states(static_cast<Index>(i), 1) = traj_ys[i];
    }
    trajs.push_back(std::move(t));
  }
  return TrajectoryDataset(std::move(trajs));
}

}  // namespace

TEST_CASE("strong types reject out-of-domain construction") {
  CHECK_THROWS_AS(DiscountFactor(0.0), InputError);
  CHECK_THROWS_AS(DiscountFactor(1.0), InputError);
  CHECK_THROWS_AS(DiscountFactor(-0.5), InputError);
  CHECK_THROWS_AS(DiscountFactor{kNan}, InputError);
  CHECK(DiscountFactor(0.99).value() == 0.99);

  CHECK_THROWS_AS(ValueEstimate{kNan}, InputError);
  CHECK_THROWS_AS(ValueEstimate{kInf}, InputError);
  CHECK(ValueEstimate(-200.0).value() == -200.0);

  CHECK_THROWS_AS(StepDistance(0.5), Error);
  CHECK_THROWS_AS(StepDistance{kInf}, Error);
  CHECK(StepDistance(1.0).steps() == 1.0);
}

TEST_CASE("reward convention names round-trip") {
  for (const char* name : {"sparse", "penalty", "quasimetric", "euclidean"}) {
    CHECK(to_string(reward_convention_from_string(name)) == std::string(name));
  }
  CHECK_THROWS_AS(reward_convention_from_string("dense"), InputError);
}

TEST_CASE("sparse-terminal transform matches hand-computed values") {
  // V = 0.95^5: inverting recovers five steps.
  CHECK(sparse(std::pow(0.95, 5), 0.95) == doctest::Approx(5.0).epsilon(1e-9));
  // V = 1 maps to zero steps and is lower-bounded to one.
  CHECK(sparse(1.0, 0.99) == 1.0);
  // Negative values clamp to epsilon first: ln(1e-3)/ln(0.99).
  CHECK(sparse(-0.3, 0.99) == doctest::Approx(687.3158648300827).epsilon(1e-12));
  CHECK(sparse(0.5, 0.99) == doctest::Approx(68.96756393652842).epsilon(1e-12));
  // Values above one clamp down to one.
  CHECK(sparse(7.0, 0.99) == 1.0);
  // Tiny positive values are legal inputs, not clamped: the result is just
  // large.
  const Scalar far = sparse(1e-9, 0.99);
  CHECK(far == doctest::Approx(std::log(1e-9) / std::log(0.99)).epsilon(1e-12));
  CHECK(std::isfinite(far));
}

TEST_CASE("per-step-penalty transform matches hand-computed values") {
  // V = -1 is exactly one step: log_0.99(0.99).
  CHECK(penalty(-1.0, 0.99) == 1.0);
  // Generate V from the closed form at d = 10 and invert.
  const Scalar g = 0.99;
  const Scalar v10 = -(1.0 - std::pow(g, 10)) / (1.0 - g);
  CHECK(v10 == doctest::Approx(-9.56179249911955).epsilon(1e-12));
  CHECK(penalty(v10, g) == doctest::Approx(10.0).epsilon(1e-9));
  // V = -200 lies below -1/(1-gamma); the clamp keeps the result finite.
  CHECK(penalty(-200.0, 0.99) ==
        doctest::Approx(1145.5264413828195).epsilon(1e-12));
  CHECK(penalty(-200.0, 0.99) == doctest::Approx(1145.6).epsilon(1e-4));
  // Positive values clamp to -epsilon, whose distance floors at one.
  CHECK(penalty(0.3, 0.99) == 1.0);
}

TEST_CASE("per-step-penalty round-trips over the invertible domain") {
  for (const Scalar g : {0.99, 0.995}) {
    for (int d = 1; d <= 500; ++d) {
      const Scalar v = -(1.0 - std::pow(g, d)) / (1.0 - g);
      const Scalar rel = std::abs(penalty(v, g) - d) / d;
      CAPTURE(g);
      CAPTURE(d);
      REQUIRE(rel < 1e-6);
    }
  }
  // gamma = 0.9 saturates where gamma^d falls below eps * (1 - gamma): from
  // d = 88 on, the clamp returns the fixed boundary distance instead.
  {
    const Scalar g = 0.9;
    const Scalar saturation = std::log(1e-3 * (1.0 - g)) / std::log(g);
    CHECK(saturation == doctest::Approx(87.41738130713135).epsilon(1e-9));
    for (int d = 1; d <= 87; ++d) {
      const Scalar v = -(1.0 - std::pow(g, d)) / (1.0 - g);
      const Scalar rel = std::abs(penalty(v, g) - d) / d;
      CAPTURE(d);
      REQUIRE(rel < 1e-6);
    }
    for (const int d : {88, 120, 250, 500}) {
      const Scalar v = -(1.0 - std::pow(g, d)) / (1.0 - g);
      CHECK(penalty(v, g) == doctest::Approx(saturation).epsilon(1e-9));
    }
  }
}

TEST_CASE("sparse-terminal round-trips over the invertible domain") {
  for (const Scalar g : {0.9, 0.99, 0.995}) {
    for (int d = 1; d <= 500; ++d) {
      const Scalar rel = std::abs(sparse(std::pow(g, d), g) - d) / d;
      CAPTURE(g);
      CAPTURE(d);
      REQUIRE(rel < 1e-6);
    }
  }
}

TEST_CASE("quasimetric passthrough floors at one and rejects NaN") {
  CHECK(quasimetric_passthrough(37.2).steps() == 37.2);
  CHECK(quasimetric_passthrough(0.4).steps() == 1.0);
  CHECK(quasimetric_passthrough(-5.0).steps() == 1.0);
  CHECK_THROWS_AS(quasimetric_passthrough(kNan), InputError);
  CHECK_THROWS_AS(quasimetric_passthrough(kInf), InputError);
}

TEST_CASE("every transform output is finite and at least one step") {
  Rng rng(20240817);
  for (int i = 0; i < 100000; ++i) {
    const Scalar v = uniform_range(rng, -1e9, 1e9);
    const Scalar s = sparse(v, 0.99);
    const Scalar p = penalty(v, 0.99);
    const Scalar q = quasimetric_passthrough(v).steps();
    REQUIRE(std::isfinite(s));
    REQUIRE(s >= 1.0);
    REQUIRE(std::isfinite(p));
    REQUIRE(p >= 1.0);
    REQUIRE(std::isfinite(q));
    REQUIRE(q >= 1.0);
  }
  for (const Scalar v : {-1e9, 1e9, 0.0, -0.0, -101.0, 1.0 + 1e-12}) {
    for (const Scalar g : {0.9, 0.99, 0.995}) {
      CHECK(std::isfinite(sparse(v, g)));
      CHECK(sparse(v, g) >= 1.0);
      CHECK(std::isfinite(penalty(v, g)));
      CHECK(penalty(v, g) >= 1.0);
    }
  }
}

TEST_CASE("per-step-penalty is monotone: lower value means farther") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const Scalar a = uniform_range(rng, -400.0, -kDefaultEpsilonClip);
    const Scalar b = uniform_range(rng, -400.0, -kDefaultEpsilonClip);
    const Scalar lo = std::min(a, b);
    const Scalar hi = std::max(a, b);
    REQUIRE(penalty(lo, 0.99) >= penalty(hi, 0.99));
  }
}

TEST_CASE("l2 position distance") {
  const IndexRange slice{0, 2};
  CHECK(l2_position_distance(vec2(0, 0), vec2(3, 4), slice, 1.0).steps() ==
        5.0);
  CHECK(l2_position_distance(vec2(2, 2), vec2(2, 2), slice, 1.0).steps() ==
        1.0);
  CHECK(l2_position_distance(vec2(0, 0), vec2(10, 0), slice, 0.5).steps() ==
        20.0);
  CHECK_THROWS_AS(
      l2_position_distance(vec2(0, 0), StateVector::Zero(3), slice, 1.0),
      InputError);
  CHECK_THROWS_AS(
      l2_position_distance(vec2(0, 0), vec2(1, 1), IndexRange{1, 4}, 1.0),
      InputError);
  CHECK_THROWS_AS(l2_position_distance(vec2(0, 0), vec2(1, 1), slice, 0.0),
                  InputError);
}

TEST_CASE("average step length over consecutive states") {
  const IndexRange slice{0, 2};
  CHECK(average_step_length(line_dataset({{0, 1, 2}}), slice) == 1.0);
  // Mean of one 2-step and one 4-step hop.
  CHECK(average_step_length(line_dataset({{0, 2}, {0, 4}}), slice) == 3.0);
  // All states identical: zero average would poison every division.
  CHECK_THROWS_AS(average_step_length(line_dataset({{5, 5, 5}}), slice),
                  InputError);
  // Single-state trajectories have no consecutive pairs at all.
  CHECK_THROWS_AS(average_step_length(line_dataset({{3}}), slice), InputError);
}

namespace {

// A deterministic value function for predictor-level tests: the per-step
// value a perfect agent would see if the true distance were the L1 gap.
ValueFn l1_penalty_values(Scalar gamma) {
  return [gamma](ConstRef<StateVector> s, ConstRef<StateVector> g) {
    const Scalar d = (s - g).cwiseAbs().sum();
    return -(1.0 - std::pow(gamma, d)) / (1.0 - gamma);
  };
}

}  // namespace

TEST_CASE("predictor batch evaluation equals scalar evaluation bit for bit") {
  const DistancePredictor pred = DistancePredictor::per_step_penalty(
      l1_penalty_values(0.99), "l1-test", DiscountFactor(0.99));

  Rng rng(99);
  StateMatrix goals(9, 3);
  StateVector state(3);
  for (Index i = 0; i < state.size(); ++i) {
    state[i] = uniform_range(rng, -5.0, 5.0);
  }
  for (Index i = 0; i < goals.rows(); ++i) {
    for (Index j = 0; j < goals.cols(); ++j) {
      goals(i, j) = uniform_range(rng, -5.0, 5.0);
    }
  }

  const Vector<> from = pred.distances_from(state, goals);
  const Vector<> to = pred.distances_to(goals, state);
  REQUIRE(from.size() == goals.rows());
  for (Index i = 0; i < goals.rows(); ++i) {
    CHECK(from[i] == pred(state, goals.row(i).transpose()).steps());
    CHECK(to[i] == pred(goals.row(i).transpose(), state).steps());
  }
}

TEST_CASE("clipped-query counter tracks clamped evaluations") {
  const DistancePredictor pred = DistancePredictor::per_step_penalty(
      [](ConstRef<StateVector>, ConstRef<StateVector>) { return 5.0; },
      "always-positive", DiscountFactor(0.99));
  CHECK(pred.clipped_queries() == 0);
  const StateVector z = StateVector::Zero(2);
  for (int i = 0; i < 4; ++i) {
    CHECK(pred(z, z).steps() == 1.0);
  }
  CHECK(pred.clipped_queries() == 4);

  // Copies share the counter; it is a diagnostic of the underlying model.
  const DistancePredictor copy = pred;
  (void)copy(z, z);
  CHECK(pred.clipped_queries() == 5);

  pred.reset_clipped_queries();
  CHECK(pred.clipped_queries() == 0);

  // In-range evaluations leave the counter alone.
  const DistancePredictor clean = DistancePredictor::per_step_penalty(
      l1_penalty_values(0.99), "l1-test", DiscountFactor(0.99));
  (void)clean(vec2(0, 0), vec2(4, 3));
  CHECK(clean.clipped_queries() == 0);
}

TEST_CASE("fingerprints separate predictor configurations") {
  const ValueFn values = l1_penalty_values(0.99);
  const DistancePredictor a = DistancePredictor::per_step_penalty(
      values, "src", DiscountFactor(0.99));
  const DistancePredictor b = DistancePredictor::per_step_penalty(
      values, "src", DiscountFactor(0.99));
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint_hex().size() == 64);

  const DistancePredictor other_gamma = DistancePredictor::per_step_penalty(
      values, "src", DiscountFactor(0.95));
  const DistancePredictor other_eps = DistancePredictor::per_step_penalty(
      values, "src", DiscountFactor(0.99), 1e-2);
  const DistancePredictor other_src = DistancePredictor::per_step_penalty(
      values, "src2", DiscountFactor(0.99));
  const DistancePredictor other_conv = DistancePredictor::sparse_terminal(
      values, "src", DiscountFactor(0.99));
  CHECK(a.fingerprint() != other_gamma.fingerprint());
  CHECK(a.fingerprint() != other_eps.fingerprint());
  CHECK(a.fingerprint() != other_src.fingerprint());
  CHECK(a.fingerprint() != other_conv.fingerprint());
}

TEST_CASE("euclidean predictor wires the slice and normalization through") {
  const DistancePredictor pred =
      DistancePredictor::euclidean(IndexRange{1, 2}, 0.5);
  StateVector s(4), g(4);
  s << 9.0, 0.0, 0.0, -7.0;
  g << -2.0, 3.0, 4.0, 11.0;
  // Only coordinates 1..2 count: (3,4) gap over half-unit steps.
  CHECK(pred(s, g).steps() == 10.0);
  CHECK_THROWS_AS(DistancePredictor::euclidean(IndexRange{0, 2}, 0.0),
                  InputError);
}
