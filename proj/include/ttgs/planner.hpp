#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ttgs/graph.hpp"
#include "ttgs/types.hpp"

namespace ttgs {

// Subgoal reachability budget T, in predicted steps.
class StepBudget {
 public:
  explicit StepBudget(Scalar t);
  Scalar value() const { return t_; }

 private:
  Scalar t_;
};

enum class SubgoalKind {
  kFinalGoal,           // the true goal is within budget
  kFarthestReachable,   // farthest waypoint past k with predicted cost <= T
  kFallbackNext,        // nothing reachable: aim at the next waypoint
};

char subgoal_kind_code(SubgoalKind kind);  // 'G', 'R', 'N'

struct SubgoalDecision {
  StateVector subgoal;
  SubgoalKind kind = SubgoalKind::kFallbackNext;
  std::optional<Index> chosen_index;  // waypoint index; empty for the goal
  Index updated_k = 0;
};

// Per-episode planning state. The guide path is computed once per episode
// and never mutated; k_prev only grows.
struct PlannerState {
  GuidePath guide;
  Index k_prev = 0;
  StateVector goal;
  Scalar budget = 1.0;
};

// Locates start and goal in the graph and runs the shortest-path query.
PlannerState plan_episode(const PlanningGraph& graph,
                          const DistancePredictor& predictor,
                          ConstRef<StateVector> start,
                          ConstRef<StateVector> goal, StepBudget budget);

// One subgoal-selection step:
//   k      = max(argmin_l d(s, p_l), k_prev)        (ties to the lowest l)
//   goal within budget            -> FinalGoal
//   waypoints past k within budget -> FarthestReachable (largest index)
//   otherwise                      -> FallbackNext (waypoint min(k+1, L))
// window > 0 restricts the scanned waypoints to [k_prev, k_prev + window],
// which callers may use to cap per-step cost on very long guides.
SubgoalDecision select_subgoal(const PlannerState& state,
                               ConstRef<StateVector> current,
                               const DistancePredictor& predictor,
                               Index window = 0);

// Environments and policies are opaque callables: the planner only needs to
// step, to query success, and to ask the policy for an action.
using Action = int;
using PolicyFn = std::function<Action(ConstRef<StateVector> state,
                                      ConstRef<StateVector> subgoal)>;

struct EnvHandle {
  std::function<StateVector(Action)> step;
  std::function<bool(ConstRef<StateVector> state, ConstRef<StateVector> goal)>
      reached;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  int task = 0;
  bool success = false;
  Index steps = 0;
  std::string decisions;               // one subgoal_kind_code per step
  std::vector<StateVector> states;     // visited states, length steps + 1
  std::vector<StateVector> subgoals;   // chosen subgoal per step
};

// Closed control loop: re-select the subgoal every step, act, stop on goal
// or after max_steps environment steps. The environment must already be at
// `start`.
EpisodeRecord run_episode(EnvHandle& env, const PolicyFn& policy,
                          const PlanningGraph& graph,
                          const DistancePredictor& predictor,
                          ConstRef<StateVector> start,
                          ConstRef<StateVector> goal, StepBudget budget,
                          Index max_steps, Index window = 0);

// Same loop, but with a guide path the caller has already computed (several
// episodes of one task can share the plan, which is deterministic anyway).
EpisodeRecord run_episode_with_guide(EnvHandle& env, const PolicyFn& policy,
                                     const GuidePath& guide,
                                     const DistancePredictor& predictor,
                                     ConstRef<StateVector> start,
                                     ConstRef<StateVector> goal,
                                     StepBudget budget, Index max_steps,
                                     Index window = 0);

// One-line text export: {"seed":..,"task":..,"success":..,"steps":..,
// "decisions":"..."}.
std::string episode_record_line(const EpisodeRecord& record);

}  // namespace ttgs
