#include "ttgs/planner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace ttgs {

StepBudget::StepBudget(Scalar t) : t_(t) {
  if (!std::isfinite(t) || t < 1.0) {
    throw InputError("subgoal budget T must be finite and >= 1, got " +
                     std::to_string(t));
  }
}

char subgoal_kind_code(SubgoalKind kind) {
  switch (kind) {
    case SubgoalKind::kFinalGoal: return 'G';
    case SubgoalKind::kFarthestReachable: return 'R';
    case SubgoalKind::kFallbackNext: return 'N';
  }
  throw Error("unknown subgoal kind");
}

PlannerState plan_episode(const PlanningGraph& graph,
                          const DistancePredictor& predictor,
                          ConstRef<StateVector> start,
                          ConstRef<StateVector> goal, StepBudget budget) {
  const Index v_start = nearest_vertex_from(start, graph, predictor);
  const Index v_goal = nearest_vertex_to(goal, graph, predictor);
  PlannerState state;
  state.guide = shortest_path(graph, v_start, v_goal);
  state.k_prev = 0;
  state.goal = goal;
  state.budget = budget.value();
  return state;
}

SubgoalDecision select_subgoal(const PlannerState& state,
                               ConstRef<StateVector> current,
                               const DistancePredictor& predictor,
                               Index window) {
  const Index n = state.guide.length();
  if (n < 1) {
    throw InputError("select_subgoal: guide path is empty");
  }
  if (state.k_prev < 0 || state.k_prev >= n) {
    throw InputError("select_subgoal: k_prev out of range");
  }
  const Index last = n - 1;
  Index lo = 0;
  Index hi = last;
  if (window > 0) {
    lo = state.k_prev;
    hi = std::min(last, state.k_prev + window);
  }

  // Predicted cost from the current state to each scanned waypoint.
  Vector<> delta(hi - lo + 1);
  for (Index l = lo; l <= hi; ++l) {
    delta[l - lo] = predictor(current,
                              state.guide.waypoint_states.row(l).transpose())
                        .steps();
  }
  const Scalar delta_goal = predictor(current, state.goal).steps();

  Index k = lo;
  for (Index l = lo; l <= hi; ++l) {
    if (delta[l - lo] < delta[k - lo]) {
      k = l;
    }
  }
  k = std::max(k, state.k_prev);

  SubgoalDecision decision;
  decision.updated_k = k;

  if (delta_goal <= state.budget) {
    decision.kind = SubgoalKind::kFinalGoal;
    decision.subgoal = state.goal;
    return decision;
  }

  // Farthest waypoint strictly past k that is still within budget.
  Index candidate = -1;
  for (Index l = hi; l > k; --l) {
    if (l >= lo && delta[l - lo] <= state.budget) {
      candidate = l;
      break;
    }
  }
  if (candidate >= 0) {
    decision.kind = SubgoalKind::kFarthestReachable;
    decision.chosen_index = candidate;
    decision.subgoal =
        state.guide.waypoint_states.row(candidate).transpose();
    return decision;
  }

  const Index next = std::min(k + 1, last);
  decision.kind = SubgoalKind::kFallbackNext;
  decision.chosen_index = next;
  decision.subgoal = state.guide.waypoint_states.row(next).transpose();
  return decision;
}

namespace {

EpisodeRecord run_loop(EnvHandle& env, const PolicyFn& policy,
                       PlannerState planner, ConstRef<StateVector> start,
                       const DistancePredictor& predictor, Index max_steps,
                       Index window) {
  if (max_steps < 0) {
    throw InputError("run_episode: max_steps must be >= 0");
  }
  if (!env.step || !env.reached || !policy) {
    throw InputError("run_episode: environment and policy handles must be "
                     "set");
  }
  EpisodeRecord record;
  StateVector s = start;
  record.states.push_back(s);
  bool success = false;
  while (record.steps < max_steps) {
    if (env.reached(s, planner.goal)) {
      success = true;
      break;
    }
    SubgoalDecision decision = select_subgoal(planner, s, predictor, window);
    planner.k_prev = decision.updated_k;
    const Action a = policy(s, decision.subgoal);
    s = env.step(a);
    ++record.steps;
    record.states.push_back(s);
    record.subgoals.push_back(std::move(decision.subgoal));
    record.decisions.push_back(subgoal_kind_code(decision.kind));
  }
  // The loop can exhaust max_steps on the exact step that lands on the goal.
  record.success = success || env.reached(s, planner.goal);
  return record;
}

}  // namespace

EpisodeRecord run_episode(EnvHandle& env, const PolicyFn& policy,
                          const PlanningGraph& graph,
                          const DistancePredictor& predictor,
                          ConstRef<StateVector> start,
                          ConstRef<StateVector> goal, StepBudget budget,
                          Index max_steps, Index window) {
  PlannerState planner = plan_episode(graph, predictor, start, goal, budget);
  return run_loop(env, policy, std::move(planner), start, predictor, max_steps,
                  window);
}

EpisodeRecord run_episode_with_guide(EnvHandle& env, const PolicyFn& policy,
                                     const GuidePath& guide,
                                     const DistancePredictor& predictor,
                                     ConstRef<StateVector> start,
                                     ConstRef<StateVector> goal,
                                     StepBudget budget, Index max_steps,
                                     Index window) {
  PlannerState planner;
  planner.guide = guide;
  planner.k_prev = 0;
  planner.goal = goal;
  planner.budget = budget.value();
  return run_loop(env, policy, std::move(planner), start, predictor, max_steps,
                  window);
}

std::string episode_record_line(const EpisodeRecord& record) {
  nlohmann::json obj;
  obj["seed"] = record.seed;
  obj["task"] = record.task;
  obj["success"] = record.success;
  obj["steps"] = record.steps;
  obj["decisions"] = record.decisions;
  return obj.dump();
}

}  // namespace ttgs
