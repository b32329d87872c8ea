#include <algorithm>

#include "cmpg/ca_cmpg.hpp"
#include "cmpg/cmdp_solvers.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/evaluation.hpp"

namespace cmpg {

NashReport verify_nash(const CMPG& game, const JointPolicy& policy, double tol) {
  check_policy_dims(game, policy);
  const EvalResult current = evaluate(game, policy);
  for (int j = 0; j < game.n_constraints(); ++j) {
    if (current.cost_values[j] > game.thresholds[j] + tol) {
      throw InfeasibleError("verify_nash: policy violates constraint " + std::to_string(j));
    }
  }
  NashReport out;
  out.values = current.reward_values;
  for (int i = 0; i < game.n_agents; ++i) {
    const CMDP m = induce_cmdp(game, i, policy);
    const auto best = solve_cmdp_lp(m);
    if (!best) throw SolverError("verify_nash: induced CMDP infeasible at a feasible profile");
    out.best_values.push_back(best->reward_value);
    out.gaps.push_back(best->reward_value - current.reward_values[i]);
  }
  out.epsilon = *std::max_element(out.gaps.begin(), out.gaps.end());
  return out;
}

ValueEstimate estimate_value_mc(const CMPG& game, const JointPolicy& policy, std::uint64_t M, Rng& rng) {
  if (M < 1) throw ConfigError("estimate_value_mc: M must be at least 1");
  check_policy_dims(game, policy);
  ValueEstimate out;
  out.reward_values.assign(game.n_agents, 0.0);
  out.cost_values.assign(game.n_constraints(), 0.0);
  for (std::uint64_t m = 0; m < M; ++m) {
    const Trajectory traj = sample_episode(game, policy, rng);
    for (const StepRecord& step : traj) {
      for (int i = 0; i < game.n_agents; ++i) out.reward_values[i] += step.rewards[i];
      for (int j = 0; j < game.n_constraints(); ++j) out.cost_values[j] += step.costs[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(M);
  for (double& v : out.reward_values) v *= inv;
  for (double& v : out.cost_values) v *= inv;
  out.episodes = M;
  return out;
}

}  // namespace cmpg
