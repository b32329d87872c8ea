#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cmpg/cmdp.hpp"
#include "cmpg/evaluation.hpp"
#include "cmpg/game.hpp"
#include "cmpg/occupancy.hpp"
#include "cmpg/policy.hpp"

namespace cmpg {

// CMDP faced by `agent` when every other agent follows `profile` (the
// agent's own entry in `profile` is ignored). Rewards, cost and transitions
// are the exact opponent marginals. Games without constraints get a zero
// cost with threshold H.
CMDP induce_cmdp(const CMPG& game, int agent, const JointPolicy& profile,
                 Marginalizer marginalizer = Marginalizer::automatic);

struct MdpSolution {
  AgentPolicy policy;          // deterministic
  double value = 0.0;          // from the initial distribution
  std::vector<double> values;  // V_h(s), flat (h*S + s)
};

// Backward induction maximizing the given stage table over model's dynamics.
// Ties (within 1e-12 relative) go to the lowest action index.
MdpSolution solve_mdp(const CMDP& model, std::span<const double> stage_reward);

struct CmdpSolution {
  AgentPolicy policy;
  double reward_value = 0.0;  // exact evaluation of `policy`
  double cost_value = 0.0;
  OccupancyMeasure occupancy;
  long lp_iterations = 0;
};

// Occupancy LP: maximize sum rho r subject to the flow equations, rho >= 0
// and sum rho c <= threshold. Only (h, s) pairs reachable under some action
// sequence carry variables. Rows without occupancy mass copy the
// unconstrained greedy policy. Returns nullopt when no feasible point exists.
// Throws SolverError if the solution fails the 1e-8 residual checks.
std::optional<CmdpSolution> solve_cmdp_lp(const CMDP& model);

}  // namespace cmpg
