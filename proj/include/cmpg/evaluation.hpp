#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmpg/game.hpp"
#include "cmpg/policy.hpp"
#include "cmpg/random.hpp"

namespace cmpg {

// How expectations over the joint action are formed at each (h, s).
enum class Marginalizer {
  automatic,          // count convolution when the game declares count symmetry
  naive,              // enumerate joint actions with positive probability
  count_convolution,  // requires game.count_symmetric
};

struct EvalOptions {
  bool per_step_values = false;
  Marginalizer marginalizer = Marginalizer::automatic;
};

// V^l_h(s) tables, flat (h*S + s).
struct StepValues {
  std::vector<std::vector<double>> reward;  // [agent]
  std::vector<std::vector<double>> cost;    // [constraint]
};

struct EvalResult {
  std::vector<double> reward_values;  // V^{r_i}
  std::vector<double> cost_values;    // V^{c_j}
  std::optional<StepValues> per_step;
};

// Exact values by backward induction over the joint process.
EvalResult evaluate(const CMPG& game, const JointPolicy& policy, const EvalOptions& options = {});

struct FeasibilityReport {
  bool feasible = true;
  std::vector<double> slacks;  // alpha_j - V^{c_j}
};

FeasibilityReport is_feasible(const CMPG& game, const JointPolicy& policy, double tol = 1e-10);

struct StepRecord {
  int state = 0;
  std::vector<int> actions;
  int joint_action = 0;
  std::vector<double> rewards;
  std::vector<double> costs;
  int next_state = 0;
};
using Trajectory = std::vector<StepRecord>;

Trajectory sample_episode(const CMPG& game, const JointPolicy& policy, std::uint64_t seed);
Trajectory sample_episode(const CMPG& game, const JointPolicy& policy, Rng& rng);

// V^{r_i}(dev, pi_{-i}) - V^{r_i}(pi). Cooperative games only, where this is
// the potential difference.
double potential_gap(const CMPG& game, const JointPolicy& policy, const AgentPolicy& deviation, int agent);

// Copy of `policy` with agent's entry replaced.
JointPolicy with_agent(const JointPolicy& policy, int agent, const AgentPolicy& replacement);

}  // namespace cmpg
