#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmpg/game.hpp"
#include "cmpg/policy.hpp"
#include "cmpg/transition_table.hpp"

namespace cmpg {

// Single-agent finite-horizon CMDP with one constraint. Same (h, s, a)
// layout as CMPG stage tables.
struct CMDP {
  int n_states = 0;
  int n_actions = 0;
  int horizon = 0;
  TransitionTable transitions;
  std::vector<double> reward;
  std::vector<double> cost;
  double threshold = 0.0;
  std::vector<double> initial_dist;

  std::size_t index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * n_states + s) * n_actions + a;
  }
  std::size_t stage_size() const { return static_cast<std::size_t>(horizon) * n_states * n_actions; }

  void validate() const;
};

struct CmdpValues {
  double reward = 0.0;
  double cost = 0.0;
};

CmdpValues evaluate(const CMDP& model, const AgentPolicy& policy);
// Expected cumulative value of an arbitrary stage table.
double evaluate_stage(const CMDP& model, const AgentPolicy& policy, std::span<const double> stage);
// V_h(s) table for a stage, flat (h*S + s).
std::vector<double> state_values(const CMDP& model, const AgentPolicy& policy, std::span<const double> stage);

void check_policy_dims(const CMDP& model, const AgentPolicy& policy);

// The n_agents = 1 view used for serialization.
CMPG as_single_agent_game(const CMDP& model);
CMDP from_single_agent_game(const CMPG& game);

// Copy of the model with transitions removed: what a learner knows.
CMDP known_structure(const CMDP& model);

}  // namespace cmpg
