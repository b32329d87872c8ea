#include "cmpg/cmdp.hpp"

#include <cmath>
#include <string>

#include "cmpg/errors.hpp"

namespace cmpg {

void CMDP::validate() const {
  if (n_states < 1 || n_actions < 1 || horizon < 1) throw DimensionError("CMDP needs |S|, |A|, H >= 1");
  if (transitions.horizon() != horizon || transitions.states() != n_states || transitions.actions() != n_actions) {
    throw DimensionError("CMDP transition table shape mismatch");
  }
  transitions.validate(1e-12);
  if (reward.size() != stage_size() || cost.size() != stage_size()) throw DimensionError("CMDP stage table size mismatch");
  for (std::size_t k = 0; k < reward.size(); ++k) {
    if (!(reward[k] >= 0.0 && reward[k] <= 1.0)) throw ModelError("CMDP reward outside [0,1]");
    if (!(cost[k] >= 0.0 && cost[k] <= 1.0)) throw ModelError("CMDP cost outside [0,1]");
  }
  if (!(threshold >= 0.0 && threshold <= horizon)) throw ModelError("CMDP threshold outside [0, H]");
  if (static_cast<int>(initial_dist.size()) != n_states) throw DimensionError("CMDP initial_dist length mismatch");
  double mass = 0.0;
  for (double p : initial_dist) {
    if (!(p >= 0.0)) throw ModelError("negative initial probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-12) throw ModelError("CMDP initial_dist sums to " + std::to_string(mass));
}

void check_policy_dims(const CMDP& model, const AgentPolicy& policy) {
  if (policy.horizon() != model.horizon || policy.states() != model.n_states || policy.actions() != model.n_actions) {
    throw DimensionError("policy shape does not match CMDP");
  }
}

std::vector<double> state_values(const CMDP& model, const AgentPolicy& policy, std::span<const double> stage) {
  check_policy_dims(model, policy);
  if (stage.size() != model.stage_size()) throw DimensionError("stage table size mismatch");
  const int S = model.n_states;
  const int A = model.n_actions;
  std::vector<double> values(static_cast<std::size_t>(model.horizon) * S, 0.0);
  for (int h = model.horizon - 1; h >= 0; --h) {
    const double* next = h + 1 < model.horizon ? &values[static_cast<std::size_t>(h + 1) * S] : nullptr;
    for (int s = 0; s < S; ++s) {
      const auto pi = policy.row(h, s);
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        if (pi[a] == 0.0) continue;
        double q = stage[model.index(h, s, a)];
        if (next) {
          for (const Successor& e : model.transitions.row(h, s, a)) q += e.prob * next[e.state];
        }
        v += pi[a] * q;
      }
      values[static_cast<std::size_t>(h) * S + s] = v;
    }
  }
  return values;
}

double evaluate_stage(const CMDP& model, const AgentPolicy& policy, std::span<const double> stage) {
  const auto values = state_values(model, policy, stage);
  double v = 0.0;
  for (int s = 0; s < model.n_states; ++s) v += model.initial_dist[s] * values[s];
  return v;
}

CmdpValues evaluate(const CMDP& model, const AgentPolicy& policy) {
  return {evaluate_stage(model, policy, model.reward), evaluate_stage(model, policy, model.cost)};
}

CMPG as_single_agent_game(const CMDP& model) {
  CMPG game;
  game.n_agents = 1;
  game.n_states = model.n_states;
  game.horizon = model.horizon;
  game.actions_per_agent = {model.n_actions};
  game.transitions = model.transitions;
  game.rewards = {model.reward};
  game.costs = {model.cost};
  game.thresholds = {model.threshold};
  game.initial_dist = model.initial_dist;
  game.cooperative = true;
  return game;
}

CMDP from_single_agent_game(const CMPG& game) {
  if (game.n_agents != 1) throw DimensionError("CMDP document must have n_agents = 1");
  if (game.n_constraints() != 1) throw UnsupportedOperation("CMDP requires exactly one constraint");
  CMDP model;
  model.n_states = game.n_states;
  model.n_actions = game.actions_per_agent.at(0);
  model.horizon = game.horizon;
  model.transitions = game.transitions;
  model.reward = game.rewards.at(0);
  model.cost = game.costs.at(0);
  model.threshold = game.thresholds.at(0);
  model.initial_dist = game.initial_dist;
  return model;
}

CMDP known_structure(const CMDP& model) {
  CMDP copy;
  copy.n_states = model.n_states;
  copy.n_actions = model.n_actions;
  copy.horizon = model.horizon;
  copy.reward = model.reward;
  copy.cost = model.cost;
  copy.threshold = model.threshold;
  copy.initial_dist = model.initial_dist;
  return copy;
}

}  // namespace cmpg
