#include "cmpg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmpg/errors.hpp"
#include "cmpg/game.hpp"

namespace cmpg {

AgentPolicy::AgentPolicy(int horizon, int states, int actions)
    : horizon_(horizon), states_(states), actions_(actions) {
  if (horizon < 1 || states < 1 || actions < 1) throw DimensionError("policy needs H, |S|, |A| >= 1");
  probs_.assign(static_cast<std::size_t>(horizon) * states * actions, 0.0);
}

AgentPolicy AgentPolicy::uniform(int horizon, int states, int actions) {
  AgentPolicy p(horizon, states, actions);
  std::fill(p.probs_.begin(), p.probs_.end(), 1.0 / actions);
  return p;
}

AgentPolicy AgentPolicy::deterministic(int horizon, int states, int actions,
                                       std::span<const int> actions_by_row) {
  AgentPolicy p(horizon, states, actions);
  if (actions_by_row.size() != static_cast<std::size_t>(horizon) * states) {
    throw DimensionError("deterministic policy needs one action per (h, s)");
  }
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) p.set_action(h, s, actions_by_row[static_cast<std::size_t>(h) * states + s]);
  }
  return p;
}

AgentPolicy AgentPolicy::stationary(int horizon, int states, std::span<const double> dist) {
  AgentPolicy p(horizon, states, static_cast<int>(dist.size()));
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) p.set_row(h, s, dist);
  }
  return p;
}

void AgentPolicy::set_row(int h, int s, std::span<const double> dist) {
  if (static_cast<int>(dist.size()) != actions_) throw DimensionError("policy row has wrong length");
  std::copy(dist.begin(), dist.end(), probs_.begin() + offset(h, s));
}

void AgentPolicy::set_action(int h, int s, int a) {
  if (a < 0 || a >= actions_) throw DimensionError("action index out of range");
  auto r = row(h, s);
  std::fill(r.begin(), r.end(), 0.0);
  r[a] = 1.0;
}

bool AgentPolicy::is_deterministic() const {
  for (int h = 0; h < horizon_; ++h) {
    for (int s = 0; s < states_; ++s) {
      int ones = 0;
      for (double p : row(h, s)) {
        if (p == 1.0) ++ones;
        else if (p != 0.0) return false;
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

void AgentPolicy::validate(double tol) const {
  for (int h = 0; h < horizon_; ++h) {
    for (int s = 0; s < states_; ++s) {
      double sum = 0.0;
      for (double p : row(h, s)) {
        if (!(p >= 0.0)) {
          throw ModelError("policy row (h=" + std::to_string(h) + ", s=" + std::to_string(s) + ") has a negative entry");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw ModelError("policy row (h=" + std::to_string(h) + ", s=" + std::to_string(s) + ") sums to " +
                         std::to_string(sum));
      }
    }
  }
}

void check_agent_policy_dims(const CMPG& game, int agent, const AgentPolicy& policy) {
  if (policy.horizon() != game.horizon || policy.states() != game.n_states ||
      policy.actions() != game.actions_per_agent[agent]) {
    throw DimensionError("policy of agent " + std::to_string(agent) + " has shape (" +
                         std::to_string(policy.horizon()) + "," + std::to_string(policy.states()) + "," +
                         std::to_string(policy.actions()) + "), game expects (" + std::to_string(game.horizon) +
                         "," + std::to_string(game.n_states) + "," +
                         std::to_string(game.actions_per_agent[agent]) + ")");
  }
}

void check_policy_dims(const CMPG& game, const JointPolicy& policy) {
  if (static_cast<int>(policy.size()) != game.n_agents) {
    throw DimensionError("joint policy has " + std::to_string(policy.size()) + " agents, game has " +
                         std::to_string(game.n_agents));
  }
  for (int i = 0; i < game.n_agents; ++i) check_agent_policy_dims(game, i, policy[i]);
}

JointPolicy uniform_policy(const CMPG& game) {
  JointPolicy pi;
  for (int i = 0; i < game.n_agents; ++i) {
    pi.push_back(AgentPolicy::uniform(game.horizon, game.n_states, game.actions_per_agent[i]));
  }
  return pi;
}

double max_abs_difference(const AgentPolicy& a, const AgentPolicy& b) {
  if (a.data().size() != b.data().size()) throw DimensionError("policies differ in shape");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace cmpg
