#include "cmpg/game.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cmpg/errors.hpp"

namespace cmpg {

JointActionCodec::JointActionCodec(std::vector<int> actions_per_agent)
    : actions_(std::move(actions_per_agent)), strides_(actions_.size(), 1) {
  long long total = 1;
  for (int i = static_cast<int>(actions_.size()) - 1; i >= 0; --i) {
    if (actions_[i] < 1) throw DimensionError("every agent needs at least one action");
    strides_[i] = static_cast<int>(total);
    total *= actions_[i];
    if (total > std::numeric_limits<int>::max()) {
      throw DimensionError("joint action space too large to index");
    }
  }
  size_ = static_cast<int>(total);
}

int JointActionCodec::encode(std::span<const int> profile) const {
  if (profile.size() != actions_.size()) throw DimensionError("profile length != number of agents");
  int joint = 0;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (profile[i] < 0 || profile[i] >= actions_[i]) throw DimensionError("action index out of range");
    joint += profile[i] * strides_[i];
  }
  return joint;
}

void JointActionCodec::decode(int joint, std::span<int> profile) const {
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    profile[i] = (joint / strides_[i]) % actions_[i];
  }
}

int CMPG::joint_actions() const {
  long long total = 1;
  for (int a : actions_per_agent) total *= a;
  return static_cast<int>(total);
}

namespace {

void check_stage_table(const std::vector<double>& table, std::size_t expected, const std::string& what) {
  if (table.size() != expected) {
    throw DimensionError(what + ": expected " + std::to_string(expected) + " entries, got " +
                         std::to_string(table.size()));
  }
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (!(table[k] >= 0.0 && table[k] <= 1.0)) {
      throw ModelError(what + " entry " + std::to_string(k) + " = " + std::to_string(table[k]) +
                       " outside [0,1]");
    }
  }
}

}  // namespace

void CMPG::validate() const {
  if (n_agents < 1) throw DimensionError("n_agents must be >= 1");
  if (n_states < 1) throw DimensionError("states must be >= 1");
  if (horizon < 1) throw DimensionError("horizon must be >= 1");
  if (static_cast<int>(actions_per_agent.size()) != n_agents) {
    throw DimensionError("actions_per_agent has " + std::to_string(actions_per_agent.size()) +
                         " entries for " + std::to_string(n_agents) + " agents");
  }
  JointActionCodec check(actions_per_agent);
  const int A = check.size();
  if (transitions.horizon() != horizon || transitions.states() != n_states || transitions.actions() != A) {
    throw DimensionError("transition table shape does not match the game");
  }
  transitions.validate(1e-12);
  if (static_cast<int>(rewards.size()) != n_agents) throw DimensionError("one reward table per agent required");
  const std::size_t expected = stage_size();
  for (int i = 0; i < n_agents; ++i) check_stage_table(rewards[i], expected, "reward[" + std::to_string(i) + "]");
  for (std::size_t j = 0; j < costs.size(); ++j) check_stage_table(costs[j], expected, "cost[" + std::to_string(j) + "]");
  if (thresholds.size() != costs.size()) throw DimensionError("one threshold per cost function required");
  for (double alpha : thresholds) {
    if (!(alpha >= 0.0 && alpha <= horizon)) throw ModelError("threshold outside [0, H]");
  }
  if (static_cast<int>(initial_dist.size()) != n_states) throw DimensionError("initial_dist length != states");
  double mass = 0.0;
  for (double p : initial_dist) {
    if (!(p >= 0.0)) throw ModelError("negative initial probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-12) throw ModelError("initial_dist sums to " + std::to_string(mass));
  if (cooperative && !rewards_identical(*this)) throw ModelError("cooperative flag set but rewards differ");
  if (count_symmetric) {
    for (int a : actions_per_agent) {
      if (a != actions_per_agent.front()) throw ModelError("count symmetry needs equal action sets");
    }
  }
}

bool rewards_identical(const CMPG& game) {
  for (std::size_t i = 1; i < game.rewards.size(); ++i) {
    if (game.rewards[i] != game.rewards[0]) return false;
  }
  return true;
}

void finalize(CMPG& game) {
  game.cooperative = rewards_identical(game);
  game.validate();
}

}  // namespace cmpg
