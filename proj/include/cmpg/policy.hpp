#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cmpg {

struct CMPG;

// Markov policy of one agent: a distribution over its actions for every
// (step, state). Rows are stored contiguously, (h, s) row-major.
class AgentPolicy {
 public:
  AgentPolicy() = default;
  // All-zero table; callers fill rows before use.
  AgentPolicy(int horizon, int states, int actions);

  static AgentPolicy uniform(int horizon, int states, int actions);
  // actions_by_row[h*S+s] is the action taken at (h, s).
  static AgentPolicy deterministic(int horizon, int states, int actions,
                                   std::span<const int> actions_by_row);
  // Same distribution at every (h, s).
  static AgentPolicy stationary(int horizon, int states, std::span<const double> dist);

  int horizon() const { return horizon_; }
  int states() const { return states_; }
  int actions() const { return actions_; }

  double operator()(int h, int s, int a) const { return probs_[offset(h, s) + a]; }
  double& at(int h, int s, int a) { return probs_[offset(h, s) + a]; }
  std::span<const double> row(int h, int s) const { return {probs_.data() + offset(h, s), static_cast<std::size_t>(actions_)}; }
  std::span<double> row(int h, int s) { return {probs_.data() + offset(h, s), static_cast<std::size_t>(actions_)}; }
  void set_row(int h, int s, std::span<const double> dist);
  void set_action(int h, int s, int a);  // point mass

  const std::vector<double>& data() const { return probs_; }
  std::vector<double>& data() { return probs_; }

  bool is_deterministic() const;
  // Throws ModelError if a row is not a distribution within tol.
  void validate(double tol = 1e-12) const;

  bool operator==(const AgentPolicy& other) const = default;

 private:
  std::size_t offset(int h, int s) const {
    return (static_cast<std::size_t>(h) * states_ + s) * actions_;
  }
  int horizon_ = 0;
  int states_ = 0;
  int actions_ = 0;
  std::vector<double> probs_;
};

// Product policy profile; entry i is agent i's policy.
using JointPolicy = std::vector<AgentPolicy>;

// Throws DimensionError when the profile does not fit the game.
void check_policy_dims(const CMPG& game, const JointPolicy& policy);
void check_agent_policy_dims(const CMPG& game, int agent, const AgentPolicy& policy);

JointPolicy uniform_policy(const CMPG& game);

// Max absolute entry difference; policies must share a shape.
double max_abs_difference(const AgentPolicy& a, const AgentPolicy& b);

}  // namespace cmpg
