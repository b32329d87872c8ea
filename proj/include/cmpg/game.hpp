#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmpg/transition_table.hpp"

namespace cmpg {

// Mixed-radix coding of joint actions. Agent 0 is the most significant digit,
// so joint indices order profiles lexicographically.
class JointActionCodec {
 public:
  JointActionCodec() = default;
  explicit JointActionCodec(std::vector<int> actions_per_agent);

  int agents() const { return static_cast<int>(actions_.size()); }
  int size() const { return size_; }
  int actions(int agent) const { return actions_[agent]; }
  int stride(int agent) const { return strides_[agent]; }

  int encode(std::span<const int> profile) const;
  void decode(int joint, std::span<int> profile) const;
  int action_of(int joint, int agent) const { return (joint / strides_[agent]) % actions_[agent]; }

 private:
  std::vector<int> actions_;
  std::vector<int> strides_;
  int size_ = 1;
};

// Tabular finite-horizon constrained Markov game. Steps are zero-based in
// code: h = 0 .. horizon-1. Stage tables are flat arrays indexed (h, s, a)
// row-major with a the joint action.
struct CMPG {
  std::string name;
  int n_agents = 0;
  int n_states = 0;
  int horizon = 0;
  std::vector<int> actions_per_agent;
  TransitionTable transitions;
  std::vector<std::vector<double>> rewards;  // [agent][(h*S+s)*A+a]
  std::vector<std::vector<double>> costs;    // [constraint][(h*S+s)*A+a]
  std::vector<double> thresholds;
  std::vector<double> initial_dist;
  // Every agent receives the same reward table.
  bool cooperative = false;
  // Stage quantities depend on the other agents only through action counts;
  // enables the count-convolution marginalizer.
  bool count_symmetric = false;

  int joint_actions() const;
  int n_constraints() const { return static_cast<int>(costs.size()); }
  JointActionCodec codec() const { return JointActionCodec(actions_per_agent); }
  std::size_t index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * n_states + s) * joint_actions() + a;
  }
  std::size_t stage_size() const {
    return static_cast<std::size_t>(horizon) * n_states * joint_actions();
  }

  // Throws DimensionError / ModelError on any violated invariant.
  void validate() const;
};

// True when all reward tables are bitwise equal.
bool rewards_identical(const CMPG& game);

// Sets game.cooperative from the reward tables and validates.
void finalize(CMPG& game);

}  // namespace cmpg
