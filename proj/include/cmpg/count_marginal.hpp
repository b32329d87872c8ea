#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cmpg/game.hpp"
#include "cmpg/policy.hpp"

namespace cmpg {

// Distribution over action-count vectors for games whose stage quantities
// depend on the other agents only through how many of them pick each action.
// A count vector (k_0, ..., k_{A-1}) is keyed as sum_a k_a (n+1)^a.
class CountMarginalizer {
 public:
  using CountDist = std::vector<std::pair<std::uint64_t, double>>;  // sorted by key

  explicit CountMarginalizer(const CMPG& game);

  int agents() const { return n_; }
  int actions() const { return m_; }

  // Law of the count vector of all agents except `skip` (-1: all agents) at
  // (h, s), convolved one agent at a time.
  CountDist convolve(const JointPolicy& policy, int h, int s, int skip) const;

  // Joint index of a profile in which `agent` plays own_action and the other
  // agents, taken in index order, realise the counts in `key`.
  int representative(int agent, int own_action, std::uint64_t key) const;
  // Joint index of a full profile realising `key`.
  int representative(std::uint64_t key) const;

  std::vector<int> decode(std::uint64_t key) const;
  std::uint64_t unit(int action) const { return powers_[action]; }

 private:
  int n_;
  int m_;
  JointActionCodec codec_;
  std::vector<std::uint64_t> powers_;
};

}  // namespace cmpg
