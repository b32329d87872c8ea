#include "cmpg/count_marginal.hpp"

#include <limits>
#include <map>

#include "cmpg/errors.hpp"

namespace cmpg {

CountMarginalizer::CountMarginalizer(const CMPG& game)
    : n_(game.n_agents), m_(game.actions_per_agent.front()), codec_(game.actions_per_agent) {
  if (!game.count_symmetric) throw UnsupportedOperation("count marginalization needs a count-symmetric game");
  const std::uint64_t base = static_cast<std::uint64_t>(n_) + 1;
  powers_.assign(m_, 1);
  for (int a = 1; a < m_; ++a) {
    if (powers_[a - 1] > std::numeric_limits<std::uint64_t>::max() / base / base) {
      throw UnsupportedOperation("count vectors too large to key");
    }
    powers_[a] = powers_[a - 1] * base;
  }
}

CountMarginalizer::CountDist CountMarginalizer::convolve(const JointPolicy& policy, int h, int s,
                                                         int skip) const {
  std::map<std::uint64_t, double> current{{0, 1.0}};
  for (int j = 0; j < n_; ++j) {
    if (j == skip) continue;
    const auto row = policy[j].row(h, s);
    std::map<std::uint64_t, double> next;
    for (const auto& [key, mass] : current) {
      for (int a = 0; a < m_; ++a) {
        if (row[a] > 0.0) next[key + powers_[a]] += mass * row[a];
      }
    }
    current.swap(next);
  }
  return CountDist(current.begin(), current.end());
}

std::vector<int> CountMarginalizer::decode(std::uint64_t key) const {
  std::vector<int> counts(m_);
  const std::uint64_t base = static_cast<std::uint64_t>(n_) + 1;
  for (int a = 0; a < m_; ++a) {
    counts[a] = static_cast<int>(key % base);
    key /= base;
  }
  return counts;
}

int CountMarginalizer::representative(int agent, int own_action, std::uint64_t key) const {
  std::vector<int> counts = decode(key);
  int joint = agent >= 0 ? own_action * codec_.stride(agent) : 0;
  int a = 0;
  for (int j = 0; j < n_; ++j) {
    if (j == agent) continue;
    while (a < m_ && counts[a] == 0) ++a;
    if (a == m_) throw DimensionError("count vector does not cover every agent");
    joint += a * codec_.stride(j);
    --counts[a];
  }
  return joint;
}

int CountMarginalizer::representative(std::uint64_t key) const { return representative(-1, 0, key); }

}  // namespace cmpg
