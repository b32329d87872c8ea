#pragma once

#include <utility>
#include <vector>

#include "cmpg/game.hpp"
#include "cmpg/policy.hpp"

namespace cmpg {

// Calls fn(joint_index, probability) for every joint action with positive
// probability under the product policy at (h, s). The agent `skip` (or -1
// for none) is left out: its digit stays 0 in joint_index and its factor is
// not included in the probability.
template <typename F>
void for_each_joint_action(const JointActionCodec& codec, const JointPolicy& policy, int h, int s,
                           int skip, F&& fn) {
  const int n = codec.agents();
  std::vector<std::vector<std::pair<int, double>>> support(n);
  for (int i = 0; i < n; ++i) {
    if (i == skip) {
      support[i].push_back({0, 1.0});
      continue;
    }
    const auto row = policy[i].row(h, s);
    for (int a = 0; a < static_cast<int>(row.size()); ++a) {
      if (row[a] > 0.0) support[i].push_back({a * codec.stride(i), row[a]});
    }
    if (support[i].empty()) return;
  }
  // Odometer over the supports; prefix products avoid recomputation.
  std::vector<int> pos(n, 0);
  std::vector<double> prefix_p(n + 1, 1.0);
  std::vector<int> prefix_j(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    prefix_p[i + 1] = prefix_p[i] * support[i][0].second;
    prefix_j[i + 1] = prefix_j[i] + support[i][0].first;
  }
  while (true) {
    fn(prefix_j[n], prefix_p[n]);
    int i = n - 1;
    while (i >= 0 && pos[i] + 1 == static_cast<int>(support[i].size())) --i;
    if (i < 0) return;
    ++pos[i];
    for (int k = i; k < n; ++k) {
      if (k > i) pos[k] = 0;
      prefix_p[k + 1] = prefix_p[k] * support[k][pos[k]].second;
      prefix_j[k + 1] = prefix_j[k] + support[k][pos[k]].first;
    }
  }
}

}  // namespace cmpg
