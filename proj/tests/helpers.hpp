#pragma once

// Random model generators and independent reference computations for tests.
// The references use forward propagation and brute-force enumeration so they
// share no code path with the library's backward induction or LP.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cmpg/cmdp.hpp"
#include "cmpg/game.hpp"
#include "cmpg/policy.hpp"
#include "cmpg/random.hpp"

namespace testutil {

using namespace cmpg;

inline std::vector<double> random_dist(Rng& rng, int n, double zero_prob = 0.0) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) {
    x = uniform01(rng) < zero_prob ? 0.0 : uniform01(rng) + 1e-3;
    total += x;
  }
  if (total == 0.0) {
    p[static_cast<int>(uniform01(rng) * n) % n] = 1.0;
    return p;
  }
  for (double& x : p) x /= total;
  return p;
}

inline TransitionTable random_transitions(Rng& rng, int H, int S, int A, double zero_prob = 0.3) {
  TransitionTable t(H, S, A);
  for (std::size_t r = 0; r < t.rows(); ++r) t.push_dense_row(random_dist(rng, S, zero_prob));
  return t;
}

inline std::vector<double> random_table(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform01(rng);
  return v;
}

// Threshold left at H; callers tighten it.
inline CMDP random_cmdp(Rng& rng, int S, int A, int H) {
  CMDP m;
  m.n_states = S;
  m.n_actions = A;
  m.horizon = H;
  m.transitions = random_transitions(rng, H, S, A);
  m.reward = random_table(rng, m.stage_size());
  m.cost = random_table(rng, m.stage_size());
  m.threshold = H;
  m.initial_dist = random_dist(rng, S, 0.3);
  return m;
}

inline AgentPolicy random_policy(Rng& rng, int H, int S, int A, double zero_prob = 0.2) {
  AgentPolicy p(H, S, A);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) p.set_row(h, s, random_dist(rng, A, zero_prob));
  }
  return p;
}

inline JointPolicy random_joint_policy(Rng& rng, const CMPG& g, double zero_prob = 0.2) {
  JointPolicy pol;
  for (int i = 0; i < g.n_agents; ++i) {
    pol.push_back(random_policy(rng, g.horizon, g.n_states, g.actions_per_agent[i], zero_prob));
  }
  return pol;
}

// Random game with k constraints; cooperative games share agent 0's reward.
inline CMPG random_game(Rng& rng, int n, int S, std::vector<int> actions, int H, bool cooperative, int k = 1) {
  CMPG g;
  g.n_agents = n;
  g.n_states = S;
  g.horizon = H;
  g.actions_per_agent = std::move(actions);
  g.transitions = random_transitions(rng, H, S, g.joint_actions());
  for (int i = 0; i < n; ++i) {
    g.rewards.push_back(cooperative && i > 0 ? g.rewards[0] : random_table(rng, g.stage_size()));
  }
  for (int j = 0; j < k; ++j) {
    g.costs.push_back(random_table(rng, g.stage_size()));
    g.thresholds.push_back(H);
  }
  g.initial_dist = random_dist(rng, S, 0.3);
  finalize(g);
  return g;
}

// Values of a joint policy by forward propagation of the state distribution
// with explicit enumeration of every joint action.
struct ForwardValues {
  std::vector<double> rewards;
  std::vector<double> costs;
};

inline ForwardValues forward_values(const CMPG& g, const JointPolicy& pol) {
  ForwardValues out{std::vector<double>(g.n_agents, 0.0), std::vector<double>(g.n_constraints(), 0.0)};
  const JointActionCodec codec = g.codec();
  std::vector<double> dist = g.initial_dist;
  std::vector<int> profile(g.n_agents);
  for (int h = 0; h < g.horizon; ++h) {
    std::vector<double> next(g.n_states, 0.0);
    for (int s = 0; s < g.n_states; ++s) {
      if (dist[s] == 0.0) continue;
      for (int a = 0; a < codec.size(); ++a) {
        codec.decode(a, profile);
        double p = dist[s];
        for (int i = 0; i < g.n_agents; ++i) p *= pol[i](h, s, profile[i]);
        if (p == 0.0) continue;
        const std::size_t k = g.index(h, s, a);
        for (int i = 0; i < g.n_agents; ++i) out.rewards[i] += p * g.rewards[i][k];
        for (int j = 0; j < g.n_constraints(); ++j) out.costs[j] += p * g.costs[j][k];
        for (int s2 = 0; s2 < g.n_states; ++s2) next[s2] += p * g.transitions.prob(h, s, a, s2);
      }
    }
    dist = std::move(next);
  }
  return out;
}

inline std::pair<double, double> forward_values(const CMDP& m, const AgentPolicy& pol) {
  double r = 0.0;
  double c = 0.0;
  std::vector<double> dist = m.initial_dist;
  for (int h = 0; h < m.horizon; ++h) {
    std::vector<double> next(m.n_states, 0.0);
    for (int s = 0; s < m.n_states; ++s) {
      for (int a = 0; a < m.n_actions; ++a) {
        const double p = dist[s] * pol(h, s, a);
        if (p == 0.0) continue;
        r += p * m.reward[m.index(h, s, a)];
        c += p * m.cost[m.index(h, s, a)];
        for (int s2 = 0; s2 < m.n_states; ++s2) next[s2] += p * m.transitions.prob(h, s, a, s2);
      }
    }
    dist = std::move(next);
  }
  return {r, c};
}

// Every deterministic Markov policy with its (reward, cost).
inline std::vector<std::pair<double, double>> deterministic_values(const CMDP& m) {
  const int rows = m.horizon * m.n_states;
  std::vector<int> choice(rows, 0);
  std::vector<std::pair<double, double>> out;
  while (true) {
    out.push_back(forward_values(m, AgentPolicy::deterministic(m.horizon, m.n_states, m.n_actions, choice)));
    int i = 0;
    while (i < rows && ++choice[i] == m.n_actions) choice[i++] = 0;
    if (i == rows) break;
  }
  return out;
}

// CMDP optimum with one constraint. Vertices of the occupancy polytope are
// deterministic policies, and an optimum of the polytope cut by one halfspace
// lies on a segment between two of them.
inline std::optional<double> cmdp_optimum(const CMDP& m) {
  const auto v = deterministic_values(m);
  std::optional<double> best;
  auto offer = [&](double r) {
    if (!best || r > *best) best = r;
  };
  const double a = m.threshold;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].second <= a + 1e-12) offer(v[i].first);
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double ci = v[i].second;
      const double cj = v[j].second;
      if (ci <= a || cj >= a) continue;  // need ci > a > cj
      const double theta = (a - cj) / (ci - cj);
      offer(theta * v[i].first + (1.0 - theta) * v[j].first);
    }
  }
  return best;
}

inline double min_cost(const CMDP& m) {
  double best = m.horizon;
  for (const auto& [r, c] : deterministic_values(m)) best = std::min(best, c);
  return best;
}

inline double max_reward(const CMDP& m) {
  double best = 0.0;
  for (const auto& [r, c] : deterministic_values(m)) best = std::max(best, r);
  return best;
}

// Fraction of runs meeting a predicate.
inline int count_if_runs(int runs, const std::function<bool(int)>& run) {
  int hits = 0;
  for (int i = 0; i < runs; ++i) hits += run(i) ? 1 : 0;
  return hits;
}

}  // namespace testutil
