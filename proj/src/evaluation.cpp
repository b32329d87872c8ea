#include "cmpg/evaluation.hpp"

#include <string>

#include "cmpg/count_marginal.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/joint_enum.hpp"

namespace cmpg {

namespace {

bool use_counts(const CMPG& game, Marginalizer m) {
  if (m == Marginalizer::count_convolution) {
    if (!game.count_symmetric) throw UnsupportedOperation("count convolution requested on a non-symmetric game");
    return true;
  }
  return m == Marginalizer::automatic && game.count_symmetric;
}

}  // namespace

EvalResult evaluate(const CMPG& game, const JointPolicy& policy, const EvalOptions& options) {
  check_policy_dims(game, policy);
  const int n = game.n_agents;
  const int k = game.n_constraints();
  const int S = game.n_states;
  const int H = game.horizon;
  const int A = game.joint_actions();
  const int Q = n + k;
  const JointActionCodec codec = game.codec();
  const bool counts = use_counts(game, options.marginalizer);
  std::optional<CountMarginalizer> marg;
  if (counts) marg.emplace(game);

  auto stage = [&](int q, std::size_t idx) {
    return q < n ? game.rewards[q][idx] : game.costs[q - n][idx];
  };

  // next[q*S + s] = V^q_{h+1}(s)
  std::vector<double> next(static_cast<std::size_t>(Q) * S, 0.0);
  std::vector<double> cur(next.size(), 0.0);
  StepValues steps;
  if (options.per_step_values) {
    steps.reward.assign(n, std::vector<double>(static_cast<std::size_t>(H) * S, 0.0));
    steps.cost.assign(k, std::vector<double>(static_cast<std::size_t>(H) * S, 0.0));
  }

  std::vector<double> acc(Q);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      std::fill(acc.begin(), acc.end(), 0.0);
      const std::size_t base = (static_cast<std::size_t>(h) * S + s) * A;
      if (!counts) {
        for_each_joint_action(codec, policy, h, s, -1, [&](int a, double p) {
          const std::size_t idx = base + a;
          for (int q = 0; q < Q; ++q) acc[q] += p * stage(q, idx);
          for (const Successor& e : game.transitions.row(h, s, a)) {
            const double w = p * e.prob;
            for (int q = 0; q < Q; ++q) acc[q] += w * next[static_cast<std::size_t>(q) * S + e.state];
          }
        });
      } else {
        // Agent-specific quantities: condition on the agent's own action and
        // the counts of everyone else.
        for (int i = 0; i < n; ++i) {
          const auto dist = marg->convolve(policy, h, s, i);
          const auto own = policy[i].row(h, s);
          for (int x = 0; x < static_cast<int>(own.size()); ++x) {
            if (own[x] <= 0.0) continue;
            for (const auto& [key, mass] : dist) {
              const int a = marg->representative(i, x, key);
              const double p = own[x] * mass;
              double v = game.rewards[i][base + a];
              for (const Successor& e : game.transitions.row(h, s, a)) {
                v += e.prob * next[static_cast<std::size_t>(i) * S + e.state];
              }
              acc[i] += p * v;
            }
          }
        }
        if (k > 0) {
          const auto dist = marg->convolve(policy, h, s, -1);
          for (const auto& [key, mass] : dist) {
            const int a = marg->representative(key);
            for (int j = 0; j < k; ++j) {
              double v = game.costs[j][base + a];
              for (const Successor& e : game.transitions.row(h, s, a)) {
                v += e.prob * next[static_cast<std::size_t>(n + j) * S + e.state];
              }
              acc[n + j] += mass * v;
            }
          }
        }
      }
      for (int q = 0; q < Q; ++q) cur[static_cast<std::size_t>(q) * S + s] = acc[q];
      if (options.per_step_values) {
        for (int i = 0; i < n; ++i) steps.reward[i][static_cast<std::size_t>(h) * S + s] = acc[i];
        for (int j = 0; j < k; ++j) steps.cost[j][static_cast<std::size_t>(h) * S + s] = acc[n + j];
      }
    }
    next.swap(cur);
  }

  EvalResult result;
  result.reward_values.assign(n, 0.0);
  result.cost_values.assign(k, 0.0);
  for (int s = 0; s < S; ++s) {
    const double mu = game.initial_dist[s];
    if (mu == 0.0) continue;
    for (int i = 0; i < n; ++i) result.reward_values[i] += mu * next[static_cast<std::size_t>(i) * S + s];
    for (int j = 0; j < k; ++j) result.cost_values[j] += mu * next[static_cast<std::size_t>(n + j) * S + s];
  }
  if (options.per_step_values) result.per_step = std::move(steps);
  return result;
}

FeasibilityReport is_feasible(const CMPG& game, const JointPolicy& policy, double tol) {
  const EvalResult values = evaluate(game, policy);
  FeasibilityReport report;
  for (int j = 0; j < game.n_constraints(); ++j) {
    const double slack = game.thresholds[j] - values.cost_values[j];
    report.slacks.push_back(slack);
    if (slack < -tol) report.feasible = false;
  }
  return report;
}

Trajectory sample_episode(const CMPG& game, const JointPolicy& policy, std::uint64_t seed) {
  Rng rng(seed);
  return sample_episode(game, policy, rng);
}

Trajectory sample_episode(const CMPG& game, const JointPolicy& policy, Rng& rng) {
  check_policy_dims(game, policy);
  const JointActionCodec codec = game.codec();
  const int A = codec.size();
  Trajectory traj;
  traj.reserve(game.horizon);
  int s = sample_index(game.initial_dist, rng);
  std::vector<double> probs;
  for (int h = 0; h < game.horizon; ++h) {
    StepRecord step;
    step.state = s;
    step.actions.resize(game.n_agents);
    for (int i = 0; i < game.n_agents; ++i) step.actions[i] = sample_index(policy[i].row(h, s), rng);
    step.joint_action = codec.encode(step.actions);
    const std::size_t idx = (static_cast<std::size_t>(h) * game.n_states + s) * A + step.joint_action;
    for (const auto& r : game.rewards) step.rewards.push_back(r[idx]);
    for (const auto& c : game.costs) step.costs.push_back(c[idx]);
    const auto row = game.transitions.row(h, s, step.joint_action);
    probs.clear();
    for (const Successor& e : row) probs.push_back(e.prob);
    step.next_state = row[sample_index(probs, rng)].state;
    s = step.next_state;
    traj.push_back(std::move(step));
  }
  return traj;
}

JointPolicy with_agent(const JointPolicy& policy, int agent, const AgentPolicy& replacement) {
  JointPolicy out = policy;
  out.at(agent) = replacement;
  return out;
}

double potential_gap(const CMPG& game, const JointPolicy& policy, const AgentPolicy& deviation, int agent) {
  if (!game.cooperative) {
    throw UnsupportedOperation("potential gap is only computable for cooperative games");
  }
  if (agent < 0 || agent >= game.n_agents) throw DimensionError("agent index out of range");
  check_agent_policy_dims(game, agent, deviation);
  const double base = evaluate(game, policy).reward_values[agent];
  const double dev = evaluate(game, with_agent(policy, agent, deviation)).reward_values[agent];
  return dev - base;
}

}  // namespace cmpg
