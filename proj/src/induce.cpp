#include "cmpg/cmdp_solvers.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "cmpg/count_marginal.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/joint_enum.hpp"

namespace cmpg {

CMDP induce_cmdp(const CMPG& game, int agent, const JointPolicy& profile, Marginalizer marginalizer) {
  if (agent < 0 || agent >= game.n_agents) throw DimensionError("agent index out of range");
  if (game.n_constraints() > 1) {
    throw UnsupportedOperation("CMDP induction supports a single constraint (game has " +
                               std::to_string(game.n_constraints()) + ")");
  }
  if (static_cast<int>(profile.size()) != game.n_agents) throw DimensionError("profile must list every agent");
  for (int j = 0; j < game.n_agents; ++j) {
    if (j != agent) check_agent_policy_dims(game, j, profile[j]);
  }
  bool counts = false;
  if (marginalizer == Marginalizer::count_convolution) {
    if (!game.count_symmetric) throw UnsupportedOperation("count convolution requested on a non-symmetric game");
    counts = true;
  } else if (marginalizer == Marginalizer::automatic) {
    counts = game.count_symmetric;
  }
  std::optional<CountMarginalizer> marg;
  if (counts) marg.emplace(game);

  const int S = game.n_states;
  const int H = game.horizon;
  const int A = game.joint_actions();
  const int Ai = game.actions_per_agent[agent];
  const bool has_cost = game.n_constraints() == 1;
  const JointActionCodec codec = game.codec();
  const int stride = codec.stride(agent);

  CMDP model;
  model.n_states = S;
  model.n_actions = Ai;
  model.horizon = H;
  model.transitions = TransitionTable(H, S, Ai);
  model.reward.assign(model.stage_size(), 0.0);
  model.cost.assign(model.stage_size(), 0.0);
  model.threshold = has_cost ? game.thresholds[0] : static_cast<double>(H);
  model.initial_dist = game.initial_dist;

  const std::vector<double>& r = game.rewards[agent];
  std::vector<std::vector<double>> next(Ai, std::vector<double>(S, 0.0));
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const std::size_t base = (static_cast<std::size_t>(h) * S + s) * A;
      for (auto& row : next) std::fill(row.begin(), row.end(), 0.0);
      auto add = [&](int x, int joint, double p) {
        const std::size_t out = model.index(h, s, x);
        model.reward[out] += p * r[base + joint];
        if (has_cost) model.cost[out] += p * game.costs[0][base + joint];
        for (const Successor& e : game.transitions.row(h, s, joint)) next[x][e.state] += p * e.prob;
      };
      if (!counts) {
        for_each_joint_action(codec, profile, h, s, agent, [&](int partial, double p) {
          for (int x = 0; x < Ai; ++x) add(x, partial + x * stride, p);
        });
      } else {
        const auto dist = marg->convolve(profile, h, s, agent);
        for (int x = 0; x < Ai; ++x) {
          for (const auto& [key, mass] : dist) add(x, marg->representative(agent, x, key), mass);
        }
      }
      for (int x = 0; x < Ai; ++x) {
        // Marginals of values in [0,1] can leave the range by round-off.
        const std::size_t out = model.index(h, s, x);
        model.reward[out] = std::clamp(model.reward[out], 0.0, 1.0);
        model.cost[out] = std::clamp(model.cost[out], 0.0, 1.0);
        model.transitions.push_dense_row(next[x]);
      }
    }
  }
  return model;
}

}  // namespace cmpg
