#include <algorithm>
#include <cmath>
#include <limits>

#include "cmpg/ca_cmpg.hpp"
#include "cmpg/cmdp_solvers.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/evaluation.hpp"
#include "cmpg/simplex.hpp"

namespace cmpg {

JointPolicy feasible_init_single_constraint(const CMPG& game, InitTies ties) {
  game.validate();
  if (game.n_constraints() != 1) throw UnsupportedOperation("feasible init needs exactly one constraint");
  const int S = game.n_states;
  const int H = game.horizon;
  const int J = game.joint_actions();
  const JointActionCodec codec = game.codec();
  const std::vector<double>& cost = game.costs[0];
  JointPolicy policy;
  for (int i = 0; i < game.n_agents; ++i) policy.emplace_back(H, S, game.actions_per_agent[i]);

  std::vector<double> next(S, 0.0), cur(S, 0.0), q(J);
  std::vector<int> profile(game.n_agents);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < J; ++a) {
        double v = cost[game.index(h, s, a)];
        if (h + 1 < H) {
          for (const Successor& e : game.transitions.row(h, s, a)) v += e.prob * next[e.state];
        }
        q[a] = v;
      }
      int best = 0;
      for (int a = 1; a < J; ++a) {
        if (q[a] < q[best] - 1e-12 * (1.0 + std::abs(q[best]))) best = a;
      }
      const double worst = *std::max_element(q.begin(), q.end());
      cur[s] = q[best];
      if (ties == InitTies::uniform_when_indifferent && worst - q[best] <= 1e-12 * (1.0 + std::abs(q[best]))) {
        for (int i = 0; i < game.n_agents; ++i) {
          auto row = policy[i].row(h, s);
          std::fill(row.begin(), row.end(), 1.0 / game.actions_per_agent[i]);
        }
      } else {
        codec.decode(best, profile);
        for (int i = 0; i < game.n_agents; ++i) policy[i].set_action(h, s, profile[i]);
      }
    }
    std::swap(cur, next);
  }
  const EvalResult v = evaluate(game, policy);
  if (v.cost_values[0] > game.thresholds[0] + 1e-10) throw InfeasibleError("INFEASIBLE_GAME");
  return policy;
}

void FactoredGame::validate() const {
  if (horizon < 1) throw DimensionError("factored game: horizon must be >= 1");
  if (agents.empty()) throw DimensionError("factored game: no agents");
  for (const AgentComponent& c : agents) {
    if (c.n_states < 1 || c.n_actions < 1) throw DimensionError("factored game: empty agent component");
    if (c.transitions.horizon() != horizon || c.transitions.states() != c.n_states ||
        c.transitions.actions() != c.n_actions) {
      throw DimensionError("factored game: transition shape mismatch");
    }
    c.transitions.validate();
    const std::size_t size = static_cast<std::size_t>(horizon) * c.n_states * c.n_actions;
    if (c.costs.size() != thresholds.size()) throw DimensionError("factored game: one cost per threshold");
    for (const auto& table : c.costs) {
      if (table.size() != size) throw DimensionError("factored game: cost table size");
      for (double x : table) {
        if (!(x >= 0.0 && x <= 1.0)) throw ModelError("factored game: cost outside [0,1]");
      }
    }
    if (!c.reward.empty() && c.reward.size() != size) throw DimensionError("factored game: reward table size");
    if (static_cast<int>(c.initial_dist.size()) != c.n_states) throw DimensionError("factored game: initial_dist");
  }
}

namespace {

CMDP local_model(const FactoredGame& game, int i, int j) {
  const AgentComponent& c = game.agents[i];
  CMDP m;
  m.n_states = c.n_states;
  m.n_actions = c.n_actions;
  m.horizon = game.horizon;
  m.transitions = c.transitions;
  const std::size_t size = static_cast<std::size_t>(game.horizon) * c.n_states * c.n_actions;
  m.reward = c.reward.empty() ? std::vector<double>(size, 0.0) : c.reward;
  m.cost = j >= 0 ? c.costs[j] : std::vector<double>(size, 0.0);
  m.threshold = game.horizon;
  m.initial_dist = c.initial_dist;
  return m;
}

// min over policies of max_j V^{c_j}: LP over occupancies with an epigraph variable.
AgentPolicy minimax_cost_policy(const FactoredGame& game, int i) {
  const AgentComponent& c = game.agents[i];
  const int H = game.horizon;
  const int S = c.n_states;
  const int A = c.n_actions;
  const int n_rho = H * S * A;
  lp::Problem lp;
  lp.n_vars = n_rho + 1;
  lp.objective.assign(lp.n_vars, 0.0);
  lp.objective[n_rho] = -1.0;
  auto var = [&](int h, int s, int a) { return (h * S + s) * A + a; };
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      lp::Row row;
      row.sense = lp::Sense::equal;
      for (int a = 0; a < A; ++a) row.terms.push_back({var(h, s, a), 1.0});
      if (h == 0) {
        row.rhs = c.initial_dist[s];
      } else {
        row.rhs = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          for (int a = 0; a < A; ++a) {
            const double p = c.transitions.prob(h - 1, sp, a, s);
            if (p != 0.0) row.terms.push_back({var(h - 1, sp, a), -p});
          }
        }
      }
      lp.rows.push_back(std::move(row));
    }
  }
  for (const auto& table : c.costs) {
    lp::Row row;
    row.sense = lp::Sense::less_equal;
    row.rhs = 0.0;
    for (int k = 0; k < n_rho; ++k) {
      if (table[k] != 0.0) row.terms.push_back({k, table[k]});
    }
    row.terms.push_back({n_rho, -1.0});
    lp.rows.push_back(std::move(row));
  }
  const lp::Solution sol = lp::maximize(lp);
  if (sol.status != lp::Status::optimal) throw SolverError(std::string("minimax cost LP: ") + lp::to_string(sol.status));
  OccupancyMeasure occ(H, S, A);
  for (int k = 0; k < n_rho; ++k) occ.data()[k] = sol.x[k];
  return policy_from_occupancy(occ);
}

}  // namespace

std::vector<AgentPolicy> feasible_init_independent(const FactoredGame& game) {
  game.validate();
  const int k = static_cast<int>(game.thresholds.size());
  std::vector<AgentPolicy> out;
  std::vector<double> totals(k, 0.0);
  for (int i = 0; i < static_cast<int>(game.agents.size()); ++i) {
    AgentPolicy pi;
    if (k == 0) {
      const CMDP m = local_model(game, i, -1);
      pi = solve_mdp(m, std::vector<double>(m.stage_size(), 0.0)).policy;
    } else if (k == 1) {
      const CMDP m = local_model(game, i, 0);
      std::vector<double> neg(m.cost.size());
      for (std::size_t x = 0; x < neg.size(); ++x) neg[x] = -m.cost[x];
      pi = solve_mdp(m, neg).policy;
    } else {
      pi = minimax_cost_policy(game, i);
    }
    for (int j = 0; j < k; ++j) {
      const CMDP m = local_model(game, i, j);
      totals[j] += evaluate_stage(m, pi, m.cost);
    }
    out.push_back(std::move(pi));
  }
  for (int j = 0; j < k; ++j) {
    if (totals[j] > game.thresholds[j] + 1e-10) throw InfeasibleError("INFEASIBLE_GAME");
  }
  return out;
}

namespace {

struct ProductIndex {
  std::vector<int> states;
  std::vector<int> strides;
  int total = 1;
  explicit ProductIndex(const FactoredGame& game) {
    for (const auto& c : game.agents) states.push_back(c.n_states);
    strides.assign(states.size(), 1);
    for (int i = static_cast<int>(states.size()) - 1; i >= 0; --i) {
      strides[i] = total;
      total *= states[i];
    }
  }
  int local(int joint, int i) const { return (joint / strides[i]) % states[i]; }
};

}  // namespace

CMPG compose_factored_cmpg(const FactoredGame& game) {
  game.validate();
  const ProductIndex idx(game);
  const int n = static_cast<int>(game.agents.size());
  CMPG g;
  g.name = "factored";
  g.n_agents = n;
  g.n_states = idx.total;
  g.horizon = game.horizon;
  for (const auto& c : game.agents) g.actions_per_agent.push_back(c.n_actions);
  const JointActionCodec codec = g.codec();
  const int J = codec.size();
  const int k = static_cast<int>(game.thresholds.size());
  const std::size_t size = static_cast<std::size_t>(g.horizon) * g.n_states * J;
  std::vector<double> shared(size, 0.0);
  g.costs.assign(k, std::vector<double>(size, 0.0));
  g.transitions = TransitionTable(g.horizon, g.n_states, J);
  std::vector<int> profile(n), local_s(n);
  std::vector<Successor> row, grown;
  for (int h = 0; h < g.horizon; ++h) {
    for (int s = 0; s < g.n_states; ++s) {
      for (int i = 0; i < n; ++i) local_s[i] = idx.local(s, i);
      for (int a = 0; a < J; ++a) {
        codec.decode(a, profile);
        const std::size_t at = g.index(h, s, a);
        row.assign(1, Successor{0, 1.0});
        for (int i = 0; i < n; ++i) {
          const AgentComponent& c = game.agents[i];
          const std::size_t li = (static_cast<std::size_t>(h) * c.n_states + local_s[i]) * c.n_actions + profile[i];
          if (!c.reward.empty()) shared[at] += c.reward[li] / n;
          for (int j = 0; j < k; ++j) g.costs[j][at] += c.costs[j][li] / n;
          grown.clear();
          for (const Successor& base : row) {
            for (const Successor& e : c.transitions.row(h, local_s[i], profile[i])) {
              grown.push_back({base.state + e.state * idx.strides[i], base.prob * e.prob});
            }
          }
          row.swap(grown);
        }
        g.transitions.push_row(row);
      }
    }
  }
  g.rewards.assign(n, shared);
  for (double a : game.thresholds) g.thresholds.push_back(a / n);
  g.initial_dist.assign(g.n_states, 1.0);
  for (int s = 0; s < g.n_states; ++s) {
    for (int i = 0; i < n; ++i) g.initial_dist[s] *= game.agents[i].initial_dist[idx.local(s, i)];
  }
  finalize(g);
  return g;
}

JointPolicy lift_factored_policy(const FactoredGame& game, const std::vector<AgentPolicy>& local) {
  if (local.size() != game.agents.size()) throw DimensionError("one local policy per agent required");
  const ProductIndex idx(game);
  JointPolicy out;
  for (int i = 0; i < static_cast<int>(local.size()); ++i) {
    const AgentComponent& c = game.agents[i];
    if (local[i].horizon() != game.horizon || local[i].states() != c.n_states || local[i].actions() != c.n_actions) {
      throw DimensionError("local policy shape mismatch");
    }
    AgentPolicy pi(game.horizon, idx.total, c.n_actions);
    for (int h = 0; h < game.horizon; ++h) {
      for (int s = 0; s < idx.total; ++s) pi.set_row(h, s, local[i].row(h, idx.local(s, i)));
    }
    out.push_back(std::move(pi));
  }
  return out;
}

namespace {

// max_q min_a (C q)_a over the simplex: LP with epigraph variable w >= 0.
double maxmin_cost(const std::vector<std::vector<double>>& C) {
  const int m = static_cast<int>(C.size());
  const int k = static_cast<int>(C[0].size());
  lp::Problem lp;
  lp.n_vars = k + 1;
  lp.objective.assign(lp.n_vars, 0.0);
  lp.objective[k] = 1.0;
  for (int a = 0; a < m; ++a) {
    lp::Row row;
    row.sense = lp::Sense::less_equal;
    row.rhs = 0.0;
    row.terms.push_back({k, 1.0});
    for (int b = 0; b < k; ++b) {
      if (C[a][b] != 0.0) row.terms.push_back({b, -C[a][b]});
    }
    lp.rows.push_back(std::move(row));
  }
  lp::Row simplex;
  simplex.sense = lp::Sense::equal;
  simplex.rhs = 1.0;
  for (int b = 0; b < k; ++b) simplex.terms.push_back({b, 1.0});
  lp.rows.push_back(std::move(simplex));
  const lp::Solution sol = lp::maximize(lp);
  if (sol.status != lp::Status::optimal) throw SolverError("Slater LP failed");
  return sol.objective;
}

AgentPolicy random_policy(int H, int S, int A, Rng& rng) {
  AgentPolicy pi(H, S, A);
  std::vector<double> row(A);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      double total = 0.0;
      for (double& x : row) {
        x = -std::log(1.0 - uniform01(rng));  // Dirichlet(1) via exponentials
        total += x;
      }
      for (double& x : row) x /= total;
      pi.set_row(h, s, row);
    }
  }
  return pi;
}

}  // namespace

SlaterEstimate slater_constant(const CMPG& game, int samples, std::uint64_t seed) {
  game.validate();
  if (game.n_constraints() != 1) throw UnsupportedOperation("Slater constant needs exactly one constraint");
  const double alpha = game.thresholds[0];
  SlaterEstimate out;
  if (game.n_agents == 2 && game.n_states == 1 && game.horizon == 1) {
    const int a1 = game.actions_per_agent[0];
    const int a2 = game.actions_per_agent[1];
    const JointActionCodec codec = game.codec();
    std::vector<std::vector<double>> c1(a1, std::vector<double>(a2)), c2(a2, std::vector<double>(a1));
    for (int x = 0; x < a1; ++x) {
      for (int y = 0; y < a2; ++y) {
        const int prof[2] = {x, y};
        const double c = game.costs[0][game.index(0, 0, codec.encode(prof))];
        c1[x][y] = c;
        c2[y][x] = c;
      }
    }
    out.value = std::min(alpha - maxmin_cost(c1), alpha - maxmin_cost(c2));
    out.exact = true;
    return out;
  }
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const JointPolicy& profile) {
    for (int i = 0; i < game.n_agents; ++i) {
      const CMDP m = induce_cmdp(game, i, profile);
      std::vector<double> neg(m.cost.size());
      for (std::size_t x = 0; x < neg.size(); ++x) neg[x] = -m.cost[x];
      const double min_cost = -solve_mdp(m, neg).value;
      best = std::min(best, alpha - min_cost);
    }
    ++out.samples;
  };
  consider(uniform_policy(game));
  for (int k = 0; k < samples; ++k) {
    JointPolicy profile;
    for (int i = 0; i < game.n_agents; ++i) {
      profile.push_back(random_policy(game.horizon, game.n_states, game.actions_per_agent[i], rng));
    }
    consider(profile);
  }
  out.value = best;
  return out;
}

}  // namespace cmpg
