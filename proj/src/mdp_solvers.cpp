#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmpg/cmdp_solvers.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/simplex.hpp"

namespace cmpg {

MdpSolution solve_mdp(const CMDP& model, std::span<const double> stage_reward) {
  if (stage_reward.size() != model.stage_size()) throw DimensionError("stage table does not match model");
  const int S = model.n_states;
  const int A = model.n_actions;
  const int H = model.horizon;
  MdpSolution sol;
  sol.policy = AgentPolicy(H, S, A);
  sol.values.assign(static_cast<std::size_t>(H) * S, 0.0);
  std::vector<double> q(A);
  for (int h = H - 1; h >= 0; --h) {
    const double* next = h + 1 < H ? &sol.values[static_cast<std::size_t>(h + 1) * S] : nullptr;
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double v = stage_reward[model.index(h, s, a)];
        if (next) {
          for (const Successor& e : model.transitions.row(h, s, a)) v += e.prob * next[e.state];
        }
        q[a] = v;
        best = std::max(best, v);
      }
      const double tol = 1e-12 * (1.0 + std::abs(best));
      int choice = 0;
      while (q[choice] < best - tol) ++choice;
      sol.policy.set_action(h, s, choice);
      sol.values[static_cast<std::size_t>(h) * S + s] = q[choice];
    }
  }
  for (int s = 0; s < S; ++s) sol.value += model.initial_dist[s] * sol.values[s];
  return sol;
}

std::optional<CmdpSolution> solve_cmdp_lp(const CMDP& model) {
  const int S = model.n_states;
  const int A = model.n_actions;
  const int H = model.horizon;

  // Reachability under arbitrary actions; unreachable pairs have rho = 0.
  std::vector<char> reach(static_cast<std::size_t>(H) * S, 0);
  for (int s = 0; s < S; ++s) reach[s] = model.initial_dist[s] > 0.0;
  for (int h = 0; h + 1 < H; ++h) {
    for (int s = 0; s < S; ++s) {
      if (!reach[static_cast<std::size_t>(h) * S + s]) continue;
      for (int a = 0; a < A; ++a) {
        for (const Successor& e : model.transitions.row(h, s, a)) reach[static_cast<std::size_t>(h + 1) * S + e.state] = 1;
      }
    }
  }
  std::vector<int> row_of(reach.size(), -1);
  lp::Problem lp;
  int n_rows = 0;
  for (std::size_t k = 0; k < reach.size(); ++k) {
    if (reach[k]) row_of[k] = n_rows++;
  }
  lp.n_vars = n_rows * A;
  lp.objective.assign(lp.n_vars, 0.0);
  lp.rows.resize(n_rows + 1);
  lp::Row& cost_row = lp.rows[n_rows];
  cost_row.sense = lp::Sense::less_equal;
  cost_row.rhs = model.threshold;
  std::vector<std::size_t> var_to_stage(lp.n_vars);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const int r = row_of[static_cast<std::size_t>(h) * S + s];
      if (r < 0) continue;
      lp::Row& flow = lp.rows[r];
      flow.sense = lp::Sense::equal;
      flow.rhs = h == 0 ? model.initial_dist[s] : 0.0;
      for (int a = 0; a < A; ++a) {
        const int var = r * A + a;
        const std::size_t k = model.index(h, s, a);
        var_to_stage[var] = k;
        flow.terms.push_back({var, 1.0});
        lp.objective[var] = model.reward[k];
        if (model.cost[k] != 0.0) cost_row.terms.push_back({var, model.cost[k]});
        if (h + 1 < H) {
          for (const Successor& e : model.transitions.row(h, s, a)) {
            const int target = row_of[static_cast<std::size_t>(h + 1) * S + e.state];
            lp.rows[target].terms.push_back({var, -e.prob});
          }
        }
      }
    }
  }

  const lp::Solution sol = lp::maximize(lp);
  if (sol.status == lp::Status::infeasible) return std::nullopt;
  if (sol.status != lp::Status::optimal) {
    throw SolverError(std::string("occupancy LP ended with status ") + lp::to_string(sol.status));
  }

  CmdpSolution out;
  out.lp_iterations = sol.iterations;
  out.occupancy = OccupancyMeasure(H, S, A);
  for (int var = 0; var < lp.n_vars; ++var) out.occupancy.data()[var_to_stage[var]] = sol.x[var];
  const double flow_err = flow_residual(model, out.occupancy);
  const double lp_cost = value_from_occupancy(out.occupancy, model.cost);
  if (flow_err > 1e-8 || lp_cost > model.threshold + 1e-8) {
    throw SolverError("occupancy LP residual check failed (flow " + std::to_string(flow_err) + ", cost excess " +
                      std::to_string(lp_cost - model.threshold) + ")");
  }
  out.policy = policy_from_occupancy(out.occupancy);
  // Rows the occupancy never reaches take the unconstrained greedy action.
  const MdpSolution greedy = solve_mdp(model, model.reward);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      double mass = 0.0;
      for (int a = 0; a < A; ++a) mass += out.occupancy(h, s, a);
      if (mass < kZeroMass) out.policy.set_row(h, s, greedy.policy.row(h, s));
    }
  }
  const CmdpValues values = evaluate(model, out.policy);
  out.reward_value = values.reward;
  out.cost_value = values.cost;
  if (out.cost_value > model.threshold + 1e-8) {
    throw SolverError("policy recovered from the LP violates the threshold by " +
                      std::to_string(out.cost_value - model.threshold));
  }
  return out;
}

}  // namespace cmpg
