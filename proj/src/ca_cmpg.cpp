#include "cmpg/ca_cmpg.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include "cmpg/cmdp_solvers.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/evaluation.hpp"
#include "cmpg/log.hpp"

namespace cmpg {

CmdpSolver lp_solver() {
  return [](const CMDP& model, Rng&) {
    auto sol = solve_cmdp_lp(model);
    if (!sol) throw InfeasibleError("induced CMDP has no feasible policy");
    return InducedSolve{std::move(sol->policy), 0, 0};
  };
}

CmdpSolver primal_dual_solver(double epsilon_prime, double zeta, std::optional<std::uint64_t> T) {
  return [=](const CMDP& model, Rng&) {
    PrimalDualConfig cfg = PrimalDualConfig::make(epsilon_prime, 0.5, zeta, model.horizon, model.n_states,
                                                  model.n_actions, model.threshold);
    if (T) cfg.override_T(*T);
    CMDP tightened = model;
    tightened.threshold = cfg.alpha_prime;
    PrimalDualResult pd = primal_dual_solve(tightened, cfg);
    return InducedSolve{std::move(pd.policy), 0, 0};
  };
}

CmdpSolver generative_solver(double epsilon_prime, double delta_prime, double zeta, GenerativeOverrides overrides) {
  return [=](const CMDP& model, Rng& rng) {
    GenerativeModel gen(model);
    GenerativeSolve sol = solve_cmdp_generative(gen, model.threshold, zeta, epsilon_prime, delta_prime, overrides, rng);
    return InducedSolve{std::move(sol.policy), sol.samples, 0};
  };
}

CmdpSolver safe_stream_solver(SafePolicyStream stream, std::uint64_t M) {
  if (!stream) throw ConfigError("safe-stream solver needs a policy stream");
  return [stream = std::move(stream), M](const CMDP& model, Rng& rng) {
    const std::vector<AgentPolicy> policies = stream(model, rng);
    BatchSelection sel = online_to_batch_select(policies, model, M, rng);
    return InducedSolve{policies[sel.index], 0, sel.episodes};
  };
}

namespace {

void require_feasible(const CMPG& game, const JointPolicy& policy) {
  const EvalResult v = evaluate(game, policy);
  for (int j = 0; j < game.n_constraints(); ++j) {
    if (v.cost_values[j] > game.thresholds[j] + 1e-8) throw InfeasibleError("initial policy is infeasible");
  }
}

int argmax_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Runs fn(i) for every agent, optionally on threads; results in agent order.
template <typename Fn>
auto per_agent(int n, bool parallel, Fn fn) -> std::vector<decltype(fn(0))> {
  std::vector<decltype(fn(0))> out;
  out.reserve(n);
  if (!parallel || n == 1) {
    for (int i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<decltype(fn(0))>> jobs;
  for (int i = 0; i < n; ++i) jobs.push_back(std::async(std::launch::async, fn, i));
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RunResult ca_cmpg_known(const CMPG& game, const JointPolicy& init, const KnownOptions& options) {
  game.validate();
  check_policy_dims(game, init);
  if (!(options.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  require_feasible(game, init);
  const CmdpSolver solver = options.solver ? options.solver : lp_solver();
  const int n = game.n_agents;
  const int max_cycles =
      options.max_cycles.value_or(static_cast<int>(std::ceil(2.0 * n * game.horizon / options.epsilon)));
  Rng rng(options.seed);
  RunResult out;
  out.policy = init;
  for (int cycle = 1; cycle <= max_cycles; ++cycle) {
    const auto start = std::chrono::steady_clock::now();
    const EvalResult current = evaluate(game, out.policy);
    std::vector<Rng> rngs;
    for (int i = 0; i < n; ++i) rngs.push_back(derive_rng(rng));
    struct Candidate {
      AgentPolicy policy;
      double value;
      std::uint64_t samples;
    };
    auto cands = per_agent(n, options.parallel, [&](int i) {
      const CMDP m = induce_cmdp(game, i, out.policy);
      InducedSolve sol = solver(m, rngs[i]);
      const double v = evaluate(m, sol.policy).reward;
      return Candidate{std::move(sol.policy), v, sol.generative_samples};
    });
    CycleRecord rec;
    rec.cycle = cycle;
    rec.cost_values = current.cost_values;
    rec.reward_values = current.reward_values;
    for (int i = 0; i < n; ++i) {
      rec.gaps.push_back(cands[i].value - current.reward_values[i]);
      out.trace.generative_samples += cands[i].samples;
    }
    const int j = argmax_lowest(rec.gaps);
    const bool update = rec.gaps[j] > options.epsilon / 2.0;
    if (update) {
      out.policy[j] = std::move(cands[j].policy);
      rec.selected = j;
      ++out.trace.accepted_updates;
    }
    rec.generative_samples = out.trace.generative_samples;
    rec.wall_seconds = seconds_since(start);
    log::debug("cycle ", cycle, " max gap ", rec.gaps[j], update ? " -> agent " + std::to_string(j) : " -> stop");
    out.trace.cycles.push_back(std::move(rec));
    if (!update) {
      out.trace.converged = true;
      break;
    }
  }
  return out;
}

ExploreConfig ExploreConfig::make(double epsilon, double delta, int n_agents, int horizon) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (n_agents < 1 || horizon < 1) throw ConfigError("n and H must be positive");
  ExploreConfig cfg;
  const double n = n_agents;
  const double H = horizon;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  const double m = 32.0 * H * H / (epsilon * epsilon) * std::log(32.0 * n * n * H / (epsilon * delta));
  cfg.M = m < 1.0 ? 1 : static_cast<std::uint64_t>(std::ceil(m));
  cfg.T = std::max(1, static_cast<int>(std::ceil(4.0 * n * H / epsilon)));
  cfg.delta_prime = epsilon * delta / (8.0 * n * n * H);
  cfg.solver_epsilon = epsilon / 4.0;
  return cfg;
}

RunResult ca_cmpg_explore(const CMPG& game, const JointPolicy& init, const ExploreConfig& cfg, Rng& rng) {
  game.validate();
  check_policy_dims(game, init);
  if (!(cfg.epsilon > 0.0) || cfg.M < 1 || cfg.T < 1) throw ConfigError("explore config not initialized");
  require_feasible(game, init);
  CmdpSolver solver;
  if (cfg.solver == ExploreSolver::generative) {
    if (!(cfg.slater > 0.0)) throw ConfigError("generative solver needs a positive Slater constant");
    solver = generative_solver(cfg.solver_epsilon, cfg.delta_prime, cfg.slater, cfg.generative);
  } else {
    solver = safe_stream_solver(cfg.stream, cfg.stream_M);
  }
  const int n = game.n_agents;
  RunResult out;
  out.policy = init;
  RunTrace& tr = out.trace;
  for (int cycle = 1; cycle <= cfg.T; ++cycle) {
    const auto start = std::chrono::steady_clock::now();
    const ValueEstimate base = estimate_value_mc(game, out.policy, cfg.M, rng);
    tr.episodes += base.episodes;
    std::vector<Rng> rngs;
    for (int i = 0; i < n; ++i) rngs.push_back(derive_rng(rng));
    struct Candidate {
      AgentPolicy policy;
      double estimate;
      std::uint64_t episodes;
      std::uint64_t samples;
    };
    auto cands = per_agent(n, cfg.parallel, [&](int i) {
      const CMDP m = induce_cmdp(game, i, out.policy);
      InducedSolve sol = solver(m, rngs[i]);
      const ValueEstimate est = estimate_value_mc(game, with_agent(out.policy, i, sol.policy), cfg.M, rngs[i]);
      return Candidate{std::move(sol.policy), est.reward_values[i], est.episodes + sol.episodes,
                       sol.generative_samples};
    });
    const EvalResult exact = evaluate(game, out.policy);
    CycleRecord rec;
    rec.cycle = cycle;
    rec.cost_values = exact.cost_values;
    rec.reward_values = exact.reward_values;
    for (int i = 0; i < n; ++i) {
      rec.gaps.push_back(cands[i].estimate - base.reward_values[i]);
      tr.episodes += cands[i].episodes;
      tr.generative_samples += cands[i].samples;
    }
    tr.env_steps = tr.episodes * static_cast<std::uint64_t>(game.horizon);
    const int j = argmax_lowest(rec.gaps);
    const bool update = rec.gaps[j] > cfg.epsilon / 2.0;
    if (update) {
      out.policy[j] = std::move(cands[j].policy);
      rec.selected = j;
      ++tr.accepted_updates;
    }
    rec.episodes = tr.episodes;
    rec.env_steps = tr.env_steps;
    rec.generative_samples = tr.generative_samples;
    rec.wall_seconds = seconds_since(start);
    tr.cycles.push_back(std::move(rec));
    if (!update) {
      tr.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace cmpg
