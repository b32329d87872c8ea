#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmpg/cmdp.hpp"
#include "cmpg/generative.hpp"
#include "cmpg/occupancy.hpp"
#include "cmpg/policy.hpp"
#include "cmpg/random.hpp"

namespace cmpg {

struct PrimalDualConfig {
  double epsilon_prime = 0.0;
  double delta_prime = 0.0;
  double slater = 0.0;  // zeta
  int horizon = 0;
  double alpha = 0.0;

  double Delta = 0.0;        // eps' zeta / (16 H)
  double eps_opt = 0.0;      // Delta / 5
  double U = 0.0;            // 8 H / zeta
  double alpha_prime = 0.0;  // alpha - Delta
  double eta = 0.0;          // U / (sqrt(T) H)
  std::uint64_t T = 0;
  double T_exact = 0.0;      // before rounding
  std::uint64_t N = 0;       // samples per (h, s, a); saturates at UINT64_MAX
  double N_exact = 0.0;

  // Throws ConfigError on zeta <= 0, eps' outside (0, H], delta' outside
  // (0, 1), alpha' < 0, or T beyond 2^62.
  static PrimalDualConfig make(double epsilon_prime, double delta_prime, double zeta, int horizon,
                               int states, int actions, double alpha);

  // Replace T (eta follows) or N. Guarantees tied to the formula no longer apply.
  void override_T(std::uint64_t T);
  void override_N(std::uint64_t N);
};

enum class DualStepping {
  accelerated,  // cached best responses, closed-form runs and oscillations
  stepwise,     // cached best responses, one dual step at a time
  literal,      // one backward induction per iteration
};

struct PrimalDualOptions {
  DualStepping stepping = DualStepping::accelerated;
  // Traces of runs with T at most this long have one row per iteration;
  // longer runs get one row per segment start.
  std::uint64_t full_trace_limit = 100000;
};

struct DualTracePoint {
  std::uint64_t t = 0;
  double lambda = 0.0;
  double v_hat_r = 0.0;  // of the best response played at t
  double v_hat_c = 0.0;
};

struct WeightedIterate {
  AgentPolicy policy;  // deterministic best response
  double reward_value = 0.0;
  double cost_value = 0.0;
  std::uint64_t count = 0;  // iterations it was played
};

struct PrimalDualResult {
  std::vector<WeightedIterate> iterates;  // in order of first play
  AgentPolicy policy;                     // averaged (mixture) policy
  OccupancyMeasure occupancy;
  double reward_value = 0.0;  // exact, on the model passed in
  double cost_value = 0.0;
  std::vector<DualTracePoint> trace;
  bool trace_complete = false;
  std::uint64_t T = 0;
  double final_lambda = 0.0;     // lambda_T
  double lambda_max_bound = 0.0;  // >= max_t lambda_t
  // Sums over t of g_t = alpha' - V^c(pi_t) and of lambda_t g_t.
  long double sum_g = 0.0L;
  long double sum_lambda_g = 0.0L;
  std::uint64_t mdp_solves = 0;
  std::uint64_t closed_form_steps = 0;  // iterations covered by oscillation blocks

  // sum_t (lambda_t - lambda) g_t
  double dual_regret(double lambda) const {
    return static_cast<double>(sum_lambda_g - static_cast<long double>(lambda) * sum_g);
  }
};

// Projected dual descent on the Lagrangian of `model`, whose threshold is
// alpha'. Best responses are exact. The returned policy realizes the average
// of the iterates' occupancy measures.
PrimalDualResult primal_dual_solve(const CMDP& model, const PrimalDualConfig& cfg,
                                   const PrimalDualOptions& options = {});

struct GenerativeOverrides {
  std::optional<std::uint64_t> N;
  std::optional<std::uint64_t> T;
  // Refuse to draw more than this many samples in total.
  std::uint64_t sample_budget = 2'000'000'000ULL;
};

struct GenerativeSolve {
  AgentPolicy policy;
  PrimalDualConfig config;
  CMDP empirical;
  double empirical_reward = 0.0;  // V_hat of the policy
  double empirical_cost = 0.0;
  std::uint64_t samples = 0;
};

// Empirical model from N draws per (h, s, a), then primal-dual at alpha'.
GenerativeSolve solve_cmdp_generative(GenerativeModel& gen, double alpha, double zeta, double epsilon_prime,
                                      double delta_prime, const GenerativeOverrides& overrides, Rng& rng,
                                      const PrimalDualOptions& options = {});

}  // namespace cmpg
