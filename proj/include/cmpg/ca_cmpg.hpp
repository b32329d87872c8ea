#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cmpg/cmdp.hpp"
#include "cmpg/game.hpp"
#include "cmpg/online_to_batch.hpp"
#include "cmpg/policy.hpp"
#include "cmpg/primal_dual.hpp"
#include "cmpg/random.hpp"

namespace cmpg {

// ---- feasible initialization ----

enum class InitTies {
  lowest_index,  // lowest joint index among cost minimizers
  // uniform rows at (h, s) where every joint action has the same cost-to-go;
  // lowest joint index elsewhere
  uniform_when_indifferent,
};

// Joint-action MDP minimizing V^{c_1}, factored into per-agent deterministic
// policies. Throws InfeasibleError("INFEASIBLE_GAME") when the minimum
// exceeds alpha_1.
JointPolicy feasible_init_single_constraint(const CMPG& game, InitTies ties = InitTies::lowest_index);

// Agent with its own state process; the joint game is the product.
struct AgentComponent {
  int n_states = 0;
  int n_actions = 0;
  TransitionTable transitions;
  std::vector<std::vector<double>> costs;  // [constraint][(h*S_i+s)*A_i+a]
  std::vector<double> reward;              // local reward; the shared reward is the sum
  std::vector<double> initial_dist;
};

struct FactoredGame {
  int horizon = 0;
  std::vector<AgentComponent> agents;
  std::vector<double> thresholds;  // composite cost c_j = sum_i c_j^i

  void validate() const;
};

// Per agent, the local policy minimizing its worst constraint value
// max_j V^{c_j^i} (backward induction for k = 1, an LP otherwise). Policies
// live on the local state spaces. Throws InfeasibleError("INFEASIBLE_GAME")
// when sum_i V^{c_j^i} > alpha_j for some j.
std::vector<AgentPolicy> feasible_init_independent(const FactoredGame& game);

// Product CMPG, joint state index with agent 0 most significant. Composite
// costs, thresholds and the shared reward sum_i r^i are divided by the
// number of agents to stay in [0, 1].
CMPG compose_factored_cmpg(const FactoredGame& game);
// Local policies as policies on the product state space.
JointPolicy lift_factored_policy(const FactoredGame& game, const std::vector<AgentPolicy>& local);

// ---- Slater constant ----

struct SlaterEstimate {
  double value = 0.0;
  bool exact = false;  // false: upper bound from sampled opponent profiles
  int samples = 0;
};

// min_i min_{pi_-i} max_{pi_i} (alpha - V^c). Exact for two agents, one
// state and H = 1; otherwise the minimum over `samples` random opponent
// profiles plus the uniform one, an upper bound. Requires k = 1.
SlaterEstimate slater_constant(const CMPG& game, int samples = 64, std::uint64_t seed = 0);

// ---- verification and estimation ----

struct NashReport {
  std::vector<double> gaps;         // best constrained response value - current value
  std::vector<double> best_values;  // per agent
  std::vector<double> values;       // V^{r_i}(pi)
  double epsilon = 0.0;             // max gap
};

// Throws InfeasibleError when the policy violates a constraint by more than tol.
NashReport verify_nash(const CMPG& game, const JointPolicy& policy, double tol = 1e-8);

struct ValueEstimate {
  std::vector<double> reward_values;
  std::vector<double> cost_values;
  std::uint64_t episodes = 0;
};

// Means of cumulative rewards and costs over M sampled episodes.
ValueEstimate estimate_value_mc(const CMPG& game, const JointPolicy& policy, std::uint64_t M, Rng& rng);

// ---- induced CMDP solvers ----

struct InducedSolve {
  AgentPolicy policy;
  std::uint64_t generative_samples = 0;
  std::uint64_t episodes = 0;  // environment episodes the solver executed
};

using CmdpSolver = std::function<InducedSolve(const CMDP& model, Rng& rng)>;

// Exact occupancy LP. An infeasible induced CMDP throws InfeasibleError.
CmdpSolver lp_solver();
// Primal-dual on the exact model at alpha - Delta.
CmdpSolver primal_dual_solver(double epsilon_prime, double zeta, std::optional<std::uint64_t> T = std::nullopt);
// Draws from the model as a generative oracle, then primal-dual.
CmdpSolver generative_solver(double epsilon_prime, double delta_prime, double zeta,
                             GenerativeOverrides overrides = {});
// Online-to-batch selection over a supplied safe policy stream, M episodes each.
CmdpSolver safe_stream_solver(SafePolicyStream stream, std::uint64_t M);

// ---- coordinate ascent ----

struct CycleRecord {
  int cycle = 0;              // 1-based
  std::vector<double> gaps;   // epsilon_i^t (estimates in exploration mode)
  int selected = -1;          // updated agent; -1 when the run stopped
  std::vector<double> cost_values;    // exact V^{c_j}(pi^{t-1})
  std::vector<double> reward_values;  // exact V^{r_i}(pi^{t-1})
  double wall_seconds = 0.0;
  std::uint64_t episodes = 0;  // cumulative
  std::uint64_t env_steps = 0;
  std::uint64_t generative_samples = 0;
};

struct RunTrace {
  std::vector<CycleRecord> cycles;
  bool converged = false;  // stopped because every gap was <= epsilon / 2
  int accepted_updates = 0;
  std::uint64_t episodes = 0;
  std::uint64_t env_steps = 0;
  std::uint64_t generative_samples = 0;
};

struct RunResult {
  JointPolicy policy;  // last accepted policy
  RunTrace trace;
};

struct KnownOptions {
  double epsilon = 0.05;
  std::optional<int> max_cycles;  // default ceil(2 n H / epsilon)
  CmdpSolver solver;              // default lp_solver()
  bool parallel = false;          // per-agent solves on threads
  std::uint64_t seed = 0;
};

// Throws InfeasibleError if init violates a constraint.
RunResult ca_cmpg_known(const CMPG& game, const JointPolicy& init, const KnownOptions& options = {});

enum class ExploreSolver { generative, safe_stream };

struct ExploreConfig {
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t M = 0;       // ceil(32 H^2 / eps^2 * log(32 n^2 H / (eps delta)))
  int T = 0;                 // ceil(4 n H / eps)
  double delta_prime = 0.0;  // eps delta / (8 n^2 H), per solver call
  double solver_epsilon = 0.0;  // eps / 4
  ExploreSolver solver = ExploreSolver::generative;
  double slater = 0.0;  // for the generative solver
  GenerativeOverrides generative;
  SafePolicyStream stream;          // for the safe-stream solver
  std::uint64_t stream_M = 0;       // episodes per streamed policy
  bool parallel = false;

  static ExploreConfig make(double epsilon, double delta, int n_agents, int horizon);
};

// Gaps from Monte-Carlo estimates; pi^{t-1}'s batch is shared by all agents.
RunResult ca_cmpg_explore(const CMPG& game, const JointPolicy& init, const ExploreConfig& cfg, Rng& rng);

}  // namespace cmpg
