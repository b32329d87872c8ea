#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cmpg/cmdp.hpp"
#include "cmpg/policy.hpp"
#include "cmpg/random.hpp"

namespace cmpg {

// Supplies the policies a safe no-regret learner played on a CMDP. Every
// returned policy must be feasible; that is the supplier's obligation.
using SafePolicyStream = std::function<std::vector<AgentPolicy>(const CMDP& model, Rng& rng)>;

struct BatchSelection {
  int index = -1;                 // position in the stream
  std::vector<double> estimates;  // V_hat^r per streamed policy
  std::uint64_t episodes = 0;     // episodes executed
};

// Mean returns of M episodes per policy; picks the largest estimate,
// earliest index on ties. Throws ConfigError on an empty stream or M == 0.
BatchSelection online_to_batch_select(std::span<const AgentPolicy> stream, const CMDP& env, std::uint64_t M,
                                      Rng& rng);
// Same rule with exact values in place of estimates.
BatchSelection online_to_batch_exact(std::span<const AgentPolicy> stream, const CMDP& model);

// M = 16 H^2 / eps^2 * log(2 C / (eps delta)), rounded up.
std::uint64_t online_to_batch_episodes(double epsilon, double delta, int horizon, double C);
// Regret coefficient C for which a stream of T policies meets T = 4 C^2 / eps^2.
double regret_coefficient_for_stream(double epsilon, std::uint64_t T);

// Sampled cumulative reward and cost of one episode.
CmdpValues sample_cmdp_return(const CMDP& env, const AgentPolicy& policy, Rng& rng);

}  // namespace cmpg
