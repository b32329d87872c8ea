#include "cmpg/online_to_batch.hpp"

#include <cmath>

#include "cmpg/errors.hpp"

namespace cmpg {

CmdpValues sample_cmdp_return(const CMDP& env, const AgentPolicy& policy, Rng& rng) {
  CmdpValues out;
  int s = sample_index(env.initial_dist, rng);
  std::vector<double> probs;
  for (int h = 0; h < env.horizon; ++h) {
    const int a = sample_index(policy.row(h, s), rng);
    const std::size_t i = env.index(h, s, a);
    out.reward += env.reward[i];
    out.cost += env.cost[i];
    if (h + 1 == env.horizon) break;
    const auto row = env.transitions.row(h, s, a);
    probs.clear();
    for (const Successor& e : row) probs.push_back(e.prob);
    s = row[sample_index(probs, rng)].state;
  }
  return out;
}

BatchSelection online_to_batch_select(std::span<const AgentPolicy> stream, const CMDP& env, std::uint64_t M,
                                      Rng& rng) {
  if (stream.empty()) throw ConfigError("online-to-batch: empty policy stream");
  if (M == 0) throw ConfigError("online-to-batch: M must be at least 1");
  BatchSelection out;
  for (const AgentPolicy& pi : stream) {
    check_policy_dims(env, pi);
    double total = 0.0;
    for (std::uint64_t m = 0; m < M; ++m) total += sample_cmdp_return(env, pi, rng).reward;
    out.estimates.push_back(total / static_cast<double>(M));
    out.episodes += M;
  }
  out.index = 0;
  for (int t = 1; t < static_cast<int>(out.estimates.size()); ++t) {
    if (out.estimates[t] > out.estimates[out.index]) out.index = t;
  }
  return out;
}

BatchSelection online_to_batch_exact(std::span<const AgentPolicy> stream, const CMDP& model) {
  if (stream.empty()) throw ConfigError("online-to-batch: empty policy stream");
  BatchSelection out;
  for (const AgentPolicy& pi : stream) out.estimates.push_back(evaluate(model, pi).reward);
  out.index = 0;
  for (int t = 1; t < static_cast<int>(out.estimates.size()); ++t) {
    if (out.estimates[t] > out.estimates[out.index]) out.index = t;
  }
  return out;
}

std::uint64_t online_to_batch_episodes(double epsilon, double delta, int horizon, double C) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || horizon < 1 || !(C > 0.0)) {
    throw ConfigError("online-to-batch: invalid episode-count arguments");
  }
  const double H = horizon;
  const double m = 16.0 * H * H / (epsilon * epsilon) * std::log(2.0 * C / (epsilon * delta));
  return m < 1.0 ? 1 : static_cast<std::uint64_t>(std::ceil(m));
}

double regret_coefficient_for_stream(double epsilon, std::uint64_t T) {
  return epsilon * std::sqrt(static_cast<double>(T)) / 2.0;
}

}  // namespace cmpg
