#include <algorithm>
#include <cmath>

#include "cmpg/environments.hpp"
#include "cmpg/errors.hpp"

namespace cmpg {

double CongestionConfig::scale() const {
  if (reward_scale > 0.0) return reward_scale;
  return n_agents * *std::max_element(w_safe.begin(), w_safe.end());
}

void CongestionConfig::validate() const {
  if (n_agents < 1) throw ConfigError("congestion: need at least one agent");
  if (w_safe.empty() || w_safe.size() != w_unsafe.size()) throw ConfigError("congestion: weight vectors differ in length");
  for (std::size_t a = 0; a < w_safe.size(); ++a) {
    if (!(w_safe[a] > 0.0) || !(w_unsafe[a] > 0.0)) throw ConfigError("congestion: weights must be positive");
    if (a > 0 && !(w_safe[a - 1] < w_safe[a] && w_unsafe[a - 1] < w_unsafe[a])) {
      throw ConfigError("congestion: weights must be strictly increasing over actions");
    }
    for (int k = 1; k <= n_agents; ++k) {
      if (!(k * w_safe[a] > k * w_unsafe[a] - offset)) throw ConfigError("congestion: safe rewards must dominate");
    }
  }
  if (!(offset >= 0.0)) throw ConfigError("congestion: offset must be >= 0");
  if (horizon < 1) throw ConfigError("congestion: horizon must be positive");
  if (!(alpha >= 0.0 && alpha <= horizon)) throw ConfigError("congestion: alpha outside [0, H]");
  if (!(mu_safe >= 0.0 && mu_safe <= 1.0)) throw ConfigError("congestion: mu_safe outside [0, 1]");
  const double top = std::max(n_agents * *std::max_element(w_safe.begin(), w_safe.end()),
                              n_agents * *std::max_element(w_unsafe.begin(), w_unsafe.end()) - offset);
  if (top / scale() > 1.0 + 1e-12) throw ConfigError("congestion: scaled reward exceeds 1");
}

CMPG build_congestion_game(const CongestionConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_agents;
  const int m = static_cast<int>(cfg.w_safe.size());
  CMPG g;
  g.name = "congestion";
  g.n_agents = n;
  g.n_states = 2;
  g.horizon = cfg.horizon;
  g.actions_per_agent.assign(n, m);
  g.count_symmetric = true;
  const JointActionCodec codec = g.codec();
  const int J = codec.size();
  const double scale = cfg.scale();
  const std::size_t size = g.stage_size();
  g.rewards.assign(n, std::vector<double>(size, 0.0));
  std::vector<double> cost(size, 0.0);
  g.transitions = TransitionTable(g.horizon, 2, J);
  // Per joint action: counts, k*, and per-state next state / stage values.
  std::vector<int> profile(n), counts(m);
  std::vector<int> next_state(2 * J);
  std::vector<char> crowded(J);
  for (int a = 0; a < J; ++a) {
    codec.decode(a, profile);
    std::fill(counts.begin(), counts.end(), 0);
    for (int x : profile) ++counts[x];
    const int kstar = *std::max_element(counts.begin(), counts.end());
    next_state[kSafe * J + a] = kstar > n / 2.0 ? kUnsafe : kSafe;
    next_state[kUnsafe * J + a] = kstar <= n / 4.0 ? kSafe : kUnsafe;
    crowded[a] = kstar > n / 2.0;
    for (int h = 0; h < g.horizon; ++h) {
      for (int i = 0; i < n; ++i) {
        const int x = profile[i];
        g.rewards[i][g.index(h, kSafe, a)] = counts[x] * cfg.w_safe[x] / scale;
        g.rewards[i][g.index(h, kUnsafe, a)] = std::max(0.0, counts[x] * cfg.w_unsafe[x] - cfg.offset) / scale;
      }
    }
  }
  for (int h = 0; h < g.horizon; ++h) {
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < J; ++a) {
        const Successor next{next_state[s * J + a], 1.0};
        g.transitions.push_row(std::span<const Successor>(&next, 1));
        if (h == 0 && s == kUnsafe && crowded[a]) cost[g.index(h, s, a)] = 1.0;
      }
    }
  }
  g.costs = {cost};
  g.thresholds = {cfg.alpha};
  g.initial_dist = {cfg.mu_safe, 1.0 - cfg.mu_safe};
  finalize(g);
  return g;
}

CMPG build_bimatrix(std::vector<std::vector<double>> A, std::vector<std::vector<double>> B, double alpha) {
  return BimatrixCMPG::make(std::move(A), std::move(B), alpha).to_cmpg();
}

}  // namespace cmpg
