#include <algorithm>
#include <array>
#include <cmath>

#include "cmpg/environments.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/log.hpp"

namespace cmpg {

void GridWorldConfig::validate() const {
  if (width < 1 || height < 1) throw ConfigError("grid: width and height must be positive");
  auto inside = [&](GridCell c) { return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height; };
  if (!inside(start) || !inside(target)) throw ConfigError("grid: start or target outside the grid");
  if (start == target) throw ConfigError("grid: start and target coincide");
  for (const BonusCell& b : bonus) {
    if (!inside(b.cell)) throw ConfigError("grid: bonus cell outside the grid");
    if (b.cell == start || b.cell == target) throw ConfigError("grid: bonus cell on start or target");
    if (b.reward < 0.0) throw ConfigError("grid: negative bonus");
  }
  if (horizon < 1) throw ConfigError("grid: horizon must be positive");
  if (!(alpha >= 0.0 && alpha <= horizon)) throw ConfigError("grid: alpha outside [0, H]");
  if (!(reward_scale > 0.0)) throw ConfigError("grid: reward scale must be positive");
  double best_bonus = 0.0;
  for (const BonusCell& b : bonus) best_bonus = std::max(best_bonus, b.reward);
  if (2.0 * std::max(best_bonus, target_reward) * reward_scale > 1.0 + 1e-12) {
    throw ConfigError("grid: scaled stage reward exceeds 1");
  }
  const int dist = std::abs(target.x - start.x) + std::abs(target.y - start.y);
  if (horizon < dist) log::warn("grid: horizon ", horizon, " is shorter than the path to the target (", dist, ")");
}

namespace {

int step_cell(const GridWorldConfig& cfg, int pos, int action) {
  int x = pos % cfg.width;
  int y = pos / cfg.width;
  switch (action) {
    case kUp: ++y; break;
    case kRight: ++x; break;
    case kDown: --y; break;
    case kLeft: --x; break;
    default: throw DimensionError("grid: action out of range");
  }
  if (x < 0 || x >= cfg.width || y < 0 || y >= cfg.height) return pos;
  return y * cfg.width + x;
}

struct Move {
  int next;
  double reward;  // unscaled
};

Move move_agent(const GridWorldConfig& cfg, const std::vector<double>& cell_reward, int pos, int action) {
  const int target = cfg.cell_index(cfg.target);
  if (pos == target) return {pos, 0.0};
  const int next = step_cell(cfg, pos, action);
  if (next == pos && !cfg.reward_on_stay) return {pos, 0.0};
  return {next, cell_reward[next]};
}

}  // namespace

CMPG build_grid_world(const GridWorldConfig& cfg) {
  cfg.validate();
  const int cells = cfg.width * cfg.height;
  std::vector<double> cell_reward(cells, 0.0);
  cell_reward[cfg.cell_index(cfg.target)] = cfg.target_reward;
  for (const BonusCell& b : cfg.bonus) cell_reward[cfg.cell_index(b.cell)] = b.reward;
  const int start = cfg.cell_index(cfg.start);
  const int target = cfg.cell_index(cfg.target);

  CMPG g;
  g.name = "grid_world";
  g.n_agents = 2;
  g.n_states = cells * cells;
  g.horizon = cfg.horizon;
  g.actions_per_agent = {4, 4};
  const int J = 16;
  const std::size_t size = g.stage_size();
  std::vector<double> reward(size, 0.0);
  std::vector<double> cost(size, 0.0);
  g.transitions = TransitionTable(g.horizon, g.n_states, J);
  for (int h = 0; h < g.horizon; ++h) {
    for (int s = 0; s < g.n_states; ++s) {
      const int p1 = s / cells;
      const int p2 = s % cells;
      for (int a = 0; a < J; ++a) {
        const Move m1 = move_agent(cfg, cell_reward, p1, a / 4);
        const Move m2 = move_agent(cfg, cell_reward, p2, a % 4);
        const std::size_t i = g.index(h, s, a);
        reward[i] = (m1.reward + m2.reward) * cfg.reward_scale;
        cost[i] = (m1.next == m2.next && m1.next != start && m1.next != target) ? 1.0 : 0.0;
        const Successor next{m1.next * cells + m2.next, 1.0};
        g.transitions.push_row(std::span<const Successor>(&next, 1));
      }
    }
  }
  g.rewards = {reward, reward};
  g.costs = {cost};
  g.thresholds = {cfg.alpha};
  g.initial_dist.assign(g.n_states, 0.0);
  g.initial_dist[start * cells + start] = 1.0;
  finalize(g);
  return g;
}

JointPolicy grid_world_reference_policy(const GridWorldConfig& cfg, const CMPG& game) {
  const int cells = cfg.width * cfg.height;
  if (game.n_states != cells * cells || game.n_agents != 2) throw DimensionError("reference policy: game shape mismatch");
  const std::vector<int> agent1{kRight, kRight, kRight, kUp, kUp};
  const std::vector<int> agent2_a{kRight, kUp, kUp, kRight, kRight};  // probability 0.1
  const std::vector<int> agent2_b{kUp, kUp, kRight, kRight, kRight};  // probability 0.9
  JointPolicy pi{AgentPolicy::uniform(game.horizon, game.n_states, 4),
                 AgentPolicy::uniform(game.horizon, game.n_states, 4)};
  auto action_at = [](const std::vector<int>& path, int h) { return h < static_cast<int>(path.size()) ? path[h] : kUp; };
  const int start = cfg.cell_index(cfg.start);
  for (const auto* branch : {&agent2_a, &agent2_b}) {
    int p1 = start;
    int p2 = start;
    for (int h = 0; h < game.horizon; ++h) {
      const int s = p1 * cells + p2;
      const int a1 = action_at(agent1, h);
      const int a2 = action_at(*branch, h);
      pi[0].set_action(h, s, a1);
      if (h == 0) {
        const std::array<double, 4> mix{0.9, 0.1, 0.0, 0.0};  // up 0.9, right 0.1
        pi[1].set_row(h, s, mix);
      } else {
        pi[1].set_action(h, s, a2);
      }
      if (p1 != cfg.cell_index(cfg.target)) p1 = step_cell(cfg, p1, a1);
      if (p2 != cfg.cell_index(cfg.target)) p2 = step_cell(cfg, p2, a2);
    }
  }
  return pi;
}

}  // namespace cmpg
