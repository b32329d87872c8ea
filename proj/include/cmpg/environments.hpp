#pragma once

#include <vector>

#include "cmpg/duality_lab.hpp"
#include "cmpg/game.hpp"
#include "cmpg/policy.hpp"

namespace cmpg {

struct GridCell {
  int x = 0;  // column, 0 = left
  int y = 0;  // row, 0 = bottom
  bool operator==(const GridCell&) const = default;
};

struct BonusCell {
  GridCell cell;
  double reward = 0.0;
};

enum GridAction { kUp = 0, kRight = 1, kDown = 2, kLeft = 3 };

struct GridWorldConfig {
  int width = 4;
  int height = 4;
  GridCell start{0, 0};
  GridCell target{3, 2};
  double target_reward = 10.0;
  std::vector<BonusCell> bonus{{{1, 0}, 2.0}, {{0, 1}, 1.0}};
  int horizon = 6;
  double alpha = 0.1;
  double reward_scale = 1.0 / 20.0;
  // Staying on a cell (bumping into a wall) pays the cell reward again.
  bool reward_on_stay = false;

  void validate() const;  // throws ConfigError
  int cell_index(GridCell c) const { return c.y * width + c.x; }
};

// Two agents on a grid. Joint state pos1 * cells + pos2 with pos = y * width + x.
// Cell rewards accrue on entering; the target absorbs. Collision cost 1 when
// both successors share a cell other than start and target.
CMPG build_grid_world(const GridWorldConfig& cfg = {});

// Agent 1 goes right along the bottom row then up; agent 2 goes right, up,
// up, right, right with probability 0.1 and up, up, right, right, right
// otherwise. Rows off these paths are uniform.
JointPolicy grid_world_reference_policy(const GridWorldConfig& cfg, const CMPG& game);

struct CongestionConfig {
  int n_agents = 8;
  std::vector<double> w_safe{1.0, 2.0, 3.0, 4.0};
  std::vector<double> w_unsafe{0.5, 1.0, 1.5, 2.0};
  double offset = 3.0;
  int horizon = 2;
  double alpha = 0.5;
  double mu_safe = 0.5;
  // 0 selects n_agents * max w_safe.
  double reward_scale = 0.0;

  void validate() const;  // throws ConfigError
  double scale() const;
};

enum CongestionState { kSafe = 0, kUnsafe = 1 };

// Count-symmetric game over states {safe, unsafe}; actions A..D are 0..3.
CMPG build_congestion_game(const CongestionConfig& cfg = {});

// CMPG view of a bimatrix game (rewards divided by max |A|).
CMPG build_bimatrix(std::vector<std::vector<double>> A, std::vector<std::vector<double>> B, double alpha);

}  // namespace cmpg
