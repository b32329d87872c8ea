#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cmpg/game.hpp"

namespace cmpg {

// Two-agent, one-state, one-step CMPG given by a shared reward matrix A and a
// cost matrix B. Numbers are reported on A's raw scale; the CMPG view divides
// rewards by `scale` = max |A| so they fit in [0, 1].
struct BimatrixCMPG {
  std::vector<std::vector<double>> A;
  std::vector<std::vector<double>> B;
  double alpha = 0.0;
  double scale = 1.0;

  // Throws DimensionError / ModelError: ragged or mismatched matrices,
  // negative or non-finite A, B outside [0, 1], alpha outside [0, 1].
  static BimatrixCMPG make(std::vector<std::vector<double>> A, std::vector<std::vector<double>> B, double alpha);

  int rows() const { return static_cast<int>(A.size()); }
  int cols() const { return static_cast<int>(A[0].size()); }
  double reward(const std::vector<double>& p, const std::vector<double>& q) const;  // p^T A q
  double cost(const std::vector<double>& p, const std::vector<double>& q) const;    // p^T B q
  CMPG to_cmpg() const;
  // Default dual search interval: [0, 2 max|A| / min positive slack].
  double default_lambda_max() const;
};

struct DualValue {
  double value = 0.0;
  int row = 0;  // maximizing pure joint, lexicographically first
  int col = 0;
};

// d(lambda) = max over pure joints of A(i,j) + lambda (alpha - B(i,j)).
// Throws ConfigError for lambda < 0.
DualValue dual_function(const BimatrixCMPG& game, double lambda);

struct MixedPair {
  std::vector<double> p;
  std::vector<double> q;
  bool pure = true;
  bool feasible = false;
  double reward = 0.0;  // raw scale
  double cost = 0.0;
};

struct DualSolution {
  double lambda = 0.0;
  double value = 0.0;
  // Pure joints attaining d(lambda*) plus uniform mixtures over every maximal
  // rectangle of such joints.
  std::vector<MixedPair> argmax;
};

// Exact minimization of d over [0, lambda_max] through its breakpoints;
// ties go to the smallest lambda.
DualSolution solve_dual(const BimatrixCMPG& game, std::optional<double> lambda_max = std::nullopt);

// d at `points` equidistant lambdas on [0, lambda_max], endpoints included.
std::vector<std::pair<double, double>> dual_trace(const BimatrixCMPG& game, double lambda_max, int points);

struct PrimalSolution {
  double value = 0.0;  // raw scale
  std::vector<double> p;
  std::vector<double> q;
  double certificate = 0.0;  // Lipschitz bound on the grid error
};

// 2x2 only. Grid over the row player's mixing probability, exact best
// feasible column response at each grid point, then a golden-section pass
// around the best point. Throws InfeasibleError when nothing is feasible.
PrimalSolution solve_primal_grid(const BimatrixCMPG& game, int resolution = 1000);

struct DualArgmaxEntry {
  MixedPair pair;
  std::optional<double> nash_gap;  // raw scale; empty when infeasible
};

struct DualityReport {
  PrimalSolution primal;
  DualSolution dual;
  double gap = 0.0;  // D* - P*
  std::vector<DualArgmaxEntry> table;
  std::vector<std::pair<double, double>> trace;
  double lambda_max = 0.0;
};

// A = [[3,2],[2,4]], B = [[0,0],[0,1]], alpha = 1/2: positive duality gap.
BimatrixCMPG duality_gap_example();
// Same B and alpha with A = [[3,3],[3,4]]: no gap, but a dual maximizer is not Nash.
BimatrixCMPG zero_gap_example();

DualityReport duality_gap_report(const BimatrixCMPG& game, std::optional<double> lambda_max = std::nullopt,
                                 int trace_points = 1000, int resolution = 1000);

}  // namespace cmpg
