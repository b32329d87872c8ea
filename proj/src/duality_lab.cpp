#include "cmpg/duality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cmpg/ca_cmpg.hpp"
#include "cmpg/errors.hpp"

namespace cmpg {

BimatrixCMPG BimatrixCMPG::make(std::vector<std::vector<double>> A, std::vector<std::vector<double>> B, double alpha) {
  if (A.empty() || A[0].empty()) throw DimensionError("bimatrix: empty reward matrix");
  const std::size_t k = A[0].size();
  if (B.size() != A.size()) throw DimensionError("bimatrix: A and B differ in rows");
  double amax = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i].size() != k || B[i].size() != k) throw DimensionError("bimatrix: ragged matrix");
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(A[i][j]) || A[i][j] < 0.0) throw ModelError("bimatrix: A entries must be finite and >= 0");
      if (!(B[i][j] >= 0.0 && B[i][j] <= 1.0)) throw ModelError("bimatrix: B entries must lie in [0, 1]");
      amax = std::max(amax, A[i][j]);
    }
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ModelError("bimatrix: alpha must lie in [0, 1]");
  BimatrixCMPG g;
  g.A = std::move(A);
  g.B = std::move(B);
  g.alpha = alpha;
  g.scale = amax > 0.0 ? amax : 1.0;
  return g;
}

double BimatrixCMPG::reward(const std::vector<double>& p, const std::vector<double>& q) const {
  double v = 0.0;
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols(); ++j) v += p[i] * A[i][j] * q[j];
  }
  return v;
}

double BimatrixCMPG::cost(const std::vector<double>& p, const std::vector<double>& q) const {
  double v = 0.0;
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols(); ++j) v += p[i] * B[i][j] * q[j];
  }
  return v;
}

CMPG BimatrixCMPG::to_cmpg() const {
  CMPG g;
  g.name = "bimatrix";
  g.n_agents = 2;
  g.n_states = 1;
  g.horizon = 1;
  g.actions_per_agent = {rows(), cols()};
  const int J = rows() * cols();
  g.transitions = TransitionTable(1, 1, J);
  std::vector<double> r(J), c(J);
  const Successor stay{0, 1.0};
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols(); ++j) {
      r[i * cols() + j] = A[i][j] / scale;
      c[i * cols() + j] = B[i][j];
      g.transitions.push_row(std::span<const Successor>(&stay, 1));
    }
  }
  g.rewards = {r, r};
  g.costs = {c};
  g.thresholds = {alpha};
  g.initial_dist = {1.0};
  finalize(g);
  return g;
}

double BimatrixCMPG::default_lambda_max() const {
  double amax = 0.0;
  double slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols(); ++j) {
      amax = std::max(amax, std::abs(A[i][j]));
      const double s = alpha - B[i][j];
      if (s > 0.0) slack = std::min(slack, s);
    }
  }
  if (!std::isfinite(slack)) return 2.0 * std::max(amax, 1.0);
  return 2.0 * std::max(amax, 1e-12) / slack;
}

DualValue dual_function(const BimatrixCMPG& game, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("dual function needs lambda >= 0");
  DualValue best{-std::numeric_limits<double>::infinity(), 0, 0};
  for (int i = 0; i < game.rows(); ++i) {
    for (int j = 0; j < game.cols(); ++j) {
      const double v = game.A[i][j] + lambda * (game.alpha - game.B[i][j]);
      if (v > best.value) best = {v, i, j};
    }
  }
  return best;
}

namespace {

constexpr double kArgmaxTol = 1e-9;

MixedPair make_pair(const BimatrixCMPG& game, std::vector<double> p, std::vector<double> q, bool pure) {
  MixedPair m;
  m.p = std::move(p);
  m.q = std::move(q);
  m.pure = pure;
  m.reward = game.reward(m.p, m.q);
  m.cost = game.cost(m.p, m.q);
  m.feasible = m.cost <= game.alpha + 1e-12;
  return m;
}

std::vector<double> uniform_on(const std::vector<int>& support, int size) {
  std::vector<double> d(size, 0.0);
  for (int k : support) d[k] = 1.0 / static_cast<double>(support.size());
  return d;
}

}  // namespace

DualSolution solve_dual(const BimatrixCMPG& game, std::optional<double> lambda_max) {
  const double hi = lambda_max.value_or(game.default_lambda_max());
  if (!(hi >= 0.0)) throw ConfigError("lambda_max must be >= 0");
  std::vector<double> a, s;
  for (int i = 0; i < game.rows(); ++i) {
    for (int j = 0; j < game.cols(); ++j) {
      a.push_back(game.A[i][j]);
      s.push_back(game.alpha - game.B[i][j]);
    }
  }
  std::vector<double> candidates{0.0, hi};
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = x + 1; y < a.size(); ++y) {
      if (s[x] == s[y]) continue;
      const double l = (a[x] - a[y]) / (s[y] - s[x]);
      if (l > 0.0 && l < hi) candidates.push_back(l);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  DualSolution out;
  out.value = std::numeric_limits<double>::infinity();
  for (double l : candidates) {
    const double v = dual_function(game, l).value;
    if (v < out.value - 1e-13 * (1.0 + std::abs(v))) {
      out.value = v;
      out.lambda = l;
    }
  }
  // Argmax cells at lambda*.
  const int m = game.rows();
  const int k = game.cols();
  std::vector<std::vector<char>> arg(m, std::vector<char>(k, 0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) {
      const double v = game.A[i][j] + out.lambda * (game.alpha - game.B[i][j]);
      if (v >= out.value - kArgmaxTol) {
        arg[i][j] = 1;
        std::vector<double> p(m, 0.0), q(k, 0.0);
        p[i] = 1.0;
        q[j] = 1.0;
        out.argmax.push_back(make_pair(game, p, q, true));
      }
    }
  }
  if (m > 12 || k > 12) return out;  // rectangle enumeration is exponential
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> rows_in;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) rows_in.push_back(i);
    }
    std::vector<int> cols_in;
    for (int j = 0; j < k; ++j) {
      bool all = true;
      for (int i : rows_in) all = all && arg[i][j];
      if (all) cols_in.push_back(j);
    }
    if (cols_in.empty()) continue;
    std::vector<int> closure;
    for (int i = 0; i < m; ++i) {
      bool all = true;
      for (int j : cols_in) all = all && arg[i][j];
      if (all) closure.push_back(i);
    }
    if (closure != rows_in || rows_in.size() * cols_in.size() < 2) continue;
    if (!seen.insert({rows_in, cols_in}).second) continue;
    out.argmax.push_back(make_pair(game, uniform_on(rows_in, m), uniform_on(cols_in, k), false));
  }
  return out;
}

std::vector<std::pair<double, double>> dual_trace(const BimatrixCMPG& game, double lambda_max, int points) {
  if (points < 2) throw ConfigError("dual trace needs at least two points");
  std::vector<std::pair<double, double>> out;
  out.reserve(points);
  for (int t = 0; t < points; ++t) {
    const double l = lambda_max * static_cast<double>(t) / static_cast<double>(points - 1);
    out.emplace_back(l, dual_function(game, l).value);
  }
  return out;
}

namespace {

struct Line {
  double q = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// Best feasible column mixing probability for a fixed row probability p (2x2).
Line best_column(const BimatrixCMPG& g, double p) {
  const std::vector<double> row{1.0 - p, p};
  const double r0 = g.reward(row, {1.0, 0.0});
  const double r1 = g.reward(row, {0.0, 1.0}) - r0;
  const double c0 = g.cost(row, {1.0, 0.0});
  const double c1 = g.cost(row, {0.0, 1.0}) - c0;
  double lo = 0.0;
  double hi = 1.0;
  if (c1 > 0.0) hi = std::min(hi, (g.alpha - c0) / c1);
  else if (c1 < 0.0) lo = std::max(lo, (g.alpha - c0) / c1);
  else if (c0 > g.alpha) return {};
  if (lo > hi) return {};
  Line out;
  out.q = r1 > 0.0 ? hi : lo;
  out.value = r0 + r1 * out.q;
  out.feasible = true;
  return out;
}

}  // namespace

PrimalSolution solve_primal_grid(const BimatrixCMPG& game, int resolution) {
  if (game.rows() != 2 || game.cols() != 2) throw UnsupportedOperation("primal grid search supports 2x2 games");
  if (resolution < 1) throw ConfigError("resolution must be >= 1");
  double best_p = 0.0;
  Line best;
  for (int k = 0; k <= resolution; ++k) {
    const double p = static_cast<double>(k) / resolution;
    const Line l = best_column(game, p);
    if (l.feasible && l.value > best.value) {
      best = l;
      best_p = p;
    }
  }
  if (!best.feasible) throw InfeasibleError("no feasible grid point");
  // Golden-section refinement within one grid cell on each side.
  double a = std::max(0.0, best_p - 1.0 / resolution);
  double b = std::min(1.0, best_p + 1.0 / resolution);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double p) { return best_column(game, p).value; };
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  const double p_ref = (a + b) / 2.0;
  const Line refined = best_column(game, p_ref);
  if (refined.feasible && refined.value > best.value) {
    best = refined;
    best_p = p_ref;
  }
  double amax = 0.0;
  for (const auto& row : game.A) {
    for (double x : row) amax = std::max(amax, std::abs(x));
  }
  PrimalSolution out;
  out.value = best.value;
  out.p = {1.0 - best_p, best_p};
  out.q = {1.0 - best.q, best.q};
  out.certificate = 2.0 * amax / resolution;
  return out;
}

DualityReport duality_gap_report(const BimatrixCMPG& game, std::optional<double> lambda_max, int trace_points,
                                 int resolution) {
  DualityReport rep;
  rep.lambda_max = lambda_max.value_or(game.default_lambda_max());
  rep.primal = solve_primal_grid(game, resolution);
  rep.dual = solve_dual(game, rep.lambda_max);
  rep.gap = rep.dual.value - rep.primal.value;
  const CMPG cmpg = game.to_cmpg();
  for (const MixedPair& pair : rep.dual.argmax) {
    DualArgmaxEntry e;
    e.pair = pair;
    if (pair.feasible) {
      JointPolicy pi{AgentPolicy::stationary(1, 1, pair.p), AgentPolicy::stationary(1, 1, pair.q)};
      e.nash_gap = verify_nash(cmpg, pi).epsilon * game.scale;
    }
    rep.table.push_back(std::move(e));
  }
  rep.trace = dual_trace(game, rep.lambda_max, trace_points);
  return rep;
}

}  // namespace cmpg

namespace cmpg {

BimatrixCMPG duality_gap_example() { return BimatrixCMPG::make({{3, 2}, {2, 4}}, {{0, 0}, {0, 1}}, 0.5); }

BimatrixCMPG zero_gap_example() { return BimatrixCMPG::make({{3, 3}, {3, 4}}, {{0, 0}, {0, 1}}, 0.5); }

}  // namespace cmpg
