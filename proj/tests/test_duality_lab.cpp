#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmpg/ca_cmpg.hpp"
#include "cmpg/duality_lab.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/evaluation.hpp"
#include "cmpg/random.hpp"

using namespace cmpg;

namespace {

using Matrix = std::vector<std::vector<double>>;

double bilinear(const Matrix& M, double p, double q) {
  return (1 - p) * (1 - q) * M[0][0] + (1 - p) * q * M[0][1] + p * (1 - q) * M[1][0] + p * q * M[1][1];
}

// Brute force over a square grid of mixing probabilities.
double grid_primal(const BimatrixCMPG& g, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double p = static_cast<double>(i) / n;
      const double q = static_cast<double>(j) / n;
      if (bilinear(g.B, p, q) <= g.alpha + 1e-12) best = std::max(best, bilinear(g.A, p, q));
    }
  }
  return best;
}

double brute_dual(const BimatrixCMPG& g, double lambda) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) best = std::max(best, g.A[i][j] + lambda * (g.alpha - g.B[i][j]));
  }
  return best;
}

BimatrixCMPG random_bimatrix(Rng& rng) {
  Matrix A(2, std::vector<double>(2));
  Matrix B(2, std::vector<double>(2));
  for (auto& r : A) for (double& x : r) x = 0.1 + 4.0 * uniform01(rng);
  for (auto& r : B) for (double& x : r) x = uniform01(rng);
  B[0][0] = 0.0;  // keeps the primal feasible
  return BimatrixCMPG::make(A, B, 0.1 + 0.8 * uniform01(rng));
}

}  // namespace

TEST_SUITE("duality_lab") {

TEST_CASE("dual function of the gap example") {
  const BimatrixCMPG g = duality_gap_example();
  CHECK(dual_function(g, 0.0).value == 4.0);
  CHECK(dual_function(g, 1.0).value == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(dual_function(g, 2.0).value == doctest::Approx(4.0).epsilon(1e-15));
  const DualValue d0 = dual_function(g, 0.0);
  CHECK(d0.row == 1);
  CHECK(d0.col == 1);
  CHECK_THROWS_AS(dual_function(g, -0.1), ConfigError);
}

TEST_CASE("dual optimum of the gap example") {
  const DualSolution d = solve_dual(duality_gap_example());
  CHECK(d.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.value == doctest::Approx(3.5).epsilon(1e-12));
  // (0,0) and (1,1) attain d(1); the off-diagonal joints do not.
  bool has00 = false;
  bool has11 = false;
  for (const MixedPair& m : d.argmax) {
    if (!m.pure) continue;
    has00 = has00 || (m.p[0] == 1.0 && m.q[0] == 1.0);
    has11 = has11 || (m.p[1] == 1.0 && m.q[1] == 1.0);
  }
  CHECK(has00);
  CHECK(has11);
}

TEST_CASE("primal optimum of the gap example") {
  const BimatrixCMPG g = duality_gap_example();
  const PrimalSolution p = solve_primal_grid(g);
  CHECK(p.value == doctest::Approx(4.5 - std::sqrt(2.0)).epsilon(1e-6));
  CHECK(p.p[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
  CHECK(p.q[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
  CHECK(g.cost(p.p, p.q) <= g.alpha + 1e-9);
  CHECK(p.value >= grid_primal(g, 400) - 1e-12);
}

TEST_CASE("duality report") {
  const BimatrixCMPG g = duality_gap_example();
  const DualityReport r = duality_gap_report(g);
  CHECK(r.gap == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-6));
  CHECK(r.gap > 0.4);
  CHECK(r.lambda_max == doctest::Approx(16.0));
  CHECK(r.trace.size() == 1000);
  CHECK(r.trace.front().first == 0.0);
  CHECK(r.trace.back().first == doctest::Approx(r.lambda_max));
  for (const auto& [l, v] : r.trace) CHECK(v == doctest::Approx(brute_dual(g, l)).epsilon(1e-12));
  for (const DualArgmaxEntry& e : r.table) CHECK(e.nash_gap.has_value() == e.pair.feasible);
}

TEST_CASE("zero-gap example still has a non-Nash dual maximizer") {
  const BimatrixCMPG g = zero_gap_example();
  const DualityReport r = duality_gap_report(g);
  CHECK(std::abs(r.gap) < 1e-6);
  CHECK(r.dual.value == doctest::Approx(3.5).epsilon(1e-12));
  bool found = false;
  for (const DualArgmaxEntry& e : r.table) {
    if (e.pair.pure || !e.nash_gap) continue;
    if (std::abs(e.pair.p[0] - 0.5) < 1e-12 && std::abs(e.pair.q[0] - 0.5) < 1e-12) {
      CHECK(*e.nash_gap == doctest::Approx(0.25).epsilon(1e-9));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("invalid games") {
  CHECK_THROWS_AS(BimatrixCMPG::make({{1, 2}, {3}}, {{0, 0}, {0, 0}}, 0.5), DimensionError);
  CHECK_THROWS_AS(BimatrixCMPG::make({{1, 2}, {3, 4}}, {{0, 0}, {0, 1.5}}, 0.5), ModelError);
  CHECK_THROWS_AS(BimatrixCMPG::make({{1, -2}, {3, 4}}, {{0, 0}, {0, 1}}, 0.5), ModelError);
  CHECK_THROWS_AS(BimatrixCMPG::make({{1, 2}, {3, 4}}, {{0, 0}, {0, 1}}, 1.5), ModelError);
  CHECK_THROWS_AS(dual_trace(duality_gap_example(), 1.0, 1), ConfigError);
  const BimatrixCMPG none = BimatrixCMPG::make({{1, 2}, {3, 4}}, {{1, 1}, {1, 1}}, 0.5);
  CHECK_THROWS_AS(solve_primal_grid(none), InfeasibleError);
}

TEST_CASE("random games: weak duality, convexity and breakpoint attainment") {
  Rng rng(90);
  for (int trial = 0; trial < 40; ++trial) {
    const BimatrixCMPG g = random_bimatrix(rng);
    const double hi = g.default_lambda_max();
    const DualSolution d = solve_dual(g);
    CHECK(d.value == doctest::Approx(brute_dual(g, d.lambda)).epsilon(1e-12));

    // The exact minimum is no worse than any point of a fine lambda grid.
    double grid_min = std::numeric_limits<double>::infinity();
    for (int t = 0; t <= 10000; ++t) grid_min = std::min(grid_min, brute_dual(g, hi * t / 10000.0));
    CHECK(d.value <= grid_min + 1e-12);

    const PrimalSolution p = solve_primal_grid(g, 400);
    CHECK(p.value <= d.value + 1e-9);
    CHECK(p.value >= grid_primal(g, 200) - 1e-9);

    for (int k = 0; k < 20; ++k) {
      const double a = hi * uniform01(rng);
      const double b = hi * uniform01(rng);
      const double w = uniform01(rng);
      CHECK(dual_function(g, w * a + (1 - w) * b).value <=
            w * dual_function(g, a).value + (1 - w) * dual_function(g, b).value + 1e-12);
    }
  }
}

TEST_CASE("dual maximizers are equilibria of the Lagrangian game") {
  Rng rng(91);
  for (int trial = 0; trial < 40; ++trial) {
    const BimatrixCMPG g = trial == 0 ? duality_gap_example() : random_bimatrix(rng);
    const DualSolution d = solve_dual(g);
    auto lag = [&](const std::vector<double>& p, const std::vector<double>& q) {
      return g.reward(p, q) + d.lambda * (g.alpha - g.cost(p, q));
    };
    for (const MixedPair& m : d.argmax) {
      const double v = lag(m.p, m.q);
      CHECK(v == doctest::Approx(d.value).epsilon(1e-12));
      for (int i = 0; i < 2; ++i) {
        std::vector<double> e(2, 0.0);
        e[i] = 1.0;
        CHECK(lag(e, m.q) <= v + 1e-12);
        CHECK(lag(m.p, e) <= v + 1e-12);
      }
    }
  }
}

TEST_CASE("CMPG view scales rewards") {
  const BimatrixCMPG g = duality_gap_example();
  const CMPG c = g.to_cmpg();
  CHECK(g.scale == 4.0);
  CHECK(c.n_agents == 2);
  CHECK(c.horizon == 1);
  CHECK(c.thresholds[0] == 0.5);
  const std::vector<double> p{0.25, 0.75};
  const std::vector<double> q{0.6, 0.4};
  const double rp[] = {0.25, 0.75};
  const double rq[] = {0.6, 0.4};
  const EvalResult v = evaluate(c, {AgentPolicy::stationary(1, 1, rp), AgentPolicy::stationary(1, 1, rq)});
  CHECK(v.reward_values[0] * g.scale == doctest::Approx(g.reward(p, q)).epsilon(1e-12));
  CHECK(v.cost_values[0] == doctest::Approx(g.cost(p, q)).epsilon(1e-12));
}

}  // TEST_SUITE
