#include <doctest.h>

#include <cmath>

#include "cmpg/count_marginal.hpp"
#include "cmpg/duality_lab.hpp"
#include "cmpg/environments.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/evaluation.hpp"
#include "helpers.hpp"

using namespace cmpg;

namespace {

AgentPolicy mixed(double p2) {
  const double row[] = {1.0 - p2, p2};
  return AgentPolicy::stationary(1, 1, row);
}

// A/4 scale, so raw values are 4x the CMPG values.
CMPG gap_game() { return duality_gap_example().to_cmpg(); }

}  // namespace

TEST_SUITE("tabular_core") {

TEST_CASE("joint action codec puts agent 0 first") {
  JointActionCodec codec({2, 3, 4});
  CHECK(codec.size() == 24);
  const int prof[] = {1, 2, 3};
  CHECK(codec.encode(prof) == 1 * 12 + 2 * 4 + 3);
  for (int j = 0; j < codec.size(); ++j) {
    int out[3];
    codec.decode(j, out);
    CHECK(codec.encode(out) == j);
    for (int i = 0; i < 3; ++i) CHECK(codec.action_of(j, i) == out[i]);
  }
}

TEST_CASE("transition table rejects rows that are not distributions") {
  TransitionTable t(1, 2, 1);
  const double good[] = {0.5, 0.5};
  const double bad[] = {0.5, 0.6};
  t.push_dense_row(good);
  t.push_dense_row(bad);
  CHECK_THROWS_AS(t.validate(), ModelError);
  TransitionTable missing(1, 2, 1);
  missing.push_dense_row(good);
  CHECK_THROWS_AS(missing.validate(), ModelError);
}

TEST_CASE("game validation catches range and shape violations") {
  Rng rng(1);
  CMPG g = testutil::random_game(rng, 2, 2, {2, 2}, 2, true);
  CHECK_NOTHROW(g.validate());
  SUBCASE("reward above one") {
    g.rewards[1][0] = 1.5;
    g.cooperative = false;
    CHECK_THROWS_AS(g.validate(), ModelError);
  }
  SUBCASE("threshold above H") {
    g.thresholds[0] = 2.5;
    CHECK_THROWS_AS(g.validate(), ModelError);
  }
  SUBCASE("initial distribution mass") {
    g.initial_dist[0] += 1e-9;
    CHECK_THROWS_AS(g.validate(), ModelError);
  }
  SUBCASE("reward table length") {
    g.rewards[0].pop_back();
    CHECK_THROWS_AS(g.validate(), DimensionError);
  }
}

TEST_CASE("policy rows must be distributions") {
  AgentPolicy p = AgentPolicy::uniform(2, 2, 3);
  CHECK_NOTHROW(p.validate());
  p.at(1, 1, 0) += 1e-9;
  CHECK_THROWS_AS(p.validate(), ModelError);
}

TEST_CASE("bimatrix values") {
  const CMPG g = gap_game();
  SUBCASE("pure first actions give A(1,1) = 3") {
    const EvalResult r = evaluate(g, {mixed(0.0), mixed(0.0)});
    CHECK(r.reward_values[0] * 4.0 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.reward_values[1] == r.reward_values[0]);
  }
  SUBCASE("uniform policies average the four entries") {
    const EvalResult r = evaluate(g, {mixed(0.5), mixed(0.5)});
    CHECK(std::abs(r.reward_values[0] * 4.0 - 2.75) < 1e-12);
  }
}

TEST_CASE("zero reward gives zero value") {
  Rng rng(2);
  CMPG g = testutil::random_game(rng, 2, 3, {2, 3}, 3, false);
  std::fill(g.rewards[1].begin(), g.rewards[1].end(), 0.0);
  finalize(g);
  const EvalResult r = evaluate(g, testutil::random_joint_policy(rng, g));
  CHECK(r.reward_values[1] == 0.0);
}

TEST_CASE("dimension mismatches are reported") {
  Rng rng(3);
  const CMPG g = testutil::random_game(rng, 2, 2, {2, 3}, 2, true);
  JointPolicy pol = uniform_policy(g);
  SUBCASE("wrong action count") {
    pol[1] = AgentPolicy::uniform(2, 2, 2);
    CHECK_THROWS_AS(evaluate(g, pol), DimensionError);
  }
  SUBCASE("missing agent") {
    pol.pop_back();
    CHECK_THROWS_AS(evaluate(g, pol), DimensionError);
  }
  SUBCASE("wrong horizon") {
    pol[0] = AgentPolicy::uniform(3, 2, 2);
    CHECK_THROWS_AS(evaluate(g, pol), DimensionError);
  }
}

TEST_CASE("feasibility and slacks") {
  const CMPG g = gap_game();
  SUBCASE("first actions cost nothing") {
    const FeasibilityReport f = is_feasible(g, {mixed(0.0), mixed(0.0)});
    CHECK(f.feasible);
    CHECK(f.slacks[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("second actions cost one") {
    const FeasibilityReport f = is_feasible(g, {mixed(1.0), mixed(1.0)});
    CHECK_FALSE(f.feasible);
    CHECK(f.slacks[0] == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("zero-cost game") {
    Rng rng(4);
    CMPG z = testutil::random_game(rng, 2, 2, {2, 2}, 2, true);
    std::fill(z.costs[0].begin(), z.costs[0].end(), 0.0);
    z.thresholds[0] = 0.0;
    CHECK(is_feasible(z, testutil::random_joint_policy(rng, z)).feasible);
  }
}

TEST_CASE("episodes follow deterministic dynamics and repeat under a seed") {
  const CMPG grid = build_grid_world();
  const JointPolicy pol = grid_world_reference_policy({}, grid);
  const Trajectory a = sample_episode(grid, pol, 99);
  const Trajectory b = sample_episode(grid, pol, 99);
  REQUIRE(a.size() == 6);
  REQUIRE(b.size() == a.size());
  for (std::size_t h = 0; h < a.size(); ++h) {
    CHECK(a[h].state == b[h].state);
    CHECK(a[h].joint_action == b[h].joint_action);
    CHECK(a[h].rewards == b[h].rewards);
    CHECK(a[h].costs == b[h].costs);
    if (h + 1 < a.size()) CHECK(a[h].next_state == a[h + 1].state);
  }

  // Agent 1 plays right, right, right, up, up from the start cell.
  const std::vector<int> path{0, 1, 2, 3, 7, 11};
  for (std::size_t h = 0; h < path.size(); ++h) CHECK(a[h].state / 16 == path[h]);

  const Trajectory one = sample_episode(gap_game(), {mixed(0.0), mixed(1.0)}, 5);
  REQUIRE(one.size() == 1);
  CHECK(one[0].actions == std::vector<int>{0, 1});
  CHECK(one[0].rewards[0] * 4.0 == doctest::Approx(2.0));
}

TEST_CASE("potential gap") {
  const CMPG g = gap_game();
  const JointPolicy pi{mixed(0.0), mixed(0.0)};
  CHECK(potential_gap(g, pi, pi[0], 0) == 0.0);
  CHECK(potential_gap(g, pi, mixed(1.0), 0) * 4.0 == doctest::Approx(-1.0).epsilon(1e-12));

  Rng rng(5);
  const CMPG general = testutil::random_game(rng, 2, 2, {2, 2}, 2, false);
  CHECK_THROWS_AS(potential_gap(general, uniform_policy(general), AgentPolicy::uniform(2, 2, 2), 0),
                  UnsupportedOperation);

  const CMPG grid = build_grid_world();
  const JointPolicy fig = grid_world_reference_policy({}, grid);
  const AgentPolicy dev = AgentPolicy::uniform(6, 256, 4);
  const double g0 = potential_gap(grid, fig, dev, 0);
  const JointPolicy dev_pol = with_agent(fig, 0, dev);
  const EvalResult a = evaluate(grid, fig);
  const EvalResult b = evaluate(grid, dev_pol);
  CHECK(std::abs(g0 - (b.reward_values[1] - a.reward_values[1])) < 1e-12);
}

TEST_CASE("backward induction matches forward enumeration on random games") {
  Rng rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<int> acts(n);
    for (int& a : acts) a = 1 + static_cast<int>(uniform01(rng) * 3);
    const int S = 1 + trial % 4;
    const int H = 1 + trial % 3;
    const CMPG g = testutil::random_game(rng, n, S, acts, H, trial % 2 == 0, 1 + trial % 2);
    const JointPolicy pol = testutil::random_joint_policy(rng, g);
    const EvalResult r = evaluate(g, pol);
    const auto ref = testutil::forward_values(g, pol);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(r.reward_values[i] - ref.rewards[i]) < 1e-10);
      CHECK(r.reward_values[i] >= 0.0);
      CHECK(r.reward_values[i] <= H);
    }
    for (int j = 0; j < g.n_constraints(); ++j) CHECK(std::abs(r.cost_values[j] - ref.costs[j]) < 1e-10);
  }
}

TEST_CASE("per-step values start from the initial distribution") {
  Rng rng(7);
  const CMPG g = testutil::random_game(rng, 2, 3, {2, 2}, 3, true);
  const JointPolicy pol = testutil::random_joint_policy(rng, g);
  EvalOptions opt;
  opt.per_step_values = true;
  const EvalResult r = evaluate(g, pol, opt);
  REQUIRE(r.per_step.has_value());
  double v0 = 0.0;
  for (int s = 0; s < g.n_states; ++s) v0 += g.initial_dist[s] * r.per_step->reward[0][s];
  CHECK(std::abs(v0 - r.reward_values[0]) < 1e-12);
}

TEST_CASE("Monte Carlo averages agree with exact values") {
  Rng rng(8);
  const CMPG g = testutil::random_game(rng, 2, 3, {2, 2}, 3, true);
  const JointPolicy pol = testutil::random_joint_policy(rng, g);
  const EvalResult exact = evaluate(g, pol);
  const int M = 100000;
  double sum_r = 0.0;
  double sum_c = 0.0;
  Rng ep(123);
  for (int m = 0; m < M; ++m) {
    for (const StepRecord& st : sample_episode(g, pol, ep)) {
      sum_r += st.rewards[0];
      sum_c += st.costs[0];
    }
  }
  const double tol = 3.0 * g.horizon / std::sqrt(static_cast<double>(M));
  CHECK(std::abs(sum_r / M - exact.reward_values[0]) <= tol);
  CHECK(std::abs(sum_c / M - exact.cost_values[0]) <= tol);
}

TEST_CASE("cooperative deviation gaps do not depend on the agent index") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const CMPG g = testutil::random_game(rng, 3, 2, {2, 3, 2}, 2, true);
    const JointPolicy pol = testutil::random_joint_policy(rng, g);
    const int i = trial % 3;
    const AgentPolicy dev = testutil::random_policy(rng, 2, 2, g.actions_per_agent[i]);
    const JointPolicy moved = with_agent(pol, i, dev);
    const EvalResult a = evaluate(g, pol);
    const EvalResult b = evaluate(g, moved);
    const double gap = potential_gap(g, pol, dev, i);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(b.reward_values[k] - a.reward_values[k] - gap) < 1e-12);
  }
}

TEST_CASE("count convolution equals naive enumeration on small congestion games") {
  Rng rng(10);
  for (int n = 2; n <= 4; ++n) {
    CongestionConfig cfg;
    cfg.n_agents = n;
    const CMPG g = build_congestion_game(cfg);
    for (int trial = 0; trial < 5; ++trial) {
      const JointPolicy pol = testutil::random_joint_policy(rng, g, 0.3);
      EvalOptions naive;
      naive.marginalizer = Marginalizer::naive;
      EvalOptions conv;
      conv.marginalizer = Marginalizer::count_convolution;
      const EvalResult a = evaluate(g, pol, naive);
      const EvalResult b = evaluate(g, pol, conv);
      for (int i = 0; i < n; ++i) CHECK(std::abs(a.reward_values[i] - b.reward_values[i]) < 1e-10);
      CHECK(std::abs(a.cost_values[0] - b.cost_values[0]) < 1e-10);
    }
  }
}

TEST_CASE("count convolution needs a count-symmetric game") {
  Rng rng(11);
  const CMPG g = testutil::random_game(rng, 2, 2, {2, 2}, 2, true);
  EvalOptions conv;
  conv.marginalizer = Marginalizer::count_convolution;
  CHECK_THROWS(evaluate(g, uniform_policy(g), conv));
}

}  // TEST_SUITE
