#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmpg/ca_cmpg.hpp"
#include "cmpg/cmdp_solvers.hpp"
#include "cmpg/duality_lab.hpp"
#include "cmpg/environments.hpp"
#include "cmpg/errors.hpp"
#include "helpers.hpp"

using namespace cmpg;

namespace {

AgentPolicy mixed(double p2) {
  const double row[] = {1.0 - p2, p2};
  return AgentPolicy::stationary(1, 1, row);
}

// Cooperative game with a threshold strictly above the minimum joint cost.
CMPG feasible_cooperative(Rng& rng, int S, int H, double slack) {
  CMPG g = testutil::random_game(rng, 2, S, {2, 2}, H, true);
  const JointPolicy init = feasible_init_single_constraint(g);
  g.thresholds[0] = std::min<double>(H, evaluate(g, init).cost_values[0] + slack);
  finalize(g);
  return g;
}

// Every stage quantity in {0, 1} and deterministic moves.
CMPG deterministic_game(Rng& rng, int S, int H) {
  CMPG g;
  g.n_agents = 2;
  g.n_states = S;
  g.horizon = H;
  g.actions_per_agent = {2, 2};
  g.transitions = TransitionTable(H, S, 4);
  for (std::size_t r = 0; r < g.transitions.rows(); ++r) {
    g.transitions.push_row(std::vector<Successor>{{static_cast<int>(uniform01(rng) * S), 1.0}});
  }
  std::vector<double> r(g.stage_size());
  for (double& x : r) x = uniform01(rng) < 0.5 ? 1.0 : 0.0;
  g.rewards = {r, r};
  g.costs = {std::vector<double>(g.stage_size(), 0.0)};
  g.thresholds = {1.0};
  g.initial_dist.assign(S, 0.0);
  g.initial_dist[0] = 1.0;
  finalize(g);
  return g;
}

}  // namespace

TEST_SUITE("ca_cmpg") {

TEST_CASE("a Nash initial policy ends the run in the first cycle") {
  const CMPG g = duality_gap_example().to_cmpg();
  const JointPolicy init{mixed(0.0), mixed(0.0)};
  KnownOptions opt;
  opt.epsilon = 0.01;
  const RunResult r = ca_cmpg_known(g, init, opt);
  REQUIRE(r.trace.cycles.size() == 1);
  CHECK(r.trace.converged);
  CHECK(r.trace.cycles[0].selected == -1);
  CHECK(std::abs(r.trace.cycles[0].gaps[0]) < 1e-12);
  CHECK(std::abs(r.trace.cycles[0].gaps[1]) < 1e-12);
  CHECK(r.policy == init);
}

TEST_CASE("one agent reduces to one CMDP solve") {
  Rng rng(70);
  CMDP m = testutil::random_cmdp(rng, 3, 3, 2);
  m.threshold = testutil::min_cost(m) + 0.2;
  const CMPG g = as_single_agent_game(m);
  const RunResult r = ca_cmpg_known(g, feasible_init_single_constraint(g));
  CHECK(r.trace.accepted_updates <= 1);
  CHECK(std::abs(evaluate(g, r.policy).reward_values[0] - *testutil::cmdp_optimum(m)) < 1e-8);
}

TEST_CASE("infeasible initial policies are rejected") {
  const CMPG g = duality_gap_example().to_cmpg();
  CHECK_THROWS_AS(ca_cmpg_known(g, {mixed(1.0), mixed(1.0)}), InfeasibleError);
}

TEST_CASE("grid world run is safe and terminates within the bound") {
  const CMPG g = build_grid_world();
  const RunResult r = ca_cmpg_known(g, feasible_init_single_constraint(g));
  CHECK(r.trace.converged);
  CHECK(r.trace.cycles.size() <= static_cast<std::size_t>(std::ceil(2.0 * 2 * 6 / 0.05)));
  for (const CycleRecord& c : r.trace.cycles) {
    CHECK(c.cost_values[0] <= 0.1 + 1e-8);
    for (double gap : c.gaps) CHECK(gap >= -1e-9);
  }
  const NashReport n = verify_nash(g, r.policy);
  CHECK(n.epsilon <= 0.05);
}

TEST_CASE("random cooperative battery") {
  Rng rng(71);
  const double eps = 0.02;
  for (int trial = 0; trial < 12; ++trial) {
    const int H = 1 + trial % 3;
    const CMPG g = feasible_cooperative(rng, 1 + trial % 4, H, 0.3);
    const RunResult r = ca_cmpg_known(g, feasible_init_single_constraint(g), {eps, {}, {}, false, 0});
    const int bound = static_cast<int>(std::ceil(2.0 * 2 * H / eps));
    CHECK(r.trace.accepted_updates <= bound);
    CHECK(r.trace.converged);
    double prev = -1.0;
    for (std::size_t t = 0; t < r.trace.cycles.size(); ++t) {
      const CycleRecord& c = r.trace.cycles[t];
      CHECK(c.cost_values[0] <= g.thresholds[0] + 1e-8);
      // Accepted updates raise the shared value by more than eps / 2.
      if (t > 0) CHECK(c.reward_values[0] > prev + eps / 2);
      prev = c.reward_values[0];
      // Selection is the lowest-index argmax of the gaps.
      const double top = *std::max_element(c.gaps.begin(), c.gaps.end());
      if (top > eps / 2) {
        const int first = static_cast<int>(std::find(c.gaps.begin(), c.gaps.end(), top) - c.gaps.begin());
        CHECK(c.selected == first);
      } else {
        CHECK(c.selected == -1);
      }
    }
    CHECK(verify_nash(g, r.policy).epsilon <= eps);
  }
}

TEST_CASE("parallel solves give the same run") {
  Rng rng(72);
  const CMPG g = feasible_cooperative(rng, 3, 2, 0.3);
  const JointPolicy init = feasible_init_single_constraint(g);
  KnownOptions seq;
  KnownOptions par;
  par.parallel = true;
  const RunResult a = ca_cmpg_known(g, init, seq);
  const RunResult b = ca_cmpg_known(g, init, par);
  CHECK(a.policy == b.policy);
  CHECK(a.trace.cycles.size() == b.trace.cycles.size());
}

TEST_CASE("min-cost initialization") {
  SUBCASE("gap example picks the first joint action") {
    const JointPolicy p = feasible_init_single_constraint(duality_gap_example().to_cmpg());
    CHECK(p[0](0, 0, 0) == 1.0);
    CHECK(p[1](0, 0, 0) == 1.0);
  }
  SUBCASE("zero cost gives all first actions") {
    Rng rng(73);
    CMPG g = testutil::random_game(rng, 2, 3, {2, 3}, 2, true);
    std::fill(g.costs[0].begin(), g.costs[0].end(), 0.0);
    const JointPolicy p = feasible_init_single_constraint(g);
    for (int h = 0; h < 2; ++h) {
      for (int s = 0; s < 3; ++s) {
        CHECK(p[0](h, s, 0) == 1.0);
        CHECK(p[1](h, s, 0) == 1.0);
      }
    }
  }
  SUBCASE("uniform rows where every joint action ties") {
    Rng rng(74);
    CMPG g = testutil::random_game(rng, 2, 2, {2, 2}, 2, true);
    std::fill(g.costs[0].begin(), g.costs[0].end(), 0.0);
    const JointPolicy p = feasible_init_single_constraint(g, InitTies::uniform_when_indifferent);
    CHECK(p[0](0, 0, 1) == 0.5);
  }
  SUBCASE("grid world gets a collision-free pair") {
    const CMPG g = build_grid_world();
    const JointPolicy p = feasible_init_single_constraint(g);
    CHECK(evaluate(g, p).cost_values[0] == 0.0);
    CHECK(p[0].is_deterministic());
    CHECK(p[1].is_deterministic());
  }
  SUBCASE("infeasible game") {
    CMPG g = duality_gap_example().to_cmpg();
    g.costs[0] = {0.5, 0.5, 0.5, 1.0};
    g.thresholds[0] = 0.4;
    CHECK_THROWS_AS(feasible_init_single_constraint(g), InfeasibleError);
  }
  SUBCASE("two constraints") {
    Rng rng(75);
    const CMPG g = testutil::random_game(rng, 2, 2, {2, 2}, 2, true, 2);
    CHECK_THROWS_AS(feasible_init_single_constraint(g), UnsupportedOperation);
  }
}

TEST_CASE("independent initialization") {
  // Agent with one state, two actions, H = 1 and local cost per action.
  auto component = [](double c0, double c1) {
    AgentComponent a;
    a.n_states = 1;
    a.n_actions = 2;
    a.transitions = TransitionTable(1, 1, 2);
    a.transitions.push_dense_row(std::vector<double>{1.0});
    a.transitions.push_dense_row(std::vector<double>{1.0});
    a.costs = {{c0, c1}};
    a.reward = {0.3, 0.8};
    a.initial_dist = {1.0};
    return a;
  };
  SUBCASE("additive composition") {
    FactoredGame f;
    f.horizon = 1;
    f.agents = {component(0.6, 0.2), component(0.1, 0.9)};
    f.thresholds = {0.5};
    const std::vector<AgentPolicy> local = feasible_init_independent(f);
    CHECK(local[0](0, 0, 1) == 1.0);
    CHECK(local[1](0, 0, 0) == 1.0);
    const CMPG g = compose_factored_cmpg(f);
    const JointPolicy lifted = lift_factored_policy(f, local);
    // Composite cost is divided by the number of agents.
    CHECK(evaluate(g, lifted).cost_values[0] * 2.0 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(g.thresholds[0] * 2.0 == doctest::Approx(0.5));
  }
  SUBCASE("zero local costs keep the first action") {
    FactoredGame f;
    f.horizon = 1;
    f.agents = {component(0.0, 0.0), component(0.0, 0.0)};
    f.thresholds = {0.0};
    const std::vector<AgentPolicy> local = feasible_init_independent(f);
    CHECK(local[0](0, 0, 0) == 1.0);
    CHECK(local[1](0, 0, 0) == 1.0);
  }
  SUBCASE("minimum sum above the threshold") {
    FactoredGame f;
    f.horizon = 1;
    f.agents = {component(0.6, 0.4), component(0.3, 0.9)};
    f.thresholds = {0.5};
    CHECK_THROWS_AS(feasible_init_independent(f), InfeasibleError);
  }
  SUBCASE("two constraints use the worst one") {
    FactoredGame f;
    f.horizon = 1;
    AgentComponent a = component(0.1, 0.5);
    a.costs.push_back({0.9, 0.5});
    AgentComponent b = component(0.0, 0.0);
    b.costs.push_back({0.0, 0.0});
    f.agents = {a, b};
    f.thresholds = {0.6, 0.6};
    const std::vector<AgentPolicy> local = feasible_init_independent(f);
    // max(0.1 p0 + 0.5 p1, 0.9 p0 + 0.5 p1) is smallest at p1 = 1.
    CHECK(local[0](0, 0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("Slater constant") {
  SUBCASE("gap example") {
    const SlaterEstimate z = slater_constant(duality_gap_example().to_cmpg());
    CHECK(z.exact);
    CHECK(z.value == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("zero cost gives alpha") {
    Rng rng(76);
    CMPG g = testutil::random_game(rng, 2, 2, {2, 2}, 2, true);
    std::fill(g.costs[0].begin(), g.costs[0].end(), 0.0);
    g.thresholds[0] = 0.7;
    const SlaterEstimate z = slater_constant(g, 8);
    CHECK_FALSE(z.exact);
    CHECK(z.value == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("unit cost at alpha = H gives zero") {
    Rng rng(77);
    CMPG g = testutil::random_game(rng, 2, 2, {2, 2}, 2, true);
    std::fill(g.costs[0].begin(), g.costs[0].end(), 1.0);
    g.thresholds[0] = 2.0;
    CHECK(std::abs(slater_constant(g, 8).value) < 1e-12);
  }
}

TEST_CASE("Nash verification") {
  const CMPG gap = duality_gap_example().to_cmpg();
  SUBCASE("first actions") {
    const NashReport n = verify_nash(gap, {mixed(0.0), mixed(0.0)});
    CHECK(std::abs(n.gaps[0]) < 1e-9);
    CHECK(std::abs(n.gaps[1]) < 1e-9);
  }
  SUBCASE("primal optimum") {
    const double q = std::sqrt(0.5);
    const NashReport n = verify_nash(gap, {mixed(q), mixed(q)});
    CHECK(std::abs(n.gaps[0]) < 1e-9);
    CHECK(std::abs(n.gaps[1]) < 1e-9);
  }
  SUBCASE("uniform pair of the zero-gap example") {
    const BimatrixCMPG bm = zero_gap_example();
    const NashReport n = verify_nash(bm.to_cmpg(), {mixed(0.5), mixed(0.5)});
    CHECK(n.gaps[0] * bm.scale == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(n.gaps[1] * bm.scale == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(n.epsilon * bm.scale == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("infeasible input") { CHECK_THROWS_AS(verify_nash(gap, {mixed(1.0), mixed(1.0)}), InfeasibleError); }
}

TEST_CASE("Monte Carlo estimation") {
  SUBCASE("deterministic policy on a deterministic game") {
    Rng rng(78);
    const CMPG g = deterministic_game(rng, 3, 3);
    const JointPolicy p = feasible_init_single_constraint(g);
    Rng ep(1);
    const ValueEstimate v = estimate_value_mc(g, p, 1, ep);
    const EvalResult exact = evaluate(g, p);
    CHECK(v.reward_values == exact.reward_values);
    CHECK(v.reward_values.size() == 2);
    CHECK(v.episodes == 1);
  }
  SUBCASE("Bernoulli reward") {
    CMPG g = duality_gap_example().to_cmpg();
    g.rewards = {{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}};
    finalize(g);
    const int hits = testutil::count_if_runs(100, [&](int seed) {
      Rng rng(300 + seed);
      const ValueEstimate v = estimate_value_mc(g, {mixed(0.5), mixed(0.0)}, 10000, rng);
      return std::abs(v.reward_values[0] - 0.5) <= 0.02;
    });
    CHECK(hits >= 99);
  }
  SUBCASE("same seed, same estimate") {
    Rng rng(79);
    const CMPG g = feasible_cooperative(rng, 3, 2, 0.3);
    const JointPolicy p = uniform_policy(g);
    Rng a(5);
    Rng b(5);
    CHECK(estimate_value_mc(g, p, 50, a).reward_values == estimate_value_mc(g, p, 50, b).reward_values);
  }
}

TEST_CASE("exploration with exact estimates follows the known-model run") {
  Rng rng(80);
  for (int trial = 0; trial < 5; ++trial) {
    const CMPG g = deterministic_game(rng, 3, 2);
    const JointPolicy init = feasible_init_single_constraint(g);
    const double eps = 0.2;
    ExploreConfig ec = ExploreConfig::make(eps, 0.1, 2, 2);
    ec.M = 1;
    ec.slater = 1.0;
    ec.generative.N = 1;
    ec.generative.T = 10;
    Rng run_rng(trial);
    const RunResult e = ca_cmpg_explore(g, init, ec, run_rng);
    KnownOptions ko;
    ko.epsilon = eps;
    ko.max_cycles = ec.T;
    ko.solver = primal_dual_solver(ec.solver_epsilon, 1.0, 10);
    const RunResult k = ca_cmpg_known(g, init, ko);
    REQUIRE(e.trace.cycles.size() == k.trace.cycles.size());
    for (std::size_t t = 0; t < e.trace.cycles.size(); ++t) {
      CHECK(e.trace.cycles[t].selected == k.trace.cycles[t].selected);
    }
    CHECK(e.policy == k.policy);
    // Every executed episode has H steps.
    CHECK(e.trace.env_steps == 2 * e.trace.episodes);
    CHECK(e.trace.generative_samples > 0);
  }
}

TEST_CASE("exploration configuration") {
  const ExploreConfig c = ExploreConfig::make(0.2, 0.1, 2, 1);
  CHECK(c.M == static_cast<std::uint64_t>(std::ceil(32.0 / 0.04 * std::log(32.0 * 4 / (0.02)))));
  CHECK(c.T == 40);
  CHECK(c.delta_prime == doctest::Approx(0.02 / 32.0));
  CHECK(c.solver_epsilon == doctest::Approx(0.05));
  CHECK_THROWS_AS(ExploreConfig::make(0.2, 1.0, 2, 1), ConfigError);
}

TEST_CASE("safe-stream solver picks from the supplied policies") {
  Rng rng(81);
  const CMPG g = feasible_cooperative(rng, 2, 2, 0.4);
  const JointPolicy init = feasible_init_single_constraint(g);
  SafePolicyStream stream = [&](const CMDP& m, Rng&) {
    std::vector<AgentPolicy> out{AgentPolicy::uniform(m.horizon, m.n_states, m.n_actions)};
    if (auto lp = solve_cmdp_lp(m)) out.push_back(lp->policy);
    return out;
  };
  ExploreConfig ec = ExploreConfig::make(0.2, 0.1, 2, 2);
  ec.M = 200;
  ec.T = 5;
  ec.solver = ExploreSolver::safe_stream;
  ec.stream = stream;
  ec.stream_M = 200;
  Rng run_rng(3);
  const RunResult r = ca_cmpg_explore(g, init, ec, run_rng);
  CHECK(r.trace.env_steps == 2 * r.trace.episodes);
  for (const CycleRecord& c : r.trace.cycles) CHECK(c.cost_values[0] <= g.thresholds[0] + 1e-8);
}

}  // TEST_SUITE
