#include "cmpg/primal_dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cmpg/cmdp_solvers.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/log.hpp"

namespace cmpg {

PrimalDualConfig PrimalDualConfig::make(double epsilon_prime, double delta_prime, double zeta, int horizon,
                                        int states, int actions, double alpha) {
  if (horizon < 1 || states < 1 || actions < 1) throw ConfigError("model dimensions must be positive");
  if (!(zeta > 0.0)) throw ConfigError("Slater constant must be positive");
  if (!(epsilon_prime > 0.0) || epsilon_prime > horizon) throw ConfigError("epsilon' must lie in (0, H]");
  if (!(delta_prime > 0.0) || !(delta_prime < 1.0)) throw ConfigError("delta' must lie in (0, 1)");
  PrimalDualConfig cfg;
  const double H = horizon;
  cfg.epsilon_prime = epsilon_prime;
  cfg.delta_prime = delta_prime;
  cfg.slater = zeta;
  cfg.horizon = horizon;
  cfg.alpha = alpha;
  cfg.Delta = epsilon_prime * zeta / (16.0 * H);
  cfg.eps_opt = cfg.Delta / 5.0;
  cfg.U = 8.0 * H / zeta;
  cfg.alpha_prime = alpha - cfg.Delta;
  if (cfg.alpha_prime < 0.0) throw ConfigError("alpha - Delta is negative; zeta is inconsistent with alpha");
  cfg.T_exact = cfg.U * cfg.U * H * H / (cfg.eps_opt * cfg.eps_opt) * (1.0 + 16.0 / (9.0 * cfg.U * cfg.U));
  if (!(cfg.T_exact < 0x1.0p62)) throw ConfigError("iteration count T overflows");
  cfg.T = static_cast<std::uint64_t>(std::ceil(cfg.T_exact));
  cfg.eta = cfg.U / (std::sqrt(static_cast<double>(cfg.T)) * H);
  // Concentration target 4 Delta / 5 at confidence delta' / 5.
  const double eps_c = 0.8 * cfg.Delta;
  const double delta_c = delta_prime / 5.0;
  const double S = states;
  cfg.N_exact = std::log(2.0 * S * S * actions * H / delta_c) * std::pow(H, 4) / (eps_c * eps_c);
  cfg.N = cfg.N_exact < 0x1.0p63 ? static_cast<std::uint64_t>(std::ceil(cfg.N_exact))
                                 : std::numeric_limits<std::uint64_t>::max();
  if (!(cfg.Delta < zeta / 2.0) || !(cfg.eps_opt < cfg.Delta) || !(cfg.U > 2.0 * H / zeta)) {
    throw ConfigError("primal-dual parameter invariants violated");
  }
  return cfg;
}

void PrimalDualConfig::override_T(std::uint64_t t) {
  if (t < 1) throw ConfigError("T must be at least 1");
  if (t > (1ULL << 62)) throw ConfigError("T too large");
  T = t;
  eta = U / (std::sqrt(static_cast<double>(T)) * horizon);
}

void PrimalDualConfig::override_N(std::uint64_t n) {
  if (n < 1) throw ConfigError("N must be at least 1");
  N = n;
}

namespace {

struct Candidate {
  std::vector<int> actions;  // by (h, s) row
  AgentPolicy policy;
  double v_r = 0.0;
  double v_c = 0.0;
  double lo = 0.0;  // optimality interval in lambda
  double hi = 0.0;
  std::uint64_t count = 0;
  std::uint64_t first_play = std::numeric_limits<std::uint64_t>::max();
};

class Engine {
 public:
  Engine(const CMDP& model, const PrimalDualConfig& cfg, const PrimalDualOptions& options)
      : model_(model), cfg_(cfg), options_(options), alpha_prime_(model.threshold) {
    stage_.resize(model.stage_size());
    result_.T = cfg.T;
    result_.trace_complete = cfg.T <= options.full_trace_limit;
  }

  PrimalDualResult run() {
    switch (options_.stepping) {
      case DualStepping::literal: run_stepwise(/*literal=*/true); break;
      case DualStepping::stepwise: run_stepwise(/*literal=*/false); break;
      case DualStepping::accelerated: run_accelerated(); break;
    }
    return finish();
  }

 private:
  // Backward induction at lambda; returns the (possibly new) candidate id.
  int solve_at(double lambda, bool with_interval) {
    for (std::size_t k = 0; k < stage_.size(); ++k) stage_[k] = model_.reward[k] - lambda * model_.cost[k];
    MdpSolution sol = solve_mdp(model_, stage_);
    ++result_.mdp_solves;
    const int S = model_.n_states;
    std::vector<int> acts(static_cast<std::size_t>(model_.horizon) * S);
    for (int h = 0; h < model_.horizon; ++h) {
      for (int s = 0; s < S; ++s) {
        const auto row = sol.policy.row(h, s);
        acts[static_cast<std::size_t>(h) * S + s] =
            static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
      }
    }
    auto found = by_actions_.find(acts);
    if (found != by_actions_.end()) return found->second;
    Candidate c;
    c.actions = acts;
    c.policy = std::move(sol.policy);
    const CmdpValues v = evaluate(model_, c.policy);
    c.v_r = v.reward;
    c.v_c = v.cost;
    c.lo = lambda;
    c.hi = lambda;
    if (with_interval) optimality_interval(c, lambda);
    const int id = static_cast<int>(cands_.size());
    cands_.push_back(std::move(c));
    by_actions_.emplace(std::move(acts), id);
    return id;
  }

  // Range of lambda on which the candidate is greedy with respect to its own
  // Q-values at every (h, s): Qr_b - Qr_a - lambda (Qc_b - Qc_a) >= 0.
  void optimality_interval(Candidate& c, double lambda0) {
    const int S = model_.n_states;
    const int A = model_.n_actions;
    const int H = model_.horizon;
    const auto vr = state_values(model_, c.policy, model_.reward);
    const auto vc = state_values(model_, c.policy, model_.cost);
    double lo = 0.0;
    double hi = cfg_.U;
    std::vector<double> qr(A), qc(A);
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          const std::size_t i = model_.index(h, s, a);
          double r = model_.reward[i];
          double cc = model_.cost[i];
          if (h + 1 < H) {
            for (const Successor& e : model_.transitions.row(h, s, a)) {
              r += e.prob * vr[static_cast<std::size_t>(h + 1) * S + e.state];
              cc += e.prob * vc[static_cast<std::size_t>(h + 1) * S + e.state];
            }
          }
          qr[a] = r;
          qc[a] = cc;
        }
        const int b = c.actions[static_cast<std::size_t>(h) * S + s];
        for (int a = 0; a < A; ++a) {
          if (a == b) continue;
          const double da = qr[b] - qr[a];
          const double db = qc[b] - qc[a];
          if (db > 0.0) hi = std::min(hi, da / db);
          else if (db < 0.0) lo = std::max(lo, da / db);
        }
      }
    }
    c.lo = std::min(std::max(lo, 0.0), lambda0);
    c.hi = std::max(std::min(hi, cfg_.U), lambda0);
  }

  // Piece holding lambda, or -1. A piece owns [lo, hi] up to the next lo.
  int find_piece(double lambda) const {
    auto it = pieces_.upper_bound(lambda);
    if (it == pieces_.begin()) return -1;
    --it;
    return lambda <= cands_[it->second].hi ? it->second : -1;
  }

  int lookup(double lambda) {
    const int hit = find_piece(lambda);
    if (hit >= 0) return hit;
    const std::size_t before = cands_.size();
    const int id = solve_at(lambda, true);
    Candidate& c = cands_[id];
    if (static_cast<std::size_t>(id) < before) {
      // Known policy just outside its computed interval (round-off): widen.
      pieces_.erase(c.lo);
      c.lo = std::min(c.lo, lambda);
      c.hi = std::max(c.hi, lambda);
      pieces_[c.lo] = id;
      return id;
    }
    auto next = pieces_.upper_bound(lambda);
    if (next != pieces_.begin()) {
      const Candidate& prev = cands_[std::prev(next)->second];
      c.lo = std::max(c.lo, prev.hi);
      c.lo = std::min(c.lo, lambda);
    }
    if (next != pieces_.end()) c.hi = std::min(c.hi, next->first);
    c.hi = std::max(c.hi, lambda);
    pieces_[c.lo] = id;  // replaces a degenerate point piece with the same key
    return id;
  }

  void play(int id, std::uint64_t k, long double lambda, long double delta) {
    Candidate& c = cands_[id];
    if (c.count == 0) c.first_play = t_;
    c.count += k;
    const long double g = alpha_prime_ - c.v_c;
    const long double kk = static_cast<long double>(k);
    result_.sum_g += kk * g;
    result_.sum_lambda_g += g * (kk * lambda + delta * kk * (kk - 1.0L) / 2.0L);
    if (result_.trace_complete) {
      for (std::uint64_t j = 0; j < k; ++j) {
        trace(t_ + j, static_cast<double>(lambda + delta * static_cast<long double>(j)), c);
      }
    } else {
      trace(t_, static_cast<double>(lambda), c);
    }
    const double last = static_cast<double>(lambda + delta * (kk - 1.0L));
    result_.lambda_max_bound = std::max({result_.lambda_max_bound, static_cast<double>(lambda), last});
    t_ += k;
  }

  void trace(std::uint64_t t, double lambda, const Candidate& c) {
    result_.trace.push_back({t, lambda, c.v_r, c.v_c});
  }

  double project(long double lambda) const {
    return static_cast<double>(std::clamp<long double>(lambda, 0.0L, cfg_.U));
  }

  void run_stepwise(bool literal) {
    double lambda = 0.0;
    while (t_ < cfg_.T) {
      const int id = literal ? solve_at(lambda, false) : lookup(lambda);
      const double g = alpha_prime_ - cands_[id].v_c;
      play(id, 1, lambda, 0.0L);
      lambda = project(static_cast<long double>(lambda) - cfg_.eta * g);
    }
    result_.final_lambda = lambda;
  }

  void run_accelerated() {
    const long double eta = cfg_.eta;
    const long double U = cfg_.U;
    long double lambda = 0.0L;
    std::uint64_t loops = 0;
    while (t_ < cfg_.T) {
      if (++loops > 50'000'000ULL) {
        throw SolverError("primal-dual: oscillation spans more than two best responses; use a smaller T");
      }
      const std::uint64_t rem = cfg_.T - t_;
      const int id = lookup(static_cast<double>(lambda));
      const Candidate& c = cands_[id];
      const long double g = alpha_prime_ - c.v_c;
      if (g == 0.0L || (lambda >= U && g < 0.0L) || (lambda <= 0.0L && g > 0.0L)) {
        play(id, rem, lambda, 0.0L);  // fixed point of the projected update
        break;
      }
      if (try_rotation(lambda, id)) break;
      const long double delta = -eta * g;
      // Steps j = 0..k-1 at lambda + j delta that stay inside this piece.
      auto it = pieces_.find(c.lo);
      long double span;
      bool strict = false;
      if (delta > 0.0L) {
        long double bound = c.hi;
        auto next = std::next(it);
        if (next != pieces_.end() && next->first <= c.hi) {
          bound = next->first;
          strict = true;
        }
        span = (bound - lambda) / delta;
      } else {
        span = (lambda - static_cast<long double>(c.lo)) / -delta;
      }
      span = std::max(span, 0.0L);
      long double kf = std::floor(span);
      std::uint64_t k;
      if (kf >= static_cast<long double>(rem)) {
        k = rem;
      } else {
        k = static_cast<std::uint64_t>(kf) + 1;
        if (strict && kf == span && k > 1) --k;
      }
      while (k > 1 && find_piece(static_cast<double>(lambda + delta * static_cast<long double>(k - 1))) != id) --k;
      // Steps whose result stays inside [0, U].
      const long double room = delta > 0.0L ? (U - lambda) / delta : lambda / -delta;
      const long double free_f = std::floor(room);
      if (free_f < static_cast<long double>(k)) {
        const std::uint64_t free = static_cast<std::uint64_t>(std::max(free_f, 0.0L));
        if (free > 0) {
          play(id, free, lambda, delta);
          lambda += delta * static_cast<long double>(free);
        }
        if (t_ < cfg_.T) {
          play(id, 1, lambda, 0.0L);
          lambda = delta > 0.0L ? U : 0.0L;
        }
        continue;
      }
      play(id, k, lambda, delta);
      lambda += delta * static_cast<long double>(k);
    }
    result_.final_lambda = static_cast<double>(lambda);
  }

  // Two adjacent best responses L (cost above alpha') and R (below) meeting at
  // lambda*: once lambda sits in [lambda* - q, lambda* + p) with p = eta |g_L|,
  // q = eta g_R it never leaves, and the iteration is a rotation by p on a
  // circle of length p + q. The remaining steps are then resolved exactly.
  bool try_rotation(long double& lambda, int id) {
    auto it = pieces_.find(cands_[id].lo);
    const double g_here = alpha_prime_ - cands_[id].v_c;
    std::map<double, int>::iterator lo_it, up_it;
    if (g_here < 0.0) {
      lo_it = it;
      up_it = std::next(it);
      if (up_it == pieces_.end()) return false;
    } else {
      if (it == pieces_.begin()) return false;
      up_it = it;
      lo_it = std::prev(it);
    }
    const Candidate& L = cands_[lo_it->second];
    const Candidate& R = cands_[up_it->second];
    const long double gl = alpha_prime_ - L.v_c;
    const long double gr = alpha_prime_ - R.v_c;
    if (!(gl < 0.0L && gr > 0.0L)) return false;
    const long double star = up_it->first;
    if (static_cast<long double>(L.hi) < star) return false;  // gap between pieces
    const long double eta = cfg_.eta;
    const long double p = eta * -gl;
    const long double q = eta * gr;
    const long double left = star - q;
    const long double right = star + p;
    if (left < static_cast<long double>(L.lo) || left < 0.0L) return false;
    if (right > static_cast<long double>(R.hi) || right > static_cast<long double>(cfg_.U)) return false;
    auto after = std::next(up_it);
    if (after != pieces_.end() && static_cast<long double>(after->first) < right) return false;
    if (lambda < left || lambda >= right) return false;

    const std::uint64_t n = cfg_.T - t_;
    const long double len = p + q;
    const long double y0 = lambda - left;
    const long double travel = y0 + static_cast<long double>(n) * p;
    long double n_up_f = std::floor(travel / len);
    n_up_f = std::clamp(n_up_f, 0.0L, static_cast<long double>(n));
    const std::uint64_t n_up = static_cast<std::uint64_t>(n_up_f);
    const std::uint64_t n_lo = n - n_up;
    long double y_end = travel - n_up_f * len;
    y_end = std::clamp(y_end, 0.0L, std::nextafter(len, 0.0L));
    const long double lambda_end = left + y_end;

    const int lo_id = lo_it->second;
    const int up_id = up_it->second;
    if (result_.trace_complete) {
      long double y = y0;
      for (std::uint64_t j = 0; j < n; ++j) {
        const bool lower = y < q;
        trace(t_ + j, static_cast<double>(left + y), cands_[lower ? lo_id : up_id]);
        y = lower ? y + p : y - q;
      }
    } else {
      trace(t_, static_cast<double>(lambda), cands_[id]);
    }
    for (int which : {lo_id, up_id}) {
      Candidate& c = cands_[which];
      const std::uint64_t k = which == lo_id ? n_lo : n_up;
      if (k > 0 && c.count == 0) c.first_play = t_ + (which == id ? 0 : 1);
      c.count += k;
    }
    const long double nl = static_cast<long double>(n_lo);
    const long double nu = static_cast<long double>(n_up);
    result_.sum_g += nl * gl + nu * gr;
    result_.sum_lambda_g +=
        (lambda * lambda - lambda_end * lambda_end + eta * eta * (nl * gl * gl + nu * gr * gr)) / (2.0L * eta);
    result_.lambda_max_bound = std::max(result_.lambda_max_bound, static_cast<double>(right));
    result_.closed_form_steps += n;
    t_ = cfg_.T;
    lambda = lambda_end;
    return true;
  }

  PrimalDualResult finish() {
    std::vector<int> played;
    for (int id = 0; id < static_cast<int>(cands_.size()); ++id) {
      if (cands_[id].count > 0) played.push_back(id);
    }
    std::sort(played.begin(), played.end(),
              [&](int a, int b) { return cands_[a].first_play < cands_[b].first_play; });
    std::vector<OccupancyMeasure> occs;
    std::vector<double> weights;
    const long double total = static_cast<long double>(cfg_.T);
    for (int id : played) {
      Candidate& c = cands_[id];
      occs.push_back(occupancy_from_policy(model_, c.policy));
      weights.push_back(static_cast<double>(static_cast<long double>(c.count) / total));
      result_.iterates.push_back({c.policy, c.v_r, c.v_c, c.count});
    }
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (double& w : weights) w /= wsum;  // absorb rounding of count / T
    result_.occupancy = mix_occupancies(occs, weights);
    result_.policy = policy_from_occupancy(result_.occupancy);
    const CmdpValues v = evaluate(model_, result_.policy);
    result_.reward_value = v.reward;
    result_.cost_value = v.cost;
    return std::move(result_);
  }

  const CMDP& model_;
  const PrimalDualConfig& cfg_;
  PrimalDualOptions options_;
  double alpha_prime_;
  std::vector<double> stage_;
  std::vector<Candidate> cands_;
  std::map<std::vector<int>, int> by_actions_;
  std::map<double, int> pieces_;  // interval lo -> candidate
  std::uint64_t t_ = 0;
  PrimalDualResult result_;
};

}  // namespace

PrimalDualResult primal_dual_solve(const CMDP& model, const PrimalDualConfig& cfg, const PrimalDualOptions& options) {
  model.validate();
  if (cfg.T < 1 || !(cfg.eta > 0.0) || !(cfg.U > 0.0)) throw ConfigError("primal-dual config not initialized");
  if (std::abs(model.threshold - cfg.alpha_prime) > 1e-12) {
    throw ConfigError("model threshold must equal the configured alpha'");
  }
  Engine engine(model, cfg, options);
  return engine.run();
}

GenerativeSolve solve_cmdp_generative(GenerativeModel& gen, double alpha, double zeta, double epsilon_prime,
                                      double delta_prime, const GenerativeOverrides& overrides, Rng& rng,
                                      const PrimalDualOptions& options) {
  const CMDP& known = gen.known();
  GenerativeSolve out;
  out.config = PrimalDualConfig::make(epsilon_prime, delta_prime, zeta, known.horizon, known.n_states,
                                      known.n_actions, alpha);
  if (overrides.N) out.config.override_N(*overrides.N);
  if (overrides.T) out.config.override_T(*overrides.T);
  const long double pairs = static_cast<long double>(known.stage_size());
  if (static_cast<long double>(out.config.N) * pairs > static_cast<long double>(overrides.sample_budget)) {
    throw ConfigError("sample count N * |S| * |A| * H exceeds the budget; pass an N override");
  }
  const std::uint64_t before = gen.total_draws();
  out.empirical = build_empirical_cmdp(gen, out.config.N, out.config.alpha_prime, rng);
  out.samples = gen.total_draws() - before;
  log::debug("generative solve: N=", out.config.N, " T=", out.config.T, " samples=", out.samples);
  PrimalDualResult pd = primal_dual_solve(out.empirical, out.config, options);
  out.policy = std::move(pd.policy);
  out.empirical_reward = pd.reward_value;
  out.empirical_cost = pd.cost_value;
  return out;
}

}  // namespace cmpg
