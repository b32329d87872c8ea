#include "cmpg/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cmpg/ca_cmpg.hpp"
#include "cmpg/cmdp_solvers.hpp"
#include "cmpg/csv.hpp"
#include "cmpg/duality_lab.hpp"
#include "cmpg/errors.hpp"
#include "cmpg/evaluation.hpp"
#include "cmpg/log.hpp"
#include "cmpg/primal_dual.hpp"
#include "cmpg/serialization.hpp"

namespace cmpg {

using nlohmann::json;

namespace {

const std::vector<std::string> kEnvironments{"grid_world",          "congestion",       "bimatrix",
                                             "duality_gap_example", "zero_gap_example", "file"};
const std::vector<std::string> kAlgorithms{"duality_report", "ca_known", "ca_explore", "verify", "primal_dual"};
const std::vector<std::string> kSolvers{"lp", "primal_dual", "generative"};
const std::vector<std::string> kInits{"min_cost", "min_cost_uniform_ties", "uniform", "file"};

bool one_of(const std::string& v, const std::vector<std::string>& allowed) {
  return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read_opt(j, key, v);
  out = v;
}

GridCell read_cell(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<int>>();
  if (v.size() != 2) throw ConfigError(std::string("'") + key + "' must be [x, y]");
  return {v[0], v[1]};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

EnvironmentSpec parse_environment(const json& j, const std::filesystem::path& base) {
  EnvironmentSpec env;
  if (j.is_string()) {
    env.type = j.get<std::string>();
  } else if (j.is_object()) {
    read_opt(j, "type", env.type);
  } else {
    throw ConfigError("'environment' must be a name or an object");
  }
  if (!one_of(env.type, kEnvironments)) {
    throw ConfigError("unknown environment '" + env.type + "' (expected one of: " + joined(kEnvironments) + ")");
  }
  if (!j.is_object()) {
    if (env.type == "bimatrix" || env.type == "file") throw ConfigError("environment '" + env.type + "' needs parameters");
    return env;
  }
  try {
    if (env.type == "grid_world") {
      GridWorldConfig& g = env.grid;
      read_opt(j, "width", g.width);
      read_opt(j, "height", g.height);
      if (j.contains("start")) g.start = read_cell(j, "start");
      if (j.contains("target")) g.target = read_cell(j, "target");
      read_opt(j, "target_reward", g.target_reward);
      if (j.contains("bonus")) {
        g.bonus.clear();
        for (const json& b : j.at("bonus")) g.bonus.push_back({read_cell(b, "cell"), b.at("reward").get<double>()});
      }
      read_opt(j, "horizon", g.horizon);
      read_opt(j, "alpha", g.alpha);
      read_opt(j, "reward_scale", g.reward_scale);
      read_opt(j, "reward_on_stay", g.reward_on_stay);
      g.validate();
    } else if (env.type == "congestion") {
      CongestionConfig& c = env.congestion;
      read_opt(j, "n_agents", c.n_agents);
      read_opt(j, "w_safe", c.w_safe);
      read_opt(j, "w_unsafe", c.w_unsafe);
      read_opt(j, "offset", c.offset);
      read_opt(j, "horizon", c.horizon);
      read_opt(j, "alpha", c.alpha);
      read_opt(j, "mu_safe", c.mu_safe);
      read_opt(j, "reward_scale", c.reward_scale);
      c.validate();
    } else if (env.type == "bimatrix") {
      read_opt(j, "A", env.A);
      read_opt(j, "B", env.B);
      read_opt(j, "alpha", env.alpha);
    } else if (env.type == "file") {
      std::string p;
      read_opt(j, "path", p);
      if (p.empty()) throw ConfigError("file environment needs 'path'");
      env.file = resolve(base, p);
      if (!std::filesystem::exists(env.file)) throw ConfigError("game file not found: " + env.file.string());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad environment parameters: ") + e.what());
  }
  return env;
}

BimatrixCMPG bimatrix_of(const EnvironmentSpec& env) {
  if (env.type == "duality_gap_example") return duality_gap_example();
  if (env.type == "zero_gap_example") return zero_gap_example();
  if (env.type == "bimatrix") return BimatrixCMPG::make(env.A, env.B, env.alpha);
  throw ConfigError("duality_report needs a bimatrix environment, got '" + env.type + "'");
}

void write_csv(const std::filesystem::path& dir, const std::string& name, std::vector<std::string>& written,
               const std::function<void(std::ostream&)>& body) {
  std::ostringstream os;
  body(os);
  write_text_file(dir / name, os.str());
  written.push_back(name);
}

void write_json(const std::filesystem::path& dir, const std::string& name, std::vector<std::string>& written,
                const json& j) {
  write_text_file(dir / name, j.dump(2) + "\n");
  written.push_back(name);
}

double slater_for(const ExperimentConfig& cfg, const CMPG& game) {
  if (cfg.slater) return *cfg.slater;
  const SlaterEstimate est = slater_constant(game, 64, cfg.seed.value_or(0));
  log::info("slater constant ", est.value, est.exact ? " (exact)" : " (sampled upper bound)");
  if (est.value <= 0.0) throw ConfigError("game is not strictly feasible; set 'slater' explicitly");
  return est.value;
}

JointPolicy initial_policy(const ExperimentConfig& cfg, const CMPG& game) {
  JointPolicy init;
  if (cfg.init == "min_cost") {
    init = feasible_init_single_constraint(game, InitTies::lowest_index);
  } else if (cfg.init == "min_cost_uniform_ties") {
    init = feasible_init_single_constraint(game, InitTies::uniform_when_indifferent);
  } else if (cfg.init == "uniform") {
    init = uniform_policy(game);
  } else {
    init = policy_from_json(read_text_file(cfg.policy_file));
  }
  check_policy_dims(game, init);
  return init;
}

json values_json(const CMPG& game, const JointPolicy& pol) {
  const EvalResult ev = evaluate(game, pol);
  return {{"reward_values", ev.reward_values}, {"cost_values", ev.cost_values}, {"thresholds", game.thresholds}};
}

json nash_json(const NashReport& rep, double epsilon) {
  return {{"gaps", rep.gaps},
          {"best_values", rep.best_values},
          {"values", rep.values},
          {"max_gap", rep.epsilon},
          {"epsilon", epsilon},
          {"is_epsilon_nash", rep.epsilon <= epsilon}};
}

std::vector<std::string> run_duality(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const BimatrixCMPG g = bimatrix_of(cfg.environment);
  const DualityReport rep = duality_gap_report(g, cfg.lambda_max, cfg.trace_points, cfg.resolution);
  std::vector<std::string> written;
  write_csv(out, "dual_trace.csv", written, [&](std::ostream& os) { write_lambda_curve_csv(os, rep.trace); });
  write_text_file(out / "report.json", duality_report_to_json(rep, g) + "\n");
  written.push_back("report.json");
  log::info("P* = ", rep.primal.value, ", D* = ", rep.dual.value, ", gap = ", rep.gap);
  return written;
}

std::vector<std::string> write_run(const ExperimentConfig& cfg, const CMPG& game, const RunResult& run,
                                   const std::filesystem::path& out) {
  std::vector<std::string> written;
  const int n = game.n_agents;
  write_csv(out, "run_trace.csv", written, [&](std::ostream& os) { write_run_trace_csv(os, run.trace, n); });
  write_csv(out, "cost_curve.csv", written, [&](std::ostream& os) { write_cost_curve_csv(os, run.trace); });
  write_csv(out, "gap_curve.csv", written, [&](std::ostream& os) { write_gap_curve_csv(os, run.trace, n); });
  write_text_file(out / "policy.json", policy_to_json(run.policy) + "\n");
  written.push_back("policy.json");
  json rep;
  rep["algorithm"] = cfg.algorithm;
  rep["environment"] = cfg.environment.type;
  rep["epsilon"] = cfg.epsilon;
  rep["converged"] = run.trace.converged;
  rep["cycles"] = run.trace.cycles.size();
  rep["accepted_updates"] = run.trace.accepted_updates;
  rep["episodes"] = run.trace.episodes;
  rep["env_steps"] = run.trace.env_steps;
  rep["generative_samples"] = run.trace.generative_samples;
  rep["final"] = values_json(game, run.policy);
  rep["nash"] = nash_json(verify_nash(game, run.policy), cfg.epsilon);
  write_json(out, "report.json", written, rep);
  log::info("cycles = ", run.trace.cycles.size(), ", converged = ", run.trace.converged,
            ", max gap = ", rep["nash"]["max_gap"].get<double>());
  return written;
}

std::vector<std::string> run_known(const ExperimentConfig& cfg, const CMPG& game, const std::filesystem::path& out) {
  KnownOptions opt;
  opt.epsilon = cfg.epsilon;
  opt.max_cycles = cfg.T;
  opt.parallel = cfg.parallel;
  opt.seed = cfg.seed.value_or(0);
  if (cfg.solver == "lp") {
    opt.solver = lp_solver();
  } else if (cfg.solver == "primal_dual") {
    opt.solver = primal_dual_solver(cfg.epsilon / 4.0, slater_for(cfg, game), cfg.solver_T);
  } else {
    GenerativeOverrides ov;
    ov.N = cfg.generative_N;
    ov.T = cfg.solver_T;
    const double delta_prime = cfg.delta / (2.0 * game.n_agents * game.horizon);
    opt.solver = generative_solver(cfg.epsilon / 4.0, delta_prime, slater_for(cfg, game), ov);
  }
  const RunResult run = ca_cmpg_known(game, initial_policy(cfg, game), opt);
  return write_run(cfg, game, run, out);
}

std::vector<std::string> run_explore(const ExperimentConfig& cfg, const CMPG& game,
                                     const std::filesystem::path& out) {
  if (!cfg.seed) throw ConfigError("ca_explore requires a seed (config 'seed' or --seed)");
  if (cfg.solver != "generative") throw ConfigError("ca_explore supports solver 'generative' only");
  ExploreConfig ec = ExploreConfig::make(cfg.epsilon, cfg.delta, game.n_agents, game.horizon);
  if (cfg.M) ec.M = *cfg.M;
  if (cfg.T) ec.T = *cfg.T;
  ec.solver = ExploreSolver::generative;
  ec.slater = slater_for(cfg, game);
  ec.generative.N = cfg.generative_N;
  ec.generative.T = cfg.solver_T;
  ec.parallel = cfg.parallel;
  Rng rng(*cfg.seed);
  const RunResult run = ca_cmpg_explore(game, initial_policy(cfg, game), ec, rng);
  return write_run(cfg, game, run, out);
}

std::vector<std::string> run_verify(const ExperimentConfig& cfg, const CMPG& game, const std::filesystem::path& out) {
  if (cfg.policy_file.empty()) throw ConfigError("verify needs 'policy'");
  const JointPolicy pol = policy_from_json(read_text_file(cfg.policy_file));
  check_policy_dims(game, pol);
  const NashReport rep = verify_nash(game, pol);
  std::vector<std::string> written;
  json j;
  j["algorithm"] = "verify";
  j["environment"] = cfg.environment.type;
  j["final"] = values_json(game, pol);
  j["nash"] = nash_json(rep, cfg.epsilon);
  write_json(out, "report.json", written, j);
  log::info("max gap = ", rep.epsilon);
  return written;
}

std::vector<std::string> run_primal_dual(const ExperimentConfig& cfg, const CMPG& game,
                                         const std::filesystem::path& out) {
  if (game.n_agents != 1) throw ConfigError("primal_dual needs a single-agent environment");
  CMDP model = from_single_agent_game(game);
  double zeta = 0.0;
  if (cfg.slater) {
    zeta = *cfg.slater;
  } else {
    std::vector<double> neg(model.cost.size());
    std::transform(model.cost.begin(), model.cost.end(), neg.begin(), [](double c) { return -c; });
    zeta = model.threshold + solve_mdp(model, neg).value;
  }
  PrimalDualConfig pd = PrimalDualConfig::make(cfg.epsilon, cfg.delta, zeta, model.horizon, model.n_states,
                                               model.n_actions, model.threshold);
  if (cfg.solver_T) pd.override_T(*cfg.solver_T);
  model.threshold = pd.alpha_prime;
  const PrimalDualResult res = primal_dual_solve(model, pd);
  std::vector<std::string> written;
  write_csv(out, "lagrangian_trace.csv", written, [&](std::ostream& os) { write_dual_trace_csv(os, res.trace); });
  write_text_file(out / "policy.json", policy_to_json({res.policy}) + "\n");
  written.push_back("policy.json");
  json j;
  j["algorithm"] = "primal_dual";
  j["slater"] = zeta;
  j["T"] = pd.T;
  j["eta"] = pd.eta;
  j["alpha_prime"] = pd.alpha_prime;
  j["eps_opt"] = pd.eps_opt;
  j["reward_value"] = res.reward_value;
  j["cost_value"] = res.cost_value;
  j["final_lambda"] = res.final_lambda;
  j["trace_complete"] = res.trace_complete;
  write_json(out, "report.json", written, j);
  return written;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  if (!j.contains("environment")) throw ConfigError("config needs 'environment'");
  cfg.environment = parse_environment(j.at("environment"), base);
  read_opt(j, "algorithm", cfg.algorithm);
  if (!one_of(cfg.algorithm, kAlgorithms)) {
    throw ConfigError("unknown algorithm '" + cfg.algorithm + "' (expected one of: " + joined(kAlgorithms) + ")");
  }
  read_opt(j, "epsilon", cfg.epsilon);
  read_opt(j, "delta", cfg.delta);
  read_opt(j, "M", cfg.M);
  read_opt(j, "T", cfg.T);
  read_opt(j, "seed", cfg.seed);
  read_opt(j, "solver", cfg.solver);
  read_opt(j, "init", cfg.init);
  std::string policy;
  read_opt(j, "policy", policy);
  if (!policy.empty()) cfg.policy_file = resolve(base, policy);
  read_opt(j, "slater", cfg.slater);
  read_opt(j, "generative_N", cfg.generative_N);
  read_opt(j, "solver_T", cfg.solver_T);
  read_opt(j, "lambda_max", cfg.lambda_max);
  read_opt(j, "trace_points", cfg.trace_points);
  read_opt(j, "resolution", cfg.resolution);
  read_opt(j, "parallel", cfg.parallel);
  std::string out;
  read_opt(j, "out", out);
  if (!out.empty()) cfg.out_dir = resolve(base, out);

  if (!(cfg.epsilon > 0.0)) throw ConfigError("'epsilon' must be positive");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("'delta' must lie in (0, 1)");
  if (cfg.M && *cfg.M == 0) throw ConfigError("'M' must be positive");
  if (cfg.T && *cfg.T <= 0) throw ConfigError("'T' must be positive");
  if (!one_of(cfg.solver, kSolvers)) throw ConfigError("unknown solver '" + cfg.solver + "'");
  if (!one_of(cfg.init, kInits)) throw ConfigError("unknown init '" + cfg.init + "'");
  if (cfg.slater && !(*cfg.slater > 0.0)) throw ConfigError("'slater' must be positive");
  if (cfg.trace_points < 2) throw ConfigError("'trace_points' must be at least 2");
  if (cfg.resolution < 2) throw ConfigError("'resolution' must be at least 2");
  if (cfg.lambda_max && !(*cfg.lambda_max > 0.0)) throw ConfigError("'lambda_max' must be positive");
  if ((cfg.init == "file" || cfg.algorithm == "verify") && cfg.policy_file.empty()) {
    throw ConfigError("'policy' file is required for init 'file' and algorithm 'verify'");
  }
  if (!cfg.policy_file.empty() && !std::filesystem::exists(cfg.policy_file)) {
    throw ConfigError("policy file not found: " + cfg.policy_file.string());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path), path.parent_path());
}

CMPG build_environment(const EnvironmentSpec& spec) {
  if (spec.type == "grid_world") return build_grid_world(spec.grid);
  if (spec.type == "congestion") return build_congestion_game(spec.congestion);
  if (spec.type == "file") return game_from_json(read_text_file(spec.file));
  return bimatrix_of(spec).to_cmpg();
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  log::info("algorithm ", cfg.algorithm, " on ", cfg.environment.type, ", output in ", cfg.out_dir.string());
  if (cfg.algorithm == "duality_report") return run_duality(cfg, cfg.out_dir);
  const CMPG game = build_environment(cfg.environment);
  if (cfg.algorithm == "ca_known") return run_known(cfg, game, cfg.out_dir);
  if (cfg.algorithm == "ca_explore") return run_explore(cfg, game, cfg.out_dir);
  if (cfg.algorithm == "verify") return run_verify(cfg, game, cfg.out_dir);
  return run_primal_dual(cfg, game, cfg.out_dir);
}

int run_experiment_file(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out,
                        const std::optional<std::uint64_t>& seed, std::ostream& err) {
  try {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (out) cfg.out_dir = *out;
    if (seed) cfg.seed = *seed;
    run_experiment(cfg);
    return 0;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "file error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cmpg
