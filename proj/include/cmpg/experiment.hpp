#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmpg/environments.hpp"
#include "cmpg/game.hpp"

namespace cmpg {

struct EnvironmentSpec {
  // grid_world | congestion | bimatrix | duality_gap_example | zero_gap_example | file
  std::string type;
  GridWorldConfig grid;
  CongestionConfig congestion;
  std::vector<std::vector<double>> A;
  std::vector<std::vector<double>> B;
  double alpha = 0.0;
  std::filesystem::path file;  // game JSON
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  std::string algorithm;  // duality_report | ca_known | ca_explore | verify | primal_dual
  double epsilon = 0.05;
  double delta = 0.1;
  std::optional<std::uint64_t> M;  // ca_explore episodes per estimate
  std::optional<int> T;            // cycle budget
  std::optional<std::uint64_t> seed;
  std::string solver = "lp";       // lp | primal_dual | generative
  std::string init = "min_cost";   // min_cost | min_cost_uniform_ties | uniform | file
  std::filesystem::path policy_file;
  std::optional<double> slater;    // estimated from the game when absent
  std::optional<std::uint64_t> generative_N;
  std::optional<std::uint64_t> solver_T;  // primal-dual iterations
  std::optional<double> lambda_max;
  int trace_points = 1000;
  int resolution = 1000;
  bool parallel = false;
  std::filesystem::path out_dir = "out";
};

// Relative paths resolve against base_dir. Throws ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

CMPG build_environment(const EnvironmentSpec& spec);

// Runs the configured pipeline and writes its artifacts into cfg.out_dir.
// Returns the written file names. Errors propagate as exceptions.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

// Exit status: 0 success, 2 infeasible model or policy, 1 anything else.
// Diagnostics go to err.
int run_experiment_file(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out,
                        const std::optional<std::uint64_t>& seed, std::ostream& err);

}  // namespace cmpg
