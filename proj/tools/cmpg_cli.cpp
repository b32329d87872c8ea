#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cmpg/errors.hpp"
#include "cmpg/experiment.hpp"
#include "cmpg/log.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Constrained Markov potential game toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::string level = "info";
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "experiment JSON")->required();
  CLI::Option* out_opt = run->add_option("--out", out, "output directory (overrides config)");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "RNG seed (overrides config)");
  run->add_option("--log-level", level, "debug, info, warn, error or off");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cmpg::log::set_level(cmpg::log::parse_level(level));
  } catch (const cmpg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  std::optional<std::filesystem::path> out_dir;
  if (*out_opt) out_dir = out;
  std::optional<std::uint64_t> seed_override;
  if (*seed_opt) seed_override = seed;
  return cmpg::run_experiment_file(config, out_dir, seed_override, std::cerr);
}
