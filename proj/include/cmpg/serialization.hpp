#pragma once

#include <filesystem>
#include <string>

#include "cmpg/cmdp.hpp"
#include "cmpg/duality_lab.hpp"
#include "cmpg/game.hpp"
#include "cmpg/policy.hpp"

namespace cmpg {

// Game schema:
// {"name", "n_agents", "states", "actions_per_agent", "horizon",
//  "transitions": [[[next, prob], ...] per (h, s, a) row],
//  "rewards": [[...] per agent], "costs": [[...] per constraint],
//  "thresholds", "initial_dist", "count_symmetric"}
// Stage tables are flat in (h, s, joint action) order. Parse failures and
// schema violations throw ConfigError; model violations throw ModelError.
std::string game_to_json(const CMPG& game, int indent = -1);
CMPG game_from_json(const std::string& text);

// Same schema with n_agents = 1 and a single cost.
std::string cmdp_to_json(const CMDP& model, int indent = -1);
CMDP cmdp_from_json(const std::string& text);

// {"agents": [{"horizon", "states", "actions", "probs": [...]}, ...]}
std::string policy_to_json(const JointPolicy& policy, int indent = -1);
JointPolicy policy_from_json(const std::string& text);

std::string duality_report_to_json(const DualityReport& report, const BimatrixCMPG& game, int indent = 2);

std::string read_text_file(const std::filesystem::path& path);   // throws ConfigError
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cmpg
