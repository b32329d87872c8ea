#include "cmpg/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmpg/errors.hpp"

namespace cmpg {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json transitions_json(const TransitionTable& t) {
  json rows = json::array();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    json row = json::array();
    for (const Successor& e : t.row(r)) row.push_back(json::array({e.state, e.prob}));
    rows.push_back(std::move(row));
  }
  return rows;
}

TransitionTable transitions_from(const json& rows, int horizon, int states, int actions) {
  if (!rows.is_array()) throw ConfigError("'transitions' must be an array of rows");
  TransitionTable t(horizon, states, actions);
  if (rows.size() != t.rows()) {
    throw ConfigError("'transitions' has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(t.rows()));
  }
  std::vector<Successor> row;
  for (const json& r : rows) {
    row.clear();
    if (!r.is_array()) throw ConfigError("transition row must be an array");
    for (const json& e : r) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("transition entry must be [next, prob]");
      const int next = e[0].get<int>();
      if (next < 0 || next >= states) throw ConfigError("transition target out of range");
      row.push_back({next, e[1].get<double>()});
    }
    t.push_row(row);
  }
  return t;
}

}  // namespace

std::string game_to_json(const CMPG& game, int indent) {
  json j;
  j["name"] = game.name;
  j["n_agents"] = game.n_agents;
  j["states"] = game.n_states;
  j["actions_per_agent"] = game.actions_per_agent;
  j["horizon"] = game.horizon;
  j["transitions"] = transitions_json(game.transitions);
  j["rewards"] = game.rewards;
  j["costs"] = game.costs;
  j["thresholds"] = game.thresholds;
  j["initial_dist"] = game.initial_dist;
  j["count_symmetric"] = game.count_symmetric;
  return j.dump(indent);
}

CMPG game_from_json(const std::string& text) {
  const json j = parse(text);
  CMPG g;
  g.name = j.value("name", std::string());
  g.n_agents = get<int>(j, "n_agents");
  g.n_states = get<int>(j, "states");
  g.horizon = get<int>(j, "horizon");
  g.actions_per_agent = get<std::vector<int>>(j, "actions_per_agent");
  if (g.n_agents < 1 || g.n_states < 1 || g.horizon < 1) throw ConfigError("game dimensions must be positive");
  if (static_cast<int>(g.actions_per_agent.size()) != g.n_agents) throw ConfigError("actions_per_agent length != n_agents");
  for (int a : g.actions_per_agent) {
    if (a < 1) throw ConfigError("every agent needs at least one action");
  }
  g.transitions = transitions_from(j.at("transitions"), g.horizon, g.n_states, g.joint_actions());
  g.rewards = get<std::vector<std::vector<double>>>(j, "rewards");
  g.costs = get<std::vector<std::vector<double>>>(j, "costs");
  g.thresholds = get<std::vector<double>>(j, "thresholds");
  g.initial_dist = get<std::vector<double>>(j, "initial_dist");
  g.count_symmetric = j.value("count_symmetric", false);
  finalize(g);
  return g;
}

std::string cmdp_to_json(const CMDP& model, int indent) { return game_to_json(as_single_agent_game(model), indent); }

CMDP cmdp_from_json(const std::string& text) { return from_single_agent_game(game_from_json(text)); }

std::string policy_to_json(const JointPolicy& policy, int indent) {
  json agents = json::array();
  for (const AgentPolicy& pi : policy) {
    agents.push_back({{"horizon", pi.horizon()}, {"states", pi.states()}, {"actions", pi.actions()}, {"probs", pi.data()}});
  }
  return json{{"agents", agents}}.dump(indent);
}

JointPolicy policy_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.contains("agents") || !j["agents"].is_array()) throw ConfigError("policy JSON needs an 'agents' array");
  JointPolicy out;
  for (const json& a : j["agents"]) {
    AgentPolicy pi(get<int>(a, "horizon"), get<int>(a, "states"), get<int>(a, "actions"));
    const auto probs = get<std::vector<double>>(a, "probs");
    if (probs.size() != pi.data().size()) throw ConfigError("policy 'probs' has the wrong length");
    pi.data() = probs;
    pi.validate(1e-9);
    out.push_back(std::move(pi));
  }
  return out;
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string duality_report_to_json(const DualityReport& rep, const BimatrixCMPG& game, int indent) {
  json table = json::array();
  for (const DualArgmaxEntry& e : rep.table) {
    json row{{"p", e.pair.p},           {"q", e.pair.q},
             {"pure", e.pair.pure},     {"feasible", e.pair.feasible},
             {"reward", e.pair.reward}, {"cost", e.pair.cost}};
    row["nash_gap"] = e.nash_gap ? json(*e.nash_gap) : json(nullptr);
    row["is_nash"] = e.nash_gap ? json(*e.nash_gap <= 1e-8) : json(false);
    table.push_back(std::move(row));
  }
  json j;
  j["A"] = game.A;
  j["B"] = game.B;
  j["alpha"] = game.alpha;
  j["scale"] = game.scale;
  j["primal"] = {{"value", rep.primal.value},
                 {"p", rep.primal.p},
                 {"q", rep.primal.q},
                 {"certificate", rep.primal.certificate}};
  j["dual"] = {{"lambda", rep.dual.lambda}, {"value", finite_or_null(rep.dual.value)}};
  j["gap"] = rep.gap;
  j["lambda_max"] = rep.lambda_max;
  j["dual_argmax"] = table;
  return j.dump(indent);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace cmpg
