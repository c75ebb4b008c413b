#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "eluder/adversary.hpp"
#include "eluder/det_elim.hpp"
#include "eluder/env.hpp"
#include "eluder/policy.hpp"
#include "eluder/stoch_elim.hpp"

namespace eluder {
namespace io {

using Json = nlohmann::json;

// Environment files: {"type": "deterministic"|"stochastic", "horizon", "states",
// "actions", "start", "reward_bound", "transitions", "rewards", ...}.
// Deterministic transition rows are [s, a, h, s']; stochastic rows carry a
// distribution [s, a, h, [[s', "p"], ...]]. Reward rows are [s, a, h, value]
// or [s, a, h, [[value, "p"], ...]]. Rationals are strings ("7/10" or "0.7")
// or plain integers. Loaders validate the full contract and reject bad files
// with a field-precise message.
using AnyEnv = std::variant<env::DeterministicMdp, env::StochasticSim>;

AnyEnv load_env(const std::string& path);
AnyEnv env_from_json(const Json& j);
Json env_to_json(const env::DeterministicMdp& mdp);
Json env_to_json(const env::StochasticSim& sim);

// Policy-space files: {"class": "finite"|"tabular_all"|"gf2_linear"|
// "linear_threshold"|"fourier_support", ...}. Field feature vectors are
// bit-strings, character i holding coordinate i.
policy::PolicySpace load_space(const std::string& path);
policy::PolicySpace space_from_json(const Json& j);
Json space_to_json(const policy::PolicySpace& space);

Json tree_to_json(const adversary::Gf2ShatteredTree& tree);
adversary::Gf2ShatteredTree tree_from_json(const Json& j);
adversary::Gf2ShatteredTree load_tree(const std::string& path);

Json det_report_to_json(const det::RunReport& report);
det::RunReport det_report_from_json(const Json& j);
Json stoch_report_to_json(const stoch::RunReport& report);
stoch::RunReport stoch_report_from_json(const Json& j);

// CSV emission. Shortest round-tripping decimal for doubles, "p/q" for
// rationals, so identical runs produce identical bytes.
std::string format_double(double x);
std::string det_run_csv(const det::RunReport& report, const Rational& v_start);
std::string stoch_run_csv(const stoch::RunReport& report);
std::string experiment_csv(const complexity::PackingExperimentReport& report);

Json load_json_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace io
}  // namespace eluder
