#include "eluder/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace eluder {
namespace io {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

const Json& field(const Json& j, const std::string& name, const std::string& where) {
  auto it = j.find(name);
  if (it == j.end()) bad(where, "missing field '" + name + "'");
  return *it;
}

int int_field(const Json& j, const std::string& name, const std::string& where) {
  const Json& f = field(j, name, where);
  if (!f.is_number_integer()) bad(where + "." + name, "expected an integer");
  return f.get<int>();
}

Rational rational_value(const Json& j, const std::string& where) {
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  bad(where, "expected a rational (string, integer, or number)");
}

Json rational_json(const Rational& r) { return rational_to_string(r); }

std::uint64_t bits_from_string(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  if (s.size() > 64) bad(where, "bit-string longer than 64");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      v |= 1ULL << i;
    else if (s[i] != '0')
      bad(where, "bit-string must contain only 0/1");
  }
  return v;
}

std::string bits_to_string(std::uint64_t v, int dim) {
  std::string s(static_cast<std::size_t>(dim), '0');
  for (int i = 0; i < dim; ++i)
    if (v >> i & 1) s[i] = '1';
  return s;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Environments

AnyEnv env_from_json(const Json& j) {
  const std::string type = field(j, "type", "env").get<std::string>();
  const int horizon = int_field(j, "horizon", "env");
  const int states = int_field(j, "states", "env");
  const int actions = int_field(j, "actions", "env");
  const StateId start = int_field(j, "start", "env");
  const Rational bound = rational_value(field(j, "reward_bound", "env"), "env.reward_bound");

  auto read_key = [&](const Json& row, const std::string& where) -> Sah {
    if (!row.is_array() || row.size() != 4) bad(where, "expected [s, a, h, value]");
    return {row[0].get<StateId>(), row[1].get<ActionId>(), row[2].get<Epoch>()};
  };

  if (type == "deterministic") {
    env::DeterministicMdp mdp;
    mdp.horizon = horizon;
    mdp.num_states = states;
    mdp.num_actions = actions;
    mdp.start = start;
    mdp.reward_bound = bound;
    if (j.contains("initial_action")) mdp.initial_action = j["initial_action"].get<ActionId>();
    const Json& trans = field(j, "transitions", "env");
    for (std::size_t i = 0; i < trans.size(); ++i) {
      const std::string where = "env.transitions[" + std::to_string(i) + "]";
      const Sah key = read_key(trans[i], where);
      if (!trans[i][3].is_number_integer()) bad(where, "expected a destination state id");
      mdp.next[key] = trans[i][3].get<StateId>();
    }
    const Json& rew = field(j, "rewards", "env");
    for (std::size_t i = 0; i < rew.size(); ++i) {
      const std::string where = "env.rewards[" + std::to_string(i) + "]";
      const Sah key = read_key(rew[i], where);
      mdp.reward[key] = rational_value(rew[i][3], where);
    }
    env::validate(mdp);
    return mdp;
  }
  if (type == "stochastic") {
    env::StochasticSim sim;
    sim.horizon = horizon;
    sim.num_states = states;
    sim.num_actions = actions;
    sim.start = start;
    sim.reward_bound = bound;
    if (j.contains("initial_action")) sim.initial_action = j["initial_action"].get<ActionId>();
    if (j.contains("kernel_visible")) sim.kernel_visible = j["kernel_visible"].get<bool>();
    const Json& trans = field(j, "transitions", "env");
    for (std::size_t i = 0; i < trans.size(); ++i) {
      const std::string where = "env.transitions[" + std::to_string(i) + "]";
      const Sah key = read_key(trans[i], where);
      env::StateDistribution d;
      if (trans[i][3].is_number_integer()) {
        d = env::StateDistribution::atomic(trans[i][3].get<StateId>());
      } else {
        for (const Json& atom : trans[i][3])
          d.atoms.push_back({atom[0].get<StateId>(), rational_value(atom[1], where)});
      }
      sim.next[key] = std::move(d);
    }
    const Json& rew = field(j, "rewards", "env");
    for (std::size_t i = 0; i < rew.size(); ++i) {
      const std::string where = "env.rewards[" + std::to_string(i) + "]";
      const Sah key = read_key(rew[i], where);
      env::RewardDistribution d;
      if (rew[i][3].is_array()) {
        for (const Json& atom : rew[i][3])
          d.atoms.push_back({rational_value(atom[0], where), rational_value(atom[1], where)});
      } else {
        d = env::RewardDistribution::atomic(rational_value(rew[i][3], where));
      }
      sim.reward[key] = std::move(d);
    }
    env::validate(sim);
    return sim;
  }
  bad("env.type", "expected 'deterministic' or 'stochastic'");
}

AnyEnv load_env(const std::string& path) { return env_from_json(load_json_file(path)); }

Json env_to_json(const env::DeterministicMdp& mdp) {
  Json j;
  j["type"] = "deterministic";
  j["horizon"] = mdp.horizon;
  j["states"] = mdp.num_states;
  j["actions"] = mdp.num_actions;
  j["start"] = mdp.start;
  j["reward_bound"] = rational_json(mdp.reward_bound);
  if (mdp.initial_action) j["initial_action"] = *mdp.initial_action;
  Json trans = Json::array();
  for (const auto& [key, nxt] : mdp.next) trans.push_back({key.s, key.a, key.h, nxt});
  Json rew = Json::array();
  for (const auto& [key, r] : mdp.reward)
    rew.push_back({key.s, key.a, key.h, rational_json(r)});
  // Deterministic file bytes: sort rows.
  auto row_less = [](const Json& a, const Json& b) {
    for (int i = 0; i < 3; ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  };
  std::sort(trans.begin(), trans.end(), row_less);
  std::sort(rew.begin(), rew.end(), row_less);
  j["transitions"] = trans;
  j["rewards"] = rew;
  return j;
}

Json env_to_json(const env::StochasticSim& sim) {
  Json j;
  j["type"] = "stochastic";
  j["horizon"] = sim.horizon;
  j["states"] = sim.num_states;
  j["actions"] = sim.num_actions;
  j["start"] = sim.start;
  j["reward_bound"] = rational_json(sim.reward_bound);
  j["kernel_visible"] = sim.kernel_visible;
  if (sim.initial_action) j["initial_action"] = *sim.initial_action;
  Json trans = Json::array();
  for (const auto& [key, d] : sim.next) {
    Json atoms = Json::array();
    for (const auto& [s, p] : d.atoms) atoms.push_back({s, rational_json(p)});
    trans.push_back({key.s, key.a, key.h, atoms});
  }
  Json rew = Json::array();
  for (const auto& [key, d] : sim.reward) {
    Json atoms = Json::array();
    for (const auto& [v, p] : d.atoms) atoms.push_back({rational_json(v), rational_json(p)});
    rew.push_back({key.s, key.a, key.h, atoms});
  }
  auto row_less = [](const Json& a, const Json& b) {
    for (int i = 0; i < 3; ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  };
  std::sort(trans.begin(), trans.end(), row_less);
  std::sort(rew.begin(), rew.end(), row_less);
  j["transitions"] = trans;
  j["rewards"] = rew;
  return j;
}

// ---------------------------------------------------------------------------
// Policy spaces

policy::PolicySpace space_from_json(const Json& j) {
  const std::string cls = field(j, "class", "space").get<std::string>();
  if (cls == "finite") {
    policy::FiniteClass c;
    c.num_actions = int_field(j, "num_actions", "space");
    for (const Json& pol : field(j, "policies", "space")) {
      policy::SiteActionTable table;
      for (const Json& row : pol)
        table[{row[0].get<StateId>(), row[1].get<Epoch>()}] = row[2].get<ActionId>();
      c.policies.push_back(std::move(table));
    }
    return c;
  }
  if (cls == "tabular_all") {
    policy::TabularAllClass c;
    c.num_states = int_field(j, "states", "space");
    c.num_actions = int_field(j, "actions", "space");
    c.horizon = int_field(j, "horizon", "space");
    return c;
  }
  if (cls == "gf2_linear") {
    policy::Gf2LinearClass c;
    c.dim = int_field(j, "dimension", "space");
    auto table = std::make_shared<policy::Gf2FeatureTable>();
    const Json& feats = field(j, "features", "space");
    for (std::size_t i = 0; i < feats.size(); ++i) {
      const std::string where = "space.features[" + std::to_string(i) + "]";
      const Json& row = feats[i];
      if (!row.is_array() || row.size() != 3) bad(where, "expected [s, h, bits]");
      (*table)[{row[0].get<StateId>(), row[1].get<Epoch>()}] =
          bits_from_string(row[2].get<std::string>(), where);
    }
    c.table = table;
    return c;
  }
  if (cls == "linear_threshold") {
    policy::LinearThresholdClass c;
    c.dim = int_field(j, "dimension", "space");
    auto table = std::make_shared<policy::ThresholdFeatureTable>();
    const Json& feats = field(j, "features", "space");
    for (std::size_t i = 0; i < feats.size(); ++i) {
      const std::string where = "space.features[" + std::to_string(i) + "]";
      const Json& row = feats[i];
      if (!row.is_array() || row.size() != 4) bad(where, "expected [s, h, phi, c]");
      policy::ThresholdFeature f;
      for (const Json& x : row[2]) f.phi.push_back(rational_value(x, where));
      f.c = rational_value(row[3], where);
      (*table)[{row[0].get<StateId>(), row[1].get<Epoch>()}] = std::move(f);
    }
    c.table = table;
    return c;
  }
  if (cls == "fourier_support") {
    policy::FourierSupportClass c;
    c.cube_dim = int_field(j, "cube_dim", "space");
    for (const Json& subset : field(j, "support", "space")) {
      std::uint32_t mask = 0;
      for (const Json& idx : subset) mask |= 1u << idx.get<int>();
      c.support.push_back(mask);
    }
    auto points = std::make_shared<policy::CubePointTable>();
    const Json& rows = field(j, "points", "space");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string where = "space.points[" + std::to_string(i) + "]";
      const Json& row = rows[i];
      (*points)[{row[0].get<StateId>(), row[1].get<Epoch>()}] = static_cast<std::uint32_t>(
          bits_from_string(row[2].get<std::string>(), where));
    }
    c.points = points;
    return c;
  }
  bad("space.class", "unknown class '" + cls + "'");
}

policy::PolicySpace load_space(const std::string& path) {
  return space_from_json(load_json_file(path));
}

Json space_to_json(const policy::PolicySpace& space) {
  Json j;
  if (const auto* c = std::get_if<policy::FiniteClass>(&space)) {
    j["class"] = "finite";
    j["num_actions"] = c->num_actions;
    Json pols = Json::array();
    for (const auto& table : c->policies) {
      Json rows = Json::array();
      for (const auto& [site, a] : table) rows.push_back({site.s, site.h, a});
      std::sort(rows.begin(), rows.end());
      pols.push_back(rows);
    }
    j["policies"] = pols;
    return j;
  }
  if (const auto* c = std::get_if<policy::TabularAllClass>(&space)) {
    j["class"] = "tabular_all";
    j["states"] = c->num_states;
    j["actions"] = c->num_actions;
    j["horizon"] = c->horizon;
    return j;
  }
  if (const auto* c = std::get_if<policy::Gf2LinearClass>(&space)) {
    if (!c->table) throw ConfigError("cannot serialize a live feature source");
    j["class"] = "gf2_linear";
    j["dimension"] = c->dim;
    Json rows = Json::array();
    for (const auto& [site, phi] : *c->table)
      rows.push_back({site.s, site.h, bits_to_string(phi, c->dim)});
    std::sort(rows.begin(), rows.end());
    j["features"] = rows;
    return j;
  }
  if (const auto* c = std::get_if<policy::LinearThresholdClass>(&space)) {
    j["class"] = "linear_threshold";
    j["dimension"] = c->dim;
    Json rows = Json::array();
    for (const auto& [site, f] : *c->table) {
      Json phi = Json::array();
      for (const Rational& x : f.phi) phi.push_back(rational_json(x));
      rows.push_back({site.s, site.h, phi, rational_json(f.c)});
    }
    std::sort(rows.begin(), rows.end());
    j["features"] = rows;
    return j;
  }
  const auto& c = std::get<policy::FourierSupportClass>(space);
  j["class"] = "fourier_support";
  j["cube_dim"] = c.cube_dim;
  Json supp = Json::array();
  for (std::uint32_t mask : c.support) {
    Json subset = Json::array();
    for (int i = 0; i < c.cube_dim; ++i)
      if (mask >> i & 1) subset.push_back(i);
    supp.push_back(subset);
  }
  j["support"] = supp;
  Json rows = Json::array();
  for (const auto& [site, p] : *c.points)
    rows.push_back({site.s, site.h, bits_to_string(p, c.cube_dim)});
  std::sort(rows.begin(), rows.end());
  j["points"] = rows;
  return j;
}

// ---------------------------------------------------------------------------
// Shattering trees

Json tree_to_json(const adversary::Gf2ShatteredTree& tree) {
  Json j;
  j["dim"] = tree.dim;
  j["depth"] = tree.depth;
  Json nodes = Json::array();
  for (std::size_t v = 1; v < tree.node_features.size(); ++v)
    nodes.push_back(bits_to_string(tree.node_features[v], tree.dim));
  j["nodes"] = nodes;
  Json leaves = Json::array();
  for (std::uint64_t w : tree.leaf_witnesses) leaves.push_back(bits_to_string(w, tree.dim));
  j["leaf_witnesses"] = leaves;
  return j;
}

adversary::Gf2ShatteredTree tree_from_json(const Json& j) {
  adversary::Gf2ShatteredTree tree;
  tree.dim = int_field(j, "dim", "tree");
  tree.depth = int_field(j, "depth", "tree");
  const std::size_t leaves = std::size_t(1) << tree.depth;
  const Json& nodes = field(j, "nodes", "tree");
  if (nodes.size() != leaves - 1) bad("tree.nodes", "expected 2^depth - 1 entries");
  tree.node_features.assign(leaves, 0);
  for (std::size_t v = 1; v < leaves; ++v)
    tree.node_features[v] = bits_from_string(nodes[v - 1].get<std::string>(), "tree.nodes");
  const Json& lw = field(j, "leaf_witnesses", "tree");
  if (lw.size() != leaves) bad("tree.leaf_witnesses", "expected 2^depth entries");
  for (const Json& w : lw)
    tree.leaf_witnesses.push_back(bits_from_string(w.get<std::string>(), "tree.leaf_witnesses"));
  return tree;
}

adversary::Gf2ShatteredTree load_tree(const std::string& path) {
  return tree_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Run reports

namespace {

Json item_to_json(const policy::UncertaintyItem& it) {
  return Json{it.s, it.a1, it.a2, it.h};
}

policy::UncertaintyItem item_from_json(const Json& j) {
  return {j[0].get<StateId>(), j[1].get<ActionId>(), j[2].get<ActionId>(), j[3].get<Epoch>()};
}

Json ops_to_json(const std::vector<stack::Op>& ops) {
  Json out = Json::array();
  for (const auto& op : ops)
    out.push_back({op.round, op.is_push ? "push" : "pop", item_to_json(op.item)});
  return out;
}

std::vector<stack::Op> ops_from_json(const Json& j) {
  std::vector<stack::Op> ops;
  for (const Json& row : j)
    ops.push_back({row[0].get<long>(), row[1].get<std::string>() == "push",
                   item_from_json(row[2])});
  return ops;
}

Json constraints_to_json(const policy::ConstraintSet& z) {
  Json out = Json::array();
  for (const auto& c : z.items()) out.push_back({c.s, c.a, c.h});
  return out;
}

policy::ConstraintSet constraints_from_json(const Json& j) {
  policy::ConstraintSet z;
  for (const Json& row : j)
    z.append({row[0].get<StateId>(), row[1].get<ActionId>(), row[2].get<Epoch>()});
  return z;
}

}  // namespace

Json det_report_to_json(const det::RunReport& report) {
  Json j;
  j["kind"] = "deterministic_run";
  j["episodes"] = report.episodes;
  j["horizon"] = report.horizon;
  Json trajs = Json::array();
  for (const auto& traj : report.trajectories) {
    Json steps = Json::array();
    for (const auto& st : traj.steps)
      steps.push_back({st.s, st.a, rational_json(st.reward)});
    trajs.push_back(steps);
  }
  j["trajectories"] = trajs;
  j["episode_events"] = report.episode_events;
  Json trace = Json::array();
  for (const auto& ev : report.trace) {
    trace.push_back({{"episode", ev.episode},
                     {"kind", ev.kind == det::TraceEvent::kPush ? "push" : "pop"},
                     {"item", item_to_json(ev.item)},
                     {"eliminated", ev.eliminated},
                     {"q_a1_end", rational_json(ev.q_a1_end)},
                     {"q_a2_end", rational_json(ev.q_a2_end)}});
  }
  j["trace"] = trace;
  j["stack_ops"] = ops_to_json(report.stack_ops);
  j["constraints"] = constraints_to_json(report.z);
  Json qhat = Json::array();
  for (const auto& [key, value] : report.q_hat.entries())
    qhat.push_back({key.s, key.a, key.h, rational_json(value)});
  std::sort(qhat.begin(), qhat.end());
  j["q_hat"] = qhat;
  Json fs = Json::array();
  for (const auto& it : report.final_stack) fs.push_back(item_to_json(it));
  j["final_stack"] = fs;
  j["oracle_calls"] = report.oracle_calls;
  j["max_constraint_len"] = report.max_constraint_len;
  j["stack_op_episodes"] = report.stack_op_episodes;
  return j;
}

det::RunReport det_report_from_json(const Json& j) {
  det::RunReport report;
  report.episodes = j.at("episodes").get<long>();
  report.horizon = j.at("horizon").get<int>();
  long e = 0;
  for (const Json& steps : j.at("trajectories")) {
    env::Trajectory traj;
    traj.episode = ++e;
    for (const Json& st : steps)
      traj.steps.push_back({st[0].get<StateId>(), st[1].get<ActionId>(),
                            rational_from_string(st[2].get<std::string>())});
    report.trajectories.push_back(std::move(traj));
  }
  report.episode_events = j.at("episode_events").get<std::vector<std::string>>();
  for (const Json& ev : j.at("trace")) {
    det::TraceEvent t;
    t.episode = ev.at("episode").get<long>();
    t.kind = ev.at("kind").get<std::string>() == "push" ? det::TraceEvent::kPush
                                                        : det::TraceEvent::kPop;
    t.item = item_from_json(ev.at("item"));
    t.eliminated = ev.at("eliminated").get<ActionId>();
    t.q_a1_end = rational_from_string(ev.at("q_a1_end").get<std::string>());
    t.q_a2_end = rational_from_string(ev.at("q_a2_end").get<std::string>());
    report.trace.push_back(std::move(t));
  }
  report.stack_ops = ops_from_json(j.at("stack_ops"));
  report.z = constraints_from_json(j.at("constraints"));
  for (const Json& row : j.at("q_hat"))
    report.q_hat.set(row[0].get<StateId>(), row[1].get<ActionId>(), row[2].get<Epoch>(),
                     rational_from_string(row[3].get<std::string>()));
  for (const Json& it : j.at("final_stack")) report.final_stack.push_back(item_from_json(it));
  report.oracle_calls = j.at("oracle_calls").get<long>();
  report.max_constraint_len = j.at("max_constraint_len").get<std::size_t>();
  report.stack_op_episodes = j.at("stack_op_episodes").get<long>();
  return report;
}

Json stoch_report_to_json(const stoch::RunReport& report) {
  Json j;
  j["kind"] = "stochastic_run";
  j["horizon"] = report.horizon;
  j["config"] = {{"t_star", report.config.t_star}, {"n_paths", report.config.n_paths},
                 {"delta", format_double(report.config.delta)},
                 {"eps", format_double(report.config.eps)},
                 {"gap", format_double(report.config.gap)},
                 {"reward_bound", format_double(report.config.reward_bound)},
                 {"seed", report.config.seed}};
  Json trace = Json::array();
  for (const auto& ev : report.trace) {
    const char* kind = ev.kind == stoch::TraceEvent::kPush
                           ? "push"
                           : ev.kind == stoch::TraceEvent::kPop ? "pop" : "clean";
    trace.push_back({{"round", ev.round},
                     {"kind", kind},
                     {"item", item_to_json(ev.item)},
                     {"eliminated", ev.eliminated},
                     {"q_updated", format_double(ev.q_updated)},
                     {"stack_depth", ev.stack_depth_after},
                     {"z_size", ev.z_size_after}});
  }
  j["trace"] = trace;
  j["stack_ops"] = ops_to_json(report.stack_ops);
  j["constraints"] = constraints_to_json(report.z);
  Json qhat = Json::array();
  for (const auto& [key, value] : report.q_hat.entries())
    qhat.push_back({key.s, key.a, key.h, format_double(value)});
  std::sort(qhat.begin(), qhat.end());
  j["q_hat"] = qhat;
  Json fs = Json::array();
  for (const auto& it : report.final_stack) fs.push_back(item_to_json(it));
  j["final_stack"] = fs;
  Json cert = Json::array();
  for (const auto& [site, acts] : report.surviving_actions)
    cert.push_back({site.s, site.h, acts});
  std::sort(cert.begin(), cert.end());
  j["surviving_actions"] = cert;
  j["oracle_calls"] = report.oracle_calls;
  j["oracle_solver_calls"] = report.oracle_solver_calls;
  j["max_constraint_len"] = report.max_constraint_len;
  j["stack_op_rounds"] = report.stack_op_rounds;
  j["simulator_steps"] = report.simulator_steps;
  return j;
}

stoch::RunReport stoch_report_from_json(const Json& j) {
  stoch::RunReport report;
  report.horizon = j.at("horizon").get<int>();
  const Json& cfg = j.at("config");
  report.config.t_star = cfg.at("t_star").get<long>();
  report.config.n_paths = cfg.at("n_paths").get<long>();
  report.config.seed = cfg.at("seed").get<std::uint64_t>();
  for (const Json& ev : j.at("trace")) {
    stoch::TraceEvent t;
    t.round = ev.at("round").get<long>();
    const std::string kind = ev.at("kind").get<std::string>();
    t.kind = kind == "push" ? stoch::TraceEvent::kPush
                            : kind == "pop" ? stoch::TraceEvent::kPop : stoch::TraceEvent::kClean;
    t.item = item_from_json(ev.at("item"));
    t.eliminated = ev.at("eliminated").get<ActionId>();
    t.stack_depth_after = ev.at("stack_depth").get<int>();
    t.z_size_after = ev.at("z_size").get<std::size_t>();
    report.trace.push_back(std::move(t));
  }
  report.stack_ops = ops_from_json(j.at("stack_ops"));
  report.z = constraints_from_json(j.at("constraints"));
  report.oracle_calls = j.at("oracle_calls").get<long>();
  report.oracle_solver_calls = j.at("oracle_solver_calls").get<long>();
  report.max_constraint_len = j.at("max_constraint_len").get<std::size_t>();
  report.stack_op_rounds = j.at("stack_op_rounds").get<long>();
  report.simulator_steps = j.at("simulator_steps").get<long>();
  return report;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string det_run_csv(const det::RunReport& report, const Rational& v_start) {
  std::ostringstream out;
  out << "episode,event,reward,cum_regret,stack_depth,z_size\n";
  // Stack depth and constraint count are reconstructed from the op stream.
  std::size_t op = 0;
  int depth = 0;
  std::size_t z_size = 0;
  Rational cum = 0;
  for (std::size_t e = 0; e < report.trajectories.size(); ++e) {
    const long episode = static_cast<long>(e) + 1;
    while (op < report.stack_ops.size() && report.stack_ops[op].round <= episode) {
      if (report.stack_ops[op].is_push) {
        ++depth;
      } else {
        --depth;
        ++z_size;
      }
      ++op;
    }
    const Rational reward = report.trajectories[e].total_reward();
    cum += v_start - reward;
    out << episode << "," << report.episode_events[e] << "," << rational_to_string(reward)
        << "," << rational_to_string(cum) << "," << depth << "," << z_size << "\n";
  }
  return out.str();
}

std::string stoch_run_csv(const stoch::RunReport& report) {
  std::ostringstream out;
  out << "round,event,stack_depth,z_size\n";
  for (const auto& ev : report.trace) {
    const char* kind = ev.kind == stoch::TraceEvent::kPush
                           ? "push"
                           : ev.kind == stoch::TraceEvent::kPop ? "pop" : "clean";
    out << ev.round << "," << kind << "," << ev.stack_depth_after << "," << ev.z_size_after
        << "\n";
  }
  return out.str();
}

std::string experiment_csv(const complexity::PackingExperimentReport& report) {
  std::ostringstream out;
  out << "trial,length,bound,exceeded\n";
  for (std::size_t t = 0; t < report.lengths.size(); ++t) {
    out << (t + 1) << "," << report.lengths[t] << "," << format_double(report.bound) << ","
        << (report.lengths[t] > report.bound ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace io
}  // namespace eluder
