#include "eluder/adversary.hpp"

#include <algorithm>

#include "eluder/gf2.hpp"

namespace eluder {
namespace adversary {

std::uint64_t Gf2ShatteredTree::node_at_level(std::size_t leaf, int level) const {
  std::size_t v = 1;
  for (int k = 0; k < level; ++k) v = 2 * v + label_at_level(leaf, k);
  return node_features[v];
}

int Gf2ShatteredTree::label_at_level(std::size_t leaf, int level) const {
  return static_cast<int>((leaf >> (depth - 1 - level)) & 1);
}

Gf2ShatteredTree gf2_standard_tree(int dim) {
  if (dim < 1 || dim > 20) throw ConfigError("standard tree dimension out of range");
  Gf2ShatteredTree t;
  t.dim = dim;
  t.depth = dim;
  const std::size_t leaves = std::size_t(1) << dim;
  t.node_features.assign(leaves, 0);
  for (std::size_t v = 1; v < leaves; ++v) {
    int level = 0;
    for (std::size_t w = v; w > 1; w >>= 1) ++level;
    t.node_features[v] = 1ULL << level;  // level-i nodes carry e_{i+1}
  }
  t.leaf_witnesses.assign(leaves, 0);
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    std::uint64_t theta = 0;
    for (int level = 0; level < dim; ++level)
      if (t.label_at_level(leaf, level)) theta |= 1ULL << level;
    t.leaf_witnesses[leaf] = theta;
  }
  return t;
}

Gf2ShatteredTree from_generic(const policy::Gf2LinearClass& cls,
                              const complexity::ShatteredTree& tree) {
  Gf2ShatteredTree out;
  out.dim = cls.dim;
  out.depth = tree.depth;
  const std::size_t leaves = std::size_t(1) << tree.depth;
  out.node_features.assign(leaves, 0);
  for (std::size_t v = 1; v < leaves; ++v) out.node_features[v] = cls.feature(tree.nodes[v]);
  out.leaf_witnesses.assign(leaves, 0);
  for (std::size_t leaf = 0; leaf < leaves; ++leaf)
    out.leaf_witnesses[leaf] = std::get<policy::Gf2Param>(tree.leaf_witnesses[leaf]).mask;
  return out;
}

bool validate_gf2_tree(const Gf2ShatteredTree& tree) {
  const std::size_t leaves = std::size_t(1) << tree.depth;
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    for (int level = 0; level < tree.depth; ++level) {
      if (gf2::dot(tree.leaf_witnesses[leaf], tree.node_at_level(leaf, level)) !=
          tree.label_at_level(leaf, level))
        return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Session

namespace {

int max_binary_epochs(int tree_depth) {
  // Largest b with 2^b - 1 <= tree_depth: the descent path must fit.
  int b = 0;
  while ((1L << (b + 1)) - 1 <= tree_depth) ++b;
  return b;
}

}  // namespace

Session::Session(Gf2ShatteredTree tree, int horizon, Rational reward_bound)
    : tree_(std::move(tree)), horizon_(horizon), reward_bound_(std::move(reward_bound)) {
  if (horizon_ < 1) throw ConfigError("horizon must be positive");
  if (reward_bound_ <= 0) throw ConfigError("reward bound must be positive");
  if (tree_.depth < 1) throw ConfigError("shattering tree too shallow");
  if (!validate_gf2_tree(tree_)) throw ConfigError("leaf witnesses do not realize the tree");
  const int binary = std::min(horizon_, max_binary_epochs(tree_.depth));
  lead_ = horizon_ - binary;
  sched_den_ = 1 << binary;
  // Root feature belongs to the first decision site.
  visit_root();
}

void Session::visit_root() {
  const Site root_site{0, lead_};
  features_[root_site] = tree_.node_features[1];
  used_features_.insert(tree_.node_features[1]);
  if (lead_ == horizon_ - 1)
    terminal_reward_[0] = Rational(2 * ++terminals_seen_, sched_den_) * reward_bound_;
}

void Session::visit(StateId s, Epoch h, ActionId via_action) {
  const Site site{s, h};
  if (features_.count(site)) return;
  if (2 * cursor_ + 1 >= tree_.node_features.size())
    throw ContractError("descent exceeded the tree depth");
  cursor_ = 2 * cursor_ + static_cast<std::size_t>(1 - via_action);
  ++cursor_depth_;
  labels_.push_back(1 - via_action);
  const std::uint64_t phi = tree_.node_features[cursor_];
  if (!used_features_.insert(phi).second)
    throw ConfigError("shattering tree repeats a feature along the descent path");
  features_[site] = phi;
  if (h == horizon_ - 1)
    terminal_reward_[s] = Rational(2 * ++terminals_seen_, sched_den_) * reward_bound_;
}

det::System::Out Session::step(StateId s, ActionId a, Epoch h) {
  if (a != 0 && a != 1) throw ContractError("adversarial system is binary-action");
  if (h < 0 || h >= horizon_) throw ContractError("epoch out of range");
  const int level = h - lead_;
  const StateId limit = level < 0 ? 1 : StateId(1) << level;
  if (s < 0 || s >= limit) throw ContractError("state out of range for the epoch");
  first_action_.try_emplace(Site{s, h}, a);

  if (h < lead_) {
    // No-op prefix: no transition, no reward. The next site is either another
    // prefix epoch or the already-assigned root decision site.
    return {0, 0};
  }
  if (h == horizon_ - 1) {
    return {-1, terminal_reward_.at(s)};
  }
  const StateId next = (StateId(1) << level) * a + s;
  visit(next, h + 1, a);
  return {next, 0};
}

std::uint64_t Session::feature(Site site) const {
  if (site.h < lead_) return 0;  // no-op prefix sites carry the zero vector
  auto it = features_.find(site);
  if (it == features_.end())
    throw ContractError("feature requested for an unvisited site");
  return it->second;
}

std::uint64_t Session::witness_param() const {
  std::size_t leaf = 0;
  for (int level = 0; level < tree_.depth; ++level) {
    const int label = level < static_cast<int>(labels_.size()) ? labels_[level] : 0;
    leaf = (leaf << 1) | static_cast<std::size_t>(label);
  }
  return tree_.leaf_witnesses[leaf];
}

bool Session::witness_realizes_labels() const {
  const std::uint64_t theta = witness_param();
  std::size_t v = 1;
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (gf2::dot(theta, tree_.node_features[v]) != labels_[k]) return false;
    v = 2 * v + static_cast<std::size_t>(labels_[k]);
  }
  return true;
}

Session::Frozen Session::freeze() {
  const int binary = horizon_ - lead_;
  // Visit whatever remains, shallow levels first, so every feature and
  // terminal reward is pinned.
  for (int level = 1; level < binary; ++level) {
    for (StateId s = 0; s < (StateId(1) << level); ++s) {
      if (features_.count(Site{s, lead_ + level})) continue;
      StateId cur = 0;
      for (Epoch h = 0; h < lead_; ++h) cur = step(cur, 0, h).next;
      for (int l = 0; l < level; ++l) {
        const ActionId a = (s >> l) & 1;
        cur = step(cur, a, lead_ + l).next;
      }
    }
  }

  Frozen frozen;
  frozen.mdp.horizon = horizon_;
  frozen.mdp.num_states = std::max(1, 1 << std::max(0, binary - 1));
  frozen.mdp.num_actions = 2;
  frozen.mdp.start = 0;
  frozen.mdp.reward_bound = reward_bound_;
  for (Epoch h = 0; h < horizon_; ++h) {
    const int level = h - lead_;
    const StateId states = level < 0 ? 1 : StateId(1) << level;
    for (StateId s = 0; s < states; ++s) {
      for (ActionId a = 0; a < 2; ++a) {
        if (h + 1 < horizon_)
          frozen.mdp.next[{s, a, h}] = level < 0 ? 0 : (StateId(1) << level) * a + s;
        frozen.mdp.reward[{s, a, h}] =
            h == horizon_ - 1 ? terminal_reward_.at(s) : Rational(0);
      }
    }
  }

  policy::Gf2LinearClass cls;
  cls.dim = tree_.dim;
  auto table = std::make_shared<policy::Gf2FeatureTable>(features_);
  for (Epoch h = 0; h < lead_; ++h) (*table)[Site{0, h}] = 0;
  cls.table = std::move(table);
  frozen.space = cls;
  frozen.optimal = policy::Gf2Param{witness_param()};
  frozen.optimal_value = reward_bound_;
  return frozen;
}

// ---------------------------------------------------------------------------
// Agents

namespace {

PlayRecord finish_record(Session& session, std::vector<Rational> rewards) {
  PlayRecord rec;
  rec.episode_rewards = std::move(rewards);
  rec.total_reward = 0;
  for (const Rational& r : rec.episode_rewards) rec.total_reward += r;
  rec.regret =
      Rational(static_cast<long>(rec.episode_rewards.size())) * session.reward_bound() -
      rec.total_reward;
  rec.witness_ok = session.witness_realizes_labels();
  rec.witness = session.witness_param();
  return rec;
}

}  // namespace

PlayRecord play_greedy(Session& session, long episodes) {
  env::QTable<Rational> q_hat;
  const int horizon = session.horizon();
  std::vector<Rational> rewards;
  for (long t = 0; t < episodes; ++t) {
    std::vector<env::Step> steps;
    StateId cur = session.start_state();
    for (Epoch h = 0; h < horizon; ++h) {
      const ActionId a = q_hat.get(cur, 1, h) > q_hat.get(cur, 0, h) ? 1 : 0;
      auto out = session.step(cur, a, h);
      steps.push_back({cur, a, out.reward});
      cur = out.next;
    }
    q_hat.set(steps[horizon - 1].s, steps[horizon - 1].a, horizon - 1,
              steps[horizon - 1].reward);
    for (Epoch h = horizon - 2; h >= 0; --h) {
      const Rational best = std::max(q_hat.get(steps[h + 1].s, 0, h + 1),
                                     q_hat.get(steps[h + 1].s, 1, h + 1));
      q_hat.set(steps[h].s, steps[h].a, h, steps[h].reward + best);
    }
    Rational total = 0;
    for (const auto& st : steps) total += st.reward;
    rewards.push_back(total);
  }
  return finish_record(session, std::move(rewards));
}

PlayRecord play_det_elim(Session& session, long episodes) {
  policy::Gf2LinearClass cls;
  cls.dim = session.class_dim();
  cls.live = [&session](Site site) { return session.feature(site); };
  policy::PolicySpace space = cls;
  det::RunReport report = det::run_deterministic_elimination(session, space, episodes);
  return finish_record(session, report.episode_rewards());
}

PlayRecord play_scripted(Session& session, const std::vector<std::vector<ActionId>>& scripts,
                         long episodes) {
  if (scripts.empty()) throw ConfigError("scripted agent needs at least one action sequence");
  const int horizon = session.horizon();
  std::vector<Rational> rewards;
  for (long t = 0; t < episodes; ++t) {
    const auto& script = scripts[static_cast<std::size_t>(t) % scripts.size()];
    if (static_cast<int>(script.size()) != horizon)
      throw ConfigError("scripted action sequence length does not match the horizon");
    StateId cur = session.start_state();
    Rational total = 0;
    for (Epoch h = 0; h < horizon; ++h) {
      auto out = session.step(cur, script[h], h);
      total += out.reward;
      cur = out.next;
    }
    rewards.push_back(total);
  }
  return finish_record(session, std::move(rewards));
}

Rational lower_bound_value(std::optional<int> dim_l, int horizon, long episodes,
                           const Rational& reward_bound) {
  if (horizon < 1 || episodes < 1 || reward_bound <= 0)
    throw ConfigError("lower bound needs positive inputs");
  long m = episodes - 1;
  if (horizon < 62) m = std::min(m, (1L << horizon));
  if (dim_l) m = std::min(m, static_cast<long>(*dim_l));
  return Rational(m) * reward_bound / 4;
}

}  // namespace adversary
}  // namespace eluder
