#pragma once

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "eluder/complexity.hpp"
#include "eluder/det_elim.hpp"
#include "eluder/env.hpp"
#include "eluder/policy.hpp"

namespace eluder {
namespace adversary {

// Complete binary tree of field feature vectors with one witness parameter
// per leaf; heap layout as in complexity::ShatteredTree.
struct Gf2ShatteredTree {
  int dim = 0;    // feature/parameter width
  int depth = 0;  // levels of the tree
  std::vector<std::uint64_t> node_features;   // size 2^depth, indices 1..2^depth-1
  std::vector<std::uint64_t> leaf_witnesses;  // size 2^depth

  std::uint64_t node_at_level(std::size_t leaf, int level) const;
  int label_at_level(std::size_t leaf, int level) const;
};

// Every level-i node carries the i-th basis vector; the witness of a leaf is
// its label sequence read as a parameter vector.
Gf2ShatteredTree gf2_standard_tree(int dim);

// Lifts a generic shattering witness over a field-linear class into feature
// form.
Gf2ShatteredTree from_generic(const policy::Gf2LinearClass& cls,
                              const complexity::ShatteredTree& tree);

bool validate_gf2_tree(const Gf2ShatteredTree& tree);

// Adaptive adversarial deterministic system over a binary tree of states:
// states at binary-phase level l are 0..2^l-1 with transition 2^l * a + s.
// Features are released at first visit by descending the shattering tree
// opposite to the arriving action; the k-th first-visited terminal pays
// 2k/D of the reward bound, D = 2^(binary-phase epochs). Horizons longer
// than the tree supports gain leading no-op epochs (zero feature, no
// transition); deeper trees are simply not descended past what the horizon
// can reach.
class Session final : public det::System {
 public:
  Session(Gf2ShatteredTree tree, int horizon, Rational reward_bound);

  int horizon() const override { return horizon_; }
  StateId start_state() const override { return 0; }
  int num_actions() const override { return 2; }
  Out step(StateId s, ActionId a, Epoch h) override;

  // Feature of an already-visited site; the oracle only asks at the current
  // position, so this never fires for unseen sites in a well-formed run.
  std::uint64_t feature(Site site) const;

  const Rational& reward_bound() const { return reward_bound_; }
  int lead_epochs() const { return lead_; }
  int schedule_denominator() const { return sched_den_; }
  int terminals_seen() const { return terminals_seen_; }
  int class_dim() const { return tree_.dim; }

  // The leaf parameter extending the recorded descent labels (zero-padded);
  // realizes "take the opposite of the first-visit action" at every site on
  // the descent path.
  std::uint64_t witness_param() const;
  bool witness_realizes_labels() const;

  struct Frozen {
    env::DeterministicMdp mdp;
    policy::PolicySpace space;
    policy::Param optimal;  // witness parameter
    Rational optimal_value;
  };
  // Completes all outstanding assignments by systematic visits and exports
  // the now-fixed system.
  Frozen freeze();

 private:
  void visit_root();
  void visit(StateId s, Epoch h, ActionId via_action);

  Gf2ShatteredTree tree_;
  int horizon_;
  Rational reward_bound_;
  int lead_ = 0;       // reward-free no-op prefix epochs
  int sched_den_ = 2;  // terminal schedule denominator
  std::size_t cursor_ = 1;
  int cursor_depth_ = 0;
  std::vector<int> labels_;
  std::unordered_map<Site, std::uint64_t, SiteHash> features_;
  std::unordered_set<std::uint64_t> used_features_;
  std::unordered_map<Site, ActionId, SiteHash> first_action_;
  std::unordered_map<StateId, Rational> terminal_reward_;
  int terminals_seen_ = 0;
};

struct PlayRecord {
  std::vector<Rational> episode_rewards;
  Rational total_reward;
  Rational regret;  // against the reward bound per episode
  bool witness_ok = false;
  std::uint64_t witness = 0;
};

PlayRecord play_greedy(Session& session, long episodes);
PlayRecord play_det_elim(Session& session, long episodes);
PlayRecord play_scripted(Session& session, const std::vector<std::vector<ActionId>>& scripts,
                         long episodes);

// (bound/4) * min(dim_l, 2^horizon, episodes - 1); dim_l absent means
// unbounded and drops out of the minimum.
Rational lower_bound_value(std::optional<int> dim_l, int horizon, long episodes,
                           const Rational& reward_bound);

}  // namespace adversary
}  // namespace eluder
