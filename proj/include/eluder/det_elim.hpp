#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "eluder/env.hpp"
#include "eluder/policy.hpp"
#include "eluder/stack.hpp"
#include "eluder/types.hpp"

namespace eluder {
namespace det {

// Episodic deterministic system driven one step at a time. step may mutate
// internal bookkeeping (adaptive environments reveal themselves lazily) but
// the (s, a, h) -> (next, reward) map it realizes must stay fixed once seen.
class System {
 public:
  virtual ~System() = default;
  virtual int horizon() const = 0;
  virtual StateId start_state() const = 0;
  virtual int num_actions() const = 0;

  struct Out {
    StateId next = -1;
    Rational reward;
  };
  virtual Out step(StateId s, ActionId a, Epoch h) = 0;
};

class MdpSystem final : public System {
 public:
  explicit MdpSystem(const env::DeterministicMdp& mdp) : mdp_(&mdp) {}
  int horizon() const override { return mdp_->horizon; }
  StateId start_state() const override { return mdp_->start; }
  int num_actions() const override { return mdp_->num_actions; }
  Out step(StateId s, ActionId a, Epoch h) override {
    return {h + 1 < mdp_->horizon ? mdp_->transition(s, a, h) : -1, mdp_->reward_at(s, a, h)};
  }

 private:
  const env::DeterministicMdp* mdp_;
};

// First action sequence that reached each (state, epoch); later discoveries
// never overwrite, so replay targets are stable across the run.
class PathBook {
 public:
  void record(Site site, std::vector<ActionId> prefix) {
    paths_.try_emplace(site, std::move(prefix));
  }
  const std::vector<ActionId>* find(Site site) const {
    auto it = paths_.find(site);
    return it == paths_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return paths_.size(); }

 private:
  std::unordered_map<Site, std::vector<ActionId>, SiteHash> paths_;
};

struct TraceEvent {
  long episode = 0;
  enum Kind { kPush, kPop } kind = kPush;
  policy::UncertaintyItem item;
  ActionId eliminated = -1;  // pops
  // End-of-episode estimate readings at the item's site, exact.
  Rational q_a1_end;
  Rational q_a2_end;
};

struct RunReport {
  long episodes = 0;
  int horizon = 0;
  std::vector<env::Trajectory> trajectories;   // one per episode
  std::vector<std::string> episode_events;     // "push" | "pop" | "pop+push" | "clean"
  std::vector<TraceEvent> trace;
  std::vector<stack::Op> stack_ops;
  policy::ConstraintSet z;
  env::QTable<Rational> q_hat;
  std::vector<policy::UncertaintyItem> final_stack;
  long oracle_calls = 0;
  std::size_t max_constraint_len = 0;
  long stack_op_episodes = 0;

  std::vector<Rational> episode_rewards() const;
};

struct ExploreOutcome {
  bool pushed = false;
  policy::UncertaintyItem item;
};

// Greedy walk from (cur, h0) to the end of the episode over the oracle's
// action sets, pushing the deepest disagreement if one was met, then exact
// backward value updates along the whole realized episode (including the
// already-walked prefix in `traj`). Newly reached sites land in the pathbook.
ExploreOutcome explore_deterministic(System& sys, env::Trajectory& traj, StateId cur,
                                     Epoch h0, policy::ActivePolicySet& active,
                                     env::QTable<Rational>& q_hat,
                                     stack::UncertaintyStack& stack, PathBook& book);

RunReport run_deterministic_elimination(System& sys, const policy::PolicySpace& space,
                                        long episodes);
RunReport run_deterministic_elimination(const env::DeterministicMdp& mdp,
                                        const policy::PolicySpace& space, long episodes);

struct AuditResult {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(long episode, const std::string& message) {
    ok = false;
    violations.push_back("episode " + std::to_string(episode) + ": " + message);
  }
};

// Exact audit of a finished run against the ground-truth solution:
//   - every episode pushed, popped, or played an optimal action at every
//     epoch;
//   - no constraint ever forbids an optimal action (so an everywhere-optimal
//     in-class policy survives the whole run), re-checked by enumeration
//     when the class is small enough;
//   - at every push the end-of-episode estimate at (s, a1, h) equals the
//     optimal value exactly, and at every pop both readings do;
//   - the stack discipline and pushed-item independence hold.
AuditResult audit_deterministic(const RunReport& report, const policy::PolicySpace& space,
                                const env::DeterministicMdp& mdp,
                                std::size_t enum_limit = 1u << 20);

}  // namespace det
}  // namespace eluder
