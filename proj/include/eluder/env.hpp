#pragma once

#include <functional>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "eluder/rational.hpp"
#include "eluder/types.hpp"

namespace eluder {
namespace env {

inline constexpr std::size_t kDefaultDpLimit = 1u << 22;

// Finite-horizon deterministic system. Epochs run 0..horizon-1; a reward is
// collected at every epoch; transitions are needed for epochs 0..horizon-2.
// Transition and reward maps may be partial as long as they cover every
// (state, action, epoch) reachable from the start state.
struct DeterministicMdp {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  StateId start = 0;
  Rational reward_bound;
  // When set, only this action is available at (start, 0); produced by
  // augment_initial.
  std::optional<ActionId> initial_action;

  std::unordered_map<Sah, StateId, SahHash> next;
  std::unordered_map<Sah, Rational, SahHash> reward;

  StateId transition(StateId s, ActionId a, Epoch h) const;
  const Rational& reward_at(StateId s, ActionId a, Epoch h) const;
};

struct StateDistribution {
  std::vector<std::pair<StateId, Rational>> atoms;

  static StateDistribution atomic(StateId s) { return {{{s, Rational(1)}}}; }
  bool is_atomic() const { return atoms.size() == 1; }
  void validate() const;
};

struct RewardDistribution {
  std::vector<std::pair<Rational, Rational>> atoms;  // (value, probability)

  static RewardDistribution atomic(Rational v) {
    return {{{std::move(v), Rational(1)}}};
  }
  Rational mean() const;
  Rational max_value() const;
  void validate() const;
};

// Finite-horizon stochastic system with an explicit finite-support kernel.
// Algorithms access it only through SimSession (the simulator contract);
// exact solvers read the kernel directly unless kernel_visible is false.
struct StochasticSim {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  StateId start = 0;
  Rational reward_bound;
  std::optional<ActionId> initial_action;
  bool kernel_visible = true;

  std::unordered_map<Sah, StateDistribution, SahHash> next;
  std::unordered_map<Sah, RewardDistribution, SahHash> reward;
};

// One sampling session against a StochasticSim. Owns a private rng stream;
// the same seed and action sequence reproduce trajectories bit for bit.
class SimSession {
 public:
  SimSession(const StochasticSim& sim, std::uint64_t seed);

  // The simulator oracle: restart from any (state, epoch).
  void reset_to(StateId s, Epoch h);

  struct Outcome {
    StateId next = -1;  // -1 past the final epoch
    Rational reward;
  };
  Outcome step(ActionId a);

  Site position() const { return {state_, epoch_}; }
  long steps_taken() const { return steps_; }

 private:
  std::size_t sample_index(const Sah& key, std::size_t num_atoms,
                           const std::function<Rational(std::size_t)>& prob, bool reward_slot);

  const StochasticSim* sim_;
  std::mt19937_64 rng_;
  StateId state_;
  Epoch epoch_;
  long steps_ = 0;
  // Sampling thresholds on the 2^64 scale, built lazily per distribution.
  std::unordered_map<Sah, std::vector<std::uint64_t>, SahHash> state_thresholds_;
  std::unordered_map<Sah, std::vector<std::uint64_t>, SahHash> reward_thresholds_;
};

// Sparse estimate table with default value 0. Entries are written only by
// the elimination algorithms' update steps.
template <typename T>
class QTable {
 public:
  T get(StateId s, ActionId a, Epoch h) const {
    auto it = table_.find({s, a, h});
    return it == table_.end() ? T(0) : it->second;
  }
  void set(StateId s, ActionId a, Epoch h, T value) {
    table_[{s, a, h}] = std::move(value);
  }
  const std::unordered_map<Sah, T, SahHash>& entries() const { return table_; }

 private:
  std::unordered_map<Sah, T, SahHash> table_;
};

struct Step {
  StateId s = 0;
  ActionId a = 0;
  Rational reward;
};

struct Trajectory {
  long episode = 0;
  std::vector<Step> steps;

  Rational total_reward() const;
};

// Plays a full action sequence (one action per epoch) from the start state.
Trajectory rollout(const DeterministicMdp& mdp, const std::vector<ActionId>& actions,
                   long episode = 0);

// Exact optimal values over the reachable part of the system.
struct ExactSolution {
  int horizon = 0;
  std::unordered_map<Sah, Rational, SahHash> q;
  std::unordered_map<Site, Rational, SiteHash> v;
  std::vector<std::vector<StateId>> reachable;  // per epoch, ascending

  const Rational& q_at(StateId s, ActionId a, Epoch h) const;
  const Rational& v_at(StateId s, Epoch h) const;
  bool is_reachable(StateId s, Epoch h) const;
  const Rational& v_start() const;
  bool is_optimal_action(StateId s, ActionId a, Epoch h) const {
    return q_at(s, a, h) == v_at(s, h);
  }
};

// Backward induction with exact rational arithmetic. Throws NotAvailableError
// when the state-action-epoch count exceeds dp_limit, or for stochastic
// systems whose kernel is hidden (simulator-only access).
ExactSolution exact_q_star(const DeterministicMdp& mdp,
                           std::size_t dp_limit = kDefaultDpLimit);
ExactSolution exact_q_star(const StochasticSim& sim,
                           std::size_t dp_limit = kDefaultDpLimit);

// Largest total reward any action sequence can realize (for stochastic
// systems: over all support atoms too). This is the tight almost-sure bound.
Rational max_total_reward(const DeterministicMdp& mdp);
Rational max_total_reward(const StochasticSim& sim);

// Exact value of the policy (s, h) -> action from the start state.
Rational evaluate_policy(const DeterministicMdp& mdp,
                         const std::function<ActionId(Site)>& policy);
Rational evaluate_policy(const StochasticSim& sim,
                         const std::function<ActionId(Site)>& policy);

// Smallest optimal-action advantage over the other realizable actions, over
// all reachable (s, h). `realizable` gives the action set the policy class
// can produce at a site. infinite=true means no site offers a competing
// action. Throws AssumptionError when the optimal action is not unique among
// the realizable ones, or not realizable at all.
struct GapResult {
  bool infinite = false;
  Rational value;
};
GapResult q_gap(const ExactSolution& sol,
                const std::function<std::vector<ActionId>(Site)>& realizable);

// Prepends a fresh start state with a single forced action whose transition
// follows p0; original dynamics shift one epoch later. The new epoch-0 reward
// is zero, so optimal values are preserved.
DeterministicMdp augment_initial(const DeterministicMdp& mdp, const StateDistribution& p0);
StochasticSim augment_initial(const StochasticSim& sim, const StateDistribution& p0);

struct RegretResult {
  Rational total;
  // Deterministic systems can never earn above the optimum; a negative
  // per-episode shortfall is flagged rather than clamped.
  bool negative_anomaly = false;
};

RegretResult regret(const std::vector<Rational>& episode_rewards, const Rational& v_start,
                    const Rational& reward_bound);
RegretResult regret(const std::vector<Rational>& episode_rewards, const DeterministicMdp& mdp);

// Structural validation used by loaders and generators: id ranges, kernel
// totality over the reachable set, probability sums, declared reward bound
// covering the exact maximum. Throws ConfigError with a field-precise message.
void validate(const DeterministicMdp& mdp);
void validate(const StochasticSim& sim);

}  // namespace env
}  // namespace eluder
