#include "eluder/env.hpp"

#include <algorithm>
#include <set>

namespace eluder {
namespace env {

namespace {

std::string triple(StateId s, ActionId a, Epoch h) {
  return "(" + std::to_string(s) + "," + std::to_string(a) + "," + std::to_string(h) + ")";
}

}  // namespace

StateId DeterministicMdp::transition(StateId s, ActionId a, Epoch h) const {
  auto it = next.find({s, a, h});
  if (it == next.end())
    throw ContractError("transition undefined at " + triple(s, a, h));
  return it->second;
}

const Rational& DeterministicMdp::reward_at(StateId s, ActionId a, Epoch h) const {
  auto it = reward.find({s, a, h});
  if (it == reward.end())
    throw ContractError("reward undefined at " + triple(s, a, h));
  return it->second;
}

void StateDistribution::validate() const {
  Rational sum = 0;
  for (const auto& [s, p] : atoms) {
    if (p <= 0) throw ConfigError("state distribution has a non-positive probability");
    sum += p;
  }
  if (sum != 1) throw ConfigError("state distribution probabilities do not sum to 1");
}

Rational RewardDistribution::mean() const {
  Rational m = 0;
  for (const auto& [v, p] : atoms) m += v * p;
  return m;
}

Rational RewardDistribution::max_value() const {
  Rational m = atoms.empty() ? Rational(0) : atoms.front().first;
  for (const auto& [v, p] : atoms) m = std::max(m, v);
  return m;
}

void RewardDistribution::validate() const {
  Rational sum = 0;
  for (const auto& [v, p] : atoms) {
    if (p <= 0) throw ConfigError("reward distribution has a non-positive probability");
    if (v < 0) throw ConfigError("negative reward value");
    sum += p;
  }
  if (sum != 1) throw ConfigError("reward distribution probabilities do not sum to 1");
}

// ---------------------------------------------------------------------------
// Sampling sessions

SimSession::SimSession(const StochasticSim& sim, std::uint64_t seed)
    : sim_(&sim), rng_(seed), state_(sim.start), epoch_(0) {}

void SimSession::reset_to(StateId s, Epoch h) {
  if (h < 0 || h >= sim_->horizon) throw ContractError("reset_to epoch out of range");
  state_ = s;
  epoch_ = h;
}

std::size_t SimSession::sample_index(const Sah& key, std::size_t num_atoms,
                                     const std::function<Rational(std::size_t)>& prob,
                                     bool reward_slot) {
  auto& cache = reward_slot ? reward_thresholds_ : state_thresholds_;
  auto it = cache.find(key);
  if (it == cache.end()) {
    // Cumulative probabilities scaled to 2^64, floor-rounded; the final atom
    // is the catch-all so nothing overflows.
    std::vector<std::uint64_t> th;
    Rational cum = 0;
    for (std::size_t i = 0; i + 1 < num_atoms; ++i) {
      cum += prob(i);
      BigInt scaled = (numerator(cum) << 64) / denominator(cum);
      th.push_back(scaled.convert_to<std::uint64_t>());
    }
    it = cache.emplace(key, std::move(th)).first;
  }
  const std::uint64_t r = rng_();
  const auto& th = it->second;
  for (std::size_t i = 0; i < th.size(); ++i)
    if (r < th[i]) return i;
  return num_atoms - 1;
}

SimSession::Outcome SimSession::step(ActionId a) {
  if (epoch_ >= sim_->horizon) throw ContractError("step past the final epoch");
  const Sah key{state_, a, epoch_};
  auto rit = sim_->reward.find(key);
  if (rit == sim_->reward.end())
    throw ContractError("reward kernel undefined at " + triple(state_, a, epoch_));
  const auto& ratoms = rit->second.atoms;
  Outcome out;
  out.reward = ratoms[sample_index(key, ratoms.size(),
                                   [&](std::size_t i) { return ratoms[i].second; }, true)]
                   .first;
  ++steps_;
  if (epoch_ < sim_->horizon - 1) {
    auto nit = sim_->next.find(key);
    if (nit == sim_->next.end())
      throw ContractError("transition kernel undefined at " + triple(state_, a, epoch_));
    const auto& satoms = nit->second.atoms;
    state_ = satoms[sample_index(key, satoms.size(),
                                 [&](std::size_t i) { return satoms[i].second; }, false)]
                 .first;
  } else {
    state_ = -1;
  }
  ++epoch_;
  out.next = state_;
  return out;
}

// ---------------------------------------------------------------------------
// Rollouts and exact solvers

Rational Trajectory::total_reward() const {
  Rational t = 0;
  for (const Step& st : steps) t += st.reward;
  return t;
}

Trajectory rollout(const DeterministicMdp& mdp, const std::vector<ActionId>& actions,
                   long episode) {
  if (static_cast<int>(actions.size()) != mdp.horizon)
    throw ContractError("action sequence length " + std::to_string(actions.size()) +
                        " does not match horizon " + std::to_string(mdp.horizon));
  Trajectory traj;
  traj.episode = episode;
  StateId s = mdp.start;
  for (Epoch h = 0; h < mdp.horizon; ++h) {
    const ActionId a = actions[h];
    if (a < 0 || a >= mdp.num_actions)
      throw ContractError("invalid action id " + std::to_string(a));
    traj.steps.push_back({s, a, mdp.reward_at(s, a, h)});
    if (h < mdp.horizon - 1) s = mdp.transition(s, a, h);
  }
  return traj;
}

const Rational& ExactSolution::q_at(StateId s, ActionId a, Epoch h) const {
  auto it = q.find({s, a, h});
  if (it == q.end()) throw ContractError("no optimal value at " + triple(s, a, h));
  return it->second;
}

const Rational& ExactSolution::v_at(StateId s, Epoch h) const {
  auto it = v.find(Site{s, h});
  if (it == v.end())
    throw ContractError("no optimal value at state " + std::to_string(s) + ", epoch " +
                        std::to_string(h));
  return it->second;
}

bool ExactSolution::is_reachable(StateId s, Epoch h) const {
  return v.count(Site{s, h}) > 0;
}

const Rational& ExactSolution::v_start() const {
  if (reachable.empty() || reachable[0].empty())
    throw ContractError("empty solution");
  return v_at(reachable[0][0], 0);
}

namespace {

// Shared backward-induction skeleton. `actions_at` yields the available
// actions at a reachable site (a single forced action at an augmented start).
template <typename Env, typename Successors, typename MeanReward>
ExactSolution solve_exact(const Env& e, std::size_t dp_limit, Successors successors,
                          MeanReward mean_reward) {
  const std::size_t size = static_cast<std::size_t>(e.num_states) *
                           static_cast<std::size_t>(e.num_actions) *
                           static_cast<std::size_t>(e.horizon);
  if (size > dp_limit)
    throw NotAvailableError("exact solver limit exceeded: |S||A|H = " + std::to_string(size));

  ExactSolution sol;
  sol.horizon = e.horizon;
  std::vector<std::set<StateId>> reach(e.horizon);
  reach[0].insert(e.start);
  auto actions_at = [&](StateId s, Epoch h) {
    std::vector<ActionId> acts;
    if (h == 0 && s == e.start && e.initial_action) {
      acts.push_back(*e.initial_action);
    } else {
      for (ActionId a = 0; a < e.num_actions; ++a) acts.push_back(a);
    }
    return acts;
  };
  for (Epoch h = 0; h + 1 < e.horizon; ++h)
    for (StateId s : reach[h])
      for (ActionId a : actions_at(s, h))
        for (StateId nxt : successors(s, a, h)) reach[h + 1].insert(nxt);

  for (Epoch h = e.horizon - 1; h >= 0; --h) {
    for (StateId s : reach[h]) {
      bool first = true;
      Rational best;
      for (ActionId a : actions_at(s, h)) {
        Rational value = mean_reward(s, a, h);
        if (h + 1 < e.horizon) value += successors.expected_value(sol, s, a, h);
        sol.q[{s, a, h}] = value;
        if (first || value > best) {
          best = value;
          first = false;
        }
      }
      sol.v[Site{s, h}] = best;
    }
  }
  sol.reachable.resize(e.horizon);
  for (Epoch h = 0; h < e.horizon; ++h)
    sol.reachable[h].assign(reach[h].begin(), reach[h].end());
  return sol;
}

struct DetSuccessors {
  const DeterministicMdp* mdp;
  std::vector<StateId> operator()(StateId s, ActionId a, Epoch h) const {
    return {mdp->transition(s, a, h)};
  }
  Rational expected_value(const ExactSolution& sol, StateId s, ActionId a, Epoch h) const {
    return sol.v_at(mdp->transition(s, a, h), h + 1);
  }
};

struct StochSuccessors {
  const StochasticSim* sim;
  const StateDistribution& dist(StateId s, ActionId a, Epoch h) const {
    auto it = sim->next.find({s, a, h});
    if (it == sim->next.end())
      throw ContractError("transition kernel undefined at " + triple(s, a, h));
    return it->second;
  }
  std::vector<StateId> operator()(StateId s, ActionId a, Epoch h) const {
    std::vector<StateId> out;
    for (const auto& [nxt, p] : dist(s, a, h).atoms) out.push_back(nxt);
    return out;
  }
  Rational expected_value(const ExactSolution& sol, StateId s, ActionId a, Epoch h) const {
    Rational value = 0;
    for (const auto& [nxt, p] : dist(s, a, h).atoms) value += p * sol.v_at(nxt, h + 1);
    return value;
  }
};

}  // namespace

ExactSolution exact_q_star(const DeterministicMdp& mdp, std::size_t dp_limit) {
  return solve_exact(mdp, dp_limit, DetSuccessors{&mdp},
                     [&](StateId s, ActionId a, Epoch h) { return mdp.reward_at(s, a, h); });
}

ExactSolution exact_q_star(const StochasticSim& sim, std::size_t dp_limit) {
  if (!sim.kernel_visible)
    throw NotAvailableError("exact solver unavailable: simulator-only environment");
  return solve_exact(sim, dp_limit, StochSuccessors{&sim}, [&](StateId s, ActionId a, Epoch h) {
    auto it = sim.reward.find({s, a, h});
    if (it == sim.reward.end())
      throw ContractError("reward kernel undefined at " + triple(s, a, h));
    return it->second.mean();
  });
}

namespace {

template <typename Env, typename StepMax>
Rational max_total_impl(const Env& e, StepMax step_max) {
  // Same recursion as the optimal value, but maximizing over support atoms,
  // which gives the almost-sure bound.
  std::unordered_map<Site, Rational, SiteHash> w;
  std::vector<std::set<StateId>> reach(e.horizon);
  reach[0].insert(e.start);
  for (Epoch h = 0; h + 1 < e.horizon; ++h)
    for (StateId s : reach[h])
      for (ActionId a = 0; a < e.num_actions; ++a) {
        if (h == 0 && s == e.start && e.initial_action && a != *e.initial_action) continue;
        step_max.successors(s, a, h, reach[h + 1]);
      }
  for (Epoch h = e.horizon - 1; h >= 0; --h) {
    for (StateId s : reach[h]) {
      bool first = true;
      Rational best;
      for (ActionId a = 0; a < e.num_actions; ++a) {
        if (h == 0 && s == e.start && e.initial_action && a != *e.initial_action) continue;
        Rational value = step_max.reward_max(s, a, h);
        if (h + 1 < e.horizon) value += step_max.future_max(w, s, a, h);
        if (first || value > best) {
          best = value;
          first = false;
        }
      }
      w[Site{s, h}] = best;
    }
  }
  return w.at(Site{e.start, 0});
}

}  // namespace

Rational max_total_reward(const DeterministicMdp& mdp) {
  struct {
    const DeterministicMdp* m;
    void successors(StateId s, ActionId a, Epoch h, std::set<StateId>& out) const {
      out.insert(m->transition(s, a, h));
    }
    Rational reward_max(StateId s, ActionId a, Epoch h) const {
      return m->reward_at(s, a, h);
    }
    Rational future_max(const std::unordered_map<Site, Rational, SiteHash>& w, StateId s,
                        ActionId a, Epoch h) const {
      return w.at(Site{m->transition(s, a, h), h + 1});
    }
  } ops{&mdp};
  return max_total_impl(mdp, ops);
}

Rational max_total_reward(const StochasticSim& sim) {
  struct {
    const StochasticSim* m;
    void successors(StateId s, ActionId a, Epoch h, std::set<StateId>& out) const {
      for (const auto& [nxt, p] : m->next.at({s, a, h}).atoms) out.insert(nxt);
    }
    Rational reward_max(StateId s, ActionId a, Epoch h) const {
      return m->reward.at({s, a, h}).max_value();
    }
    Rational future_max(const std::unordered_map<Site, Rational, SiteHash>& w, StateId s,
                        ActionId a, Epoch h) const {
      bool first = true;
      Rational best;
      for (const auto& [nxt, p] : m->next.at({s, a, h}).atoms) {
        const Rational& val = w.at(Site{nxt, h + 1});
        if (first || val > best) {
          best = val;
          first = false;
        }
      }
      return best;
    }
  } ops{&sim};
  return max_total_impl(sim, ops);
}

Rational evaluate_policy(const DeterministicMdp& mdp,
                         const std::function<ActionId(Site)>& policy) {
  Rational total = 0;
  StateId s = mdp.start;
  for (Epoch h = 0; h < mdp.horizon; ++h) {
    ActionId a = (h == 0 && mdp.initial_action) ? *mdp.initial_action : policy({s, h});
    total += mdp.reward_at(s, a, h);
    if (h + 1 < mdp.horizon) s = mdp.transition(s, a, h);
  }
  return total;
}

Rational evaluate_policy(const StochasticSim& sim,
                         const std::function<ActionId(Site)>& policy) {
  if (!sim.kernel_visible)
    throw NotAvailableError("policy evaluation unavailable: simulator-only environment");
  // Forward distribution over states, exact expectations.
  std::unordered_map<StateId, Rational> dist{{sim.start, Rational(1)}};
  Rational total = 0;
  for (Epoch h = 0; h < sim.horizon; ++h) {
    std::unordered_map<StateId, Rational> nxt_dist;
    for (const auto& [s, p] : dist) {
      ActionId a = (h == 0 && sim.initial_action) ? *sim.initial_action : policy({s, h});
      total += p * sim.reward.at({s, a, h}).mean();
      if (h + 1 < sim.horizon)
        for (const auto& [nxt, q] : sim.next.at({s, a, h}).atoms) nxt_dist[nxt] += p * q;
    }
    dist = std::move(nxt_dist);
  }
  return total;
}

GapResult q_gap(const ExactSolution& sol,
                const std::function<std::vector<ActionId>(Site)>& realizable) {
  GapResult result;
  result.infinite = true;
  for (Epoch h = 0; h < sol.horizon; ++h) {
    for (StateId s : sol.reachable[h]) {
      const std::vector<ActionId> acts = realizable({s, h});
      const Rational& vstar = sol.v_at(s, h);
      int optimal_count = 0;
      for (ActionId a : acts)
        if (sol.q_at(s, a, h) == vstar) ++optimal_count;
      if (optimal_count == 0)
        throw AssumptionError("optimal action not realizable at state " + std::to_string(s) +
                              ", epoch " + std::to_string(h));
      if (optimal_count > 1)
        throw AssumptionError("optimal action not unique among realizable actions at state " +
                              std::to_string(s) + ", epoch " + std::to_string(h));
      for (ActionId a : acts) {
        const Rational& qa = sol.q_at(s, a, h);
        if (qa == vstar) continue;
        const Rational gap = vstar - qa;
        if (result.infinite || gap < result.value) {
          result.infinite = false;
          result.value = gap;
        }
      }
    }
  }
  return result;
}

DeterministicMdp augment_initial(const DeterministicMdp& mdp, const StateDistribution& p0) {
  p0.validate();
  if (!p0.is_atomic())
    throw ConfigError("deterministic augmentation requires an atomic initial distribution");
  DeterministicMdp out;
  out.horizon = mdp.horizon + 1;
  out.num_states = mdp.num_states + 1;
  out.num_actions = mdp.num_actions;
  out.start = mdp.num_states;  // fresh id
  out.reward_bound = mdp.reward_bound;
  out.initial_action = 0;
  for (const auto& [key, nxt] : mdp.next) out.next[{key.s, key.a, key.h + 1}] = nxt;
  for (const auto& [key, r] : mdp.reward) out.reward[{key.s, key.a, key.h + 1}] = r;
  out.next[{out.start, 0, 0}] = p0.atoms[0].first;
  out.reward[{out.start, 0, 0}] = 0;
  return out;
}

StochasticSim augment_initial(const StochasticSim& sim, const StateDistribution& p0) {
  p0.validate();
  StochasticSim out;
  out.horizon = sim.horizon + 1;
  out.num_states = sim.num_states + 1;
  out.num_actions = sim.num_actions;
  out.start = sim.num_states;
  out.reward_bound = sim.reward_bound;
  out.initial_action = 0;
  out.kernel_visible = sim.kernel_visible;
  for (const auto& [key, d] : sim.next) out.next[{key.s, key.a, key.h + 1}] = d;
  for (const auto& [key, d] : sim.reward) out.reward[{key.s, key.a, key.h + 1}] = d;
  out.next[{out.start, 0, 0}] = p0;
  out.reward[{out.start, 0, 0}] = RewardDistribution::atomic(0);
  return out;
}

RegretResult regret(const std::vector<Rational>& episode_rewards, const Rational& v_start,
                    const Rational& reward_bound) {
  RegretResult result;
  result.total = 0;
  for (const Rational& r : episode_rewards) {
    if (r > reward_bound)
      throw ContractError("episode reward " + rational_to_string(r) +
                          " exceeds the declared bound " + rational_to_string(reward_bound));
    const Rational shortfall = v_start - r;
    if (shortfall < 0) result.negative_anomaly = true;
    result.total += shortfall;
  }
  return result;
}

RegretResult regret(const std::vector<Rational>& episode_rewards, const DeterministicMdp& mdp) {
  return regret(episode_rewards, exact_q_star(mdp).v_start(), mdp.reward_bound);
}

void validate(const DeterministicMdp& mdp) {
  if (mdp.horizon <= 0) throw ConfigError("horizon must be positive");
  if (mdp.num_states <= 0 || mdp.num_actions <= 0)
    throw ConfigError("states and actions must be positive");
  if (mdp.start < 0 || mdp.start >= mdp.num_states)
    throw ConfigError("start state out of range");
  for (const auto& [key, nxt] : mdp.next) {
    if (key.s < 0 || key.s >= mdp.num_states || nxt < 0 || nxt >= mdp.num_states)
      throw ConfigError("transitions: state id out of range at " + triple(key.s, key.a, key.h));
    if (key.a < 0 || key.a >= mdp.num_actions || key.h < 0 || key.h >= mdp.horizon - 1)
      throw ConfigError("transitions: bad action or epoch at " + triple(key.s, key.a, key.h));
  }
  for (const auto& [key, r] : mdp.reward) {
    if (key.s < 0 || key.s >= mdp.num_states || key.a < 0 || key.a >= mdp.num_actions ||
        key.h < 0 || key.h >= mdp.horizon)
      throw ConfigError("rewards: bad index at " + triple(key.s, key.a, key.h));
    if (r < 0) throw ConfigError("rewards: negative value at " + triple(key.s, key.a, key.h));
  }
  // Totality over the reachable set, checked by walking it.
  std::set<StateId> frontier{mdp.start};
  for (Epoch h = 0; h < mdp.horizon; ++h) {
    std::set<StateId> nxt;
    for (StateId s : frontier) {
      for (ActionId a = 0; a < mdp.num_actions; ++a) {
        if (h == 0 && s == mdp.start && mdp.initial_action && a != *mdp.initial_action)
          continue;
        if (!mdp.reward.count({s, a, h}))
          throw ConfigError("rewards: missing entry at reachable " + triple(s, a, h));
        if (h + 1 < mdp.horizon) {
          auto it = mdp.next.find({s, a, h});
          if (it == mdp.next.end())
            throw ConfigError("transitions: missing entry at reachable " + triple(s, a, h));
          nxt.insert(it->second);
        }
      }
    }
    frontier = std::move(nxt);
  }
  if (max_total_reward(mdp) > mdp.reward_bound)
    throw ConfigError("reward_bound is smaller than the maximum achievable total reward");
}

void validate(const StochasticSim& sim) {
  if (sim.horizon <= 0) throw ConfigError("horizon must be positive");
  if (sim.num_states <= 0 || sim.num_actions <= 0)
    throw ConfigError("states and actions must be positive");
  if (sim.start < 0 || sim.start >= sim.num_states)
    throw ConfigError("start state out of range");
  for (const auto& [key, d] : sim.next) {
    d.validate();
    for (const auto& [s, p] : d.atoms)
      if (s < 0 || s >= sim.num_states)
        throw ConfigError("transitions: state id out of range at " + triple(key.s, key.a, key.h));
  }
  for (const auto& [key, d] : sim.reward) d.validate();
  std::set<StateId> frontier{sim.start};
  for (Epoch h = 0; h < sim.horizon; ++h) {
    std::set<StateId> nxt;
    for (StateId s : frontier) {
      for (ActionId a = 0; a < sim.num_actions; ++a) {
        if (h == 0 && s == sim.start && sim.initial_action && a != *sim.initial_action)
          continue;
        if (!sim.reward.count({s, a, h}))
          throw ConfigError("rewards: missing entry at reachable " + triple(s, a, h));
        if (h + 1 < sim.horizon) {
          auto it = sim.next.find({s, a, h});
          if (it == sim.next.end())
            throw ConfigError("transitions: missing entry at reachable " + triple(s, a, h));
          for (const auto& [ns, p] : it->second.atoms) nxt.insert(ns);
        }
      }
    }
    frontier = std::move(nxt);
  }
  if (max_total_reward(sim) > sim.reward_bound)
    throw ConfigError("reward_bound is smaller than the maximum possible total reward");
}

}  // namespace env
}  // namespace eluder
