#include "eluder/det_elim.hpp"

#include <algorithm>

namespace eluder {
namespace det {

std::vector<Rational> RunReport::episode_rewards() const {
  std::vector<Rational> out;
  out.reserve(trajectories.size());
  for (const auto& traj : trajectories) out.push_back(traj.total_reward());
  return out;
}

namespace {

std::vector<ActionId> actions_of(const env::Trajectory& traj, std::size_t count) {
  std::vector<ActionId> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(traj.steps[i].a);
  return out;
}

}  // namespace

ExploreOutcome explore_deterministic(System& sys, env::Trajectory& traj, StateId cur,
                                     Epoch h0, policy::ActivePolicySet& active,
                                     env::QTable<Rational>& q_hat,
                                     stack::UncertaintyStack& stack, PathBook& book) {
  const int horizon = sys.horizon();
  bool uncertain = false;
  policy::UncertaintyItem deepest;

  for (Epoch h = h0; h < horizon; ++h) {
    const std::vector<ActionId> acts = active.actions({cur, h});
    ActionId best = acts[0];
    Rational best_q = q_hat.get(cur, best, h);
    for (std::size_t k = 1; k < acts.size(); ++k) {
      const Rational q = q_hat.get(cur, acts[k], h);
      if (q > best_q) {  // ties keep the lowest action id
        best = acts[k];
        best_q = q;
      }
    }
    if (acts.size() > 1) {
      deepest = {cur, best, acts[0] != best ? acts[0] : acts[1], h};
      uncertain = true;
    }
    auto out = sys.step(cur, best, h);
    traj.steps.push_back({cur, best, out.reward});
    if (h + 1 < horizon) book.record({out.next, h + 1}, actions_of(traj, h + 1));
    cur = out.next;
  }
  if (uncertain) stack.push(deepest);

  // Exact backward refresh along the realized episode. Above the deepest
  // disagreement the oracle sets are singletons, so those entries telescope
  // to the true values.
  const auto& sp = traj.steps;
  q_hat.set(sp[horizon - 1].s, sp[horizon - 1].a, horizon - 1, sp[horizon - 1].reward);
  for (Epoch h = horizon - 2; h >= 0; --h) {
    const std::vector<ActionId> acts = active.actions({sp[h + 1].s, h + 1});
    Rational best = q_hat.get(sp[h + 1].s, acts[0], h + 1);
    for (std::size_t k = 1; k < acts.size(); ++k)
      best = std::max(best, q_hat.get(sp[h + 1].s, acts[k], h + 1));
    q_hat.set(sp[h].s, sp[h].a, h, sp[h].reward + best);
  }
  return {uncertain, deepest};
}

RunReport run_deterministic_elimination(System& sys, const policy::PolicySpace& space,
                                        long episodes) {
  const int horizon = sys.horizon();
  if (horizon <= 0) throw ConfigError("horizon must be positive");

  RunReport report;
  report.episodes = episodes;
  report.horizon = horizon;

  policy::ActivePolicySet active(space);
  env::QTable<Rational> q_hat;
  stack::UncertaintyStack stack(horizon);
  PathBook book;
  book.record({sys.start_state(), 0}, {});

  for (long k = 1; k <= episodes; ++k) {
    stack.set_round(k);
    env::Trajectory traj;
    traj.episode = k;
    bool pushed = false;
    bool popped = false;

    if (stack.empty()) {
      auto out = explore_deterministic(sys, traj, sys.start_state(), 0, active, q_hat,
                                       stack, book);
      pushed = out.pushed;
      if (pushed) {
        TraceEvent ev;
        ev.episode = k;
        ev.kind = TraceEvent::kPush;
        ev.item = out.item;
        ev.q_a1_end = q_hat.get(out.item.s, out.item.a1, out.item.h);
        ev.q_a2_end = q_hat.get(out.item.s, out.item.a2, out.item.h);
        report.trace.push_back(ev);
      }
    } else {
      const policy::UncertaintyItem top = stack.top();
      const std::vector<ActionId>* prefix = book.find(top.site());
      if (!prefix) throw ContractError("no recorded path to the stack top");

      // Replay the stored prefix, then force the untried action. The path
      // from (s, h) through a1 stays disagreement-free, so it is never
      // replayed again before the pop.
      StateId cur = sys.start_state();
      for (Epoch h = 0; h < top.h; ++h) {
        auto out = sys.step(cur, (*prefix)[h], h);
        traj.steps.push_back({cur, (*prefix)[h], out.reward});
        cur = out.next;
      }
      if (cur != top.s)
        throw ContractError("replay diverged from the recorded path at episode " +
                            std::to_string(k));
      auto forced = sys.step(cur, top.a2, top.h);
      traj.steps.push_back({cur, top.a2, forced.reward});
      if (top.h + 1 < horizon)
        book.record({forced.next, top.h + 1}, actions_of(traj, top.h + 1));

      auto out = explore_deterministic(sys, traj, forced.next, top.h + 1, active, q_hat,
                                       stack, book);
      pushed = out.pushed;
      if (pushed) {
        TraceEvent ev;
        ev.episode = k;
        ev.kind = TraceEvent::kPush;
        ev.item = out.item;
        ev.q_a1_end = q_hat.get(out.item.s, out.item.a1, out.item.h);
        ev.q_a2_end = q_hat.get(out.item.s, out.item.a2, out.item.h);
        report.trace.push_back(ev);
      } else {
        stack.pop();
        popped = true;
        const Rational q1 = q_hat.get(top.s, top.a1, top.h);
        const Rational q2 = q_hat.get(top.s, top.a2, top.h);
        ActionId kept;
        if (q1 > q2)
          kept = top.a1;
        else if (q2 > q1)
          kept = top.a2;
        else
          kept = std::min(top.a1, top.a2);
        const ActionId victim = kept == top.a1 ? top.a2 : top.a1;
        active.eliminate(top.site(), victim);
        {
          TraceEvent ev;
          ev.episode = k;
          ev.kind = TraceEvent::kPop;
          ev.item = top;
          ev.eliminated = victim;
          ev.q_a1_end = q1;
          ev.q_a2_end = q2;
          report.trace.push_back(ev);
        }
        // Tournament continuation: if a third action still survives at the
        // site, the kept action defends against it next.
        const std::vector<ActionId> remaining = active.actions(top.site());
        for (ActionId a : remaining) {
          if (a == kept) continue;
          policy::UncertaintyItem next{top.s, kept, a, top.h};
          stack.push(next);
          pushed = true;
          TraceEvent ev;
          ev.episode = k;
          ev.kind = TraceEvent::kPush;
          ev.item = next;
          ev.q_a1_end = q_hat.get(next.s, next.a1, next.h);
          ev.q_a2_end = q_hat.get(next.s, next.a2, next.h);
          report.trace.push_back(ev);
          break;
        }
      }
    }

    report.trajectories.push_back(std::move(traj));
    report.episode_events.push_back(popped ? (pushed ? "pop+push" : "pop")
                                           : (pushed ? "push" : "clean"));
  }

  report.stack_ops = stack.ops();
  report.z = active.constraints();
  report.q_hat = q_hat;
  report.final_stack = stack.items();
  report.oracle_calls = active.oracle().calls();
  report.max_constraint_len = active.oracle().max_constraints_seen();
  report.stack_op_episodes = stack::count_stack_op_rounds(stack.ops());
  return report;
}

RunReport run_deterministic_elimination(const env::DeterministicMdp& mdp,
                                        const policy::PolicySpace& space, long episodes) {
  MdpSystem sys(mdp);
  return run_deterministic_elimination(sys, space, episodes);
}

AuditResult audit_deterministic(const RunReport& report, const policy::PolicySpace& space,
                                const env::DeterministicMdp& mdp, std::size_t enum_limit) {
  AuditResult result;
  const env::ExactSolution sol = env::exact_q_star(mdp);

  // Trichotomy: an episode without stack traffic must act optimally at every
  // epoch, which makes its reward exactly the optimal value.
  for (std::size_t e = 0; e < report.trajectories.size(); ++e) {
    if (report.episode_events[e] != "clean") continue;
    const auto& traj = report.trajectories[e];
    for (Epoch h = 0; h < report.horizon; ++h) {
      const auto& st = traj.steps[h];
      if (sol.q_at(st.s, st.a, h) != sol.v_at(st.s, h)) {
        result.fail(traj.episode, "no stack operation, yet a suboptimal action at epoch " +
                                      std::to_string(h));
        break;
      }
    }
  }

  // Optimal-policy safety: eliminated actions are strictly suboptimal where
  // they were eliminated, so any everywhere-optimal parameter survives.
  for (const policy::Constraint& c : report.z.items()) {
    if (sol.q_at(c.s, c.a, c.h) == sol.v_at(c.s, c.h))
      result.fail(0, "constraint at (" + std::to_string(c.s) + "," + std::to_string(c.a) +
                         "," + std::to_string(c.h) + ") forbids an optimal action");
  }
  try {
    const auto params = policy::enumerate_params(space, enum_limit);
    bool any_optimal_survivor = false;
    bool any_optimal = false;
    for (const auto& theta : params) {
      bool optimal = true;
      for (Epoch h = 0; h < sol.horizon && optimal; ++h)
        for (StateId s : sol.reachable[h]) {
          const ActionId a = policy::policy_action(space, theta, {s, h});
          if (sol.q_at(s, a, h) != sol.v_at(s, h)) {
            optimal = false;
            break;
          }
        }
      if (!optimal) continue;
      any_optimal = true;
      bool survives = true;
      for (const policy::Constraint& c : report.z.items()) {
        if (policy::policy_action(space, theta, c.site()) == c.a) {
          survives = false;
          break;
        }
      }
      if (survives) {
        any_optimal_survivor = true;
        break;
      }
    }
    if (any_optimal && !any_optimal_survivor)
      result.fail(0, "every everywhere-optimal parameter was eliminated");
  } catch (const NotAvailableError&) {
    // class too large to enumerate; the constraint-level check above stands
  }

  // Exact estimate readings at stack events.
  for (const TraceEvent& ev : report.trace) {
    if (ev.kind == TraceEvent::kPush) {
      if (ev.q_a1_end != sol.q_at(ev.item.s, ev.item.a1, ev.item.h))
        result.fail(ev.episode, "pushed item's kept-action estimate is not exact");
    } else {
      if (ev.q_a2_end != sol.q_at(ev.item.s, ev.item.a2, ev.item.h))
        result.fail(ev.episode, "popped item's second-action estimate is not exact");
      if (ev.q_a1_end != sol.q_at(ev.item.s, ev.item.a1, ev.item.h))
        result.fail(ev.episode, "popped item's first-action estimate is not exact");
    }
  }

  const stack::CheckResult st =
      stack::check_stack_ops(report.stack_ops, report.horizon, &space, enum_limit);
  if (!st.ok) {
    result.ok = false;
    for (const std::string& v : st.violations) result.violations.push_back(v);
  }
  return result;
}

}  // namespace det
}  // namespace eluder
