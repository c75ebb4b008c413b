#include "eluder/stoch_elim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace eluder {
namespace stoch {

Parameters default_parameters(int horizon, int dim_e, double gap, double reward_bound,
                              double eps, double delta) {
  if (horizon <= 0 || dim_e < 0 || gap <= 0 || reward_bound <= 0 || eps <= 0 || delta <= 0)
    throw ConfigError("default parameters need a positive horizon, gap, bound, eps, delta");
  Parameters p;
  p.t_star = 6L * horizon + 4L * (horizon + 1) * dim_e;
  const double n = 8.0 / (gap * gap) * reward_bound * reward_bound *
                       std::log(4.0 * static_cast<double>(p.t_star) / delta) +
                   8.0 * reward_bound / eps;
  p.n_paths = static_cast<long>(std::ceil(n));
  return p;
}

ExploreOutcome explore_stochastic(env::SimSession& session, int horizon, Site start,
                                  ActionId first_action, policy::ActivePolicySet& active,
                                  env::QTable<double>& q_hat, long n_paths,
                                  stack::UncertaintyStack& stack) {
  double total = 0;
  for (long i = 0; i < n_paths; ++i) {
    session.reset_to(start.s, start.h);
    auto first = session.step(first_action);
    double ret = to_double(first.reward);
    StateId s = first.next;

    // The forced initial action carries no choice, so the disagreement scan
    // starts one epoch later. The deepest uncertain epoch wins.
    bool uncertain = false;
    policy::UncertaintyItem deepest;
    for (Epoch h = start.h + 1; h < horizon; ++h) {
      const std::vector<ActionId> acts = active.actions({s, h});
      ActionId best = acts[0];
      double best_q = q_hat.get(s, best, h);
      for (std::size_t k = 1; k < acts.size(); ++k) {
        const double q = q_hat.get(s, acts[k], h);
        if (q > best_q) {  // ties keep the lowest action id
          best = acts[k];
          best_q = q;
        }
      }
      if (acts.size() > 1) {
        ActionId other = acts[0] != best ? acts[0] : acts[1];
        deepest = {s, best, other, h};
        uncertain = true;
      }
      auto out = session.step(best);
      ret += to_double(out.reward);
      s = out.next;
    }
    if (uncertain) {
      stack.push(deepest);
      return {true, deepest, 0};
    }
    total += ret;
  }
  const double mean = total / static_cast<double>(n_paths);
  q_hat.set(start.s, first_action, start.h, mean);
  return {false, {}, mean};
}

RunReport run_policy_elimination(const env::StochasticSim& sim,
                                 const policy::PolicySpace& space, const RunConfig& cfg) {
  if (!sim.initial_action)
    throw ContractError("elimination needs a start with a single forced action");
  if (cfg.t_star <= 0 || cfg.n_paths <= 0)
    throw ConfigError("round and path budgets must be positive");

  RunReport report;
  report.config = cfg;
  report.horizon = sim.horizon;

  env::SimSession session(sim, cfg.seed);
  policy::ActivePolicySet active(space);
  env::QTable<double> q_hat;
  stack::UncertaintyStack stack(sim.horizon);
  std::set<Site> touched;
  touched.insert(Site{sim.start, 0});

  for (long round = 1; round <= cfg.t_star; ++round) {
    stack.set_round(round);
    TraceEvent ev;
    ev.round = round;
    if (!stack.empty()) {
      const policy::UncertaintyItem top = stack.top();
      touched.insert(top.site());
      auto first = explore_stochastic(session, sim.horizon, top.site(), top.a1, active,
                                      q_hat, cfg.n_paths, stack);
      bool pushed = first.pushed;
      policy::UncertaintyItem pushed_item = first.item;
      if (!pushed) {
        auto second = explore_stochastic(session, sim.horizon, top.site(), top.a2, active,
                                         q_hat, cfg.n_paths, stack);
        pushed = second.pushed;
        pushed_item = second.item;
      }
      if (pushed) {
        ev.kind = TraceEvent::kPush;
        ev.item = pushed_item;
        touched.insert(pushed_item.site());
      } else {
        stack.pop();
        const double q1 = q_hat.get(top.s, top.a1, top.h);
        const double q2 = q_hat.get(top.s, top.a2, top.h);
        ActionId victim;
        if (q1 < q2)
          victim = top.a1;
        else if (q2 < q1)
          victim = top.a2;
        else
          victim = std::min(top.a1, top.a2);
        active.eliminate(top.site(), victim);
        ev.kind = TraceEvent::kPop;
        ev.item = top;
        ev.eliminated = victim;
      }
    } else {
      auto out = explore_stochastic(session, sim.horizon, Site{sim.start, 0},
                                    *sim.initial_action, active, q_hat, cfg.n_paths, stack);
      if (out.pushed) {
        ev.kind = TraceEvent::kPush;
        ev.item = out.item;
        touched.insert(out.item.site());
      } else {
        ev.kind = TraceEvent::kClean;
        ev.q_updated = out.q_value;
      }
    }
    ev.stack_depth_after = stack.depth();
    ev.z_size_after = active.constraints().size();
    report.trace.push_back(ev);
  }

  report.stack_ops = stack.ops();
  report.z = active.constraints();
  report.q_hat = q_hat;
  report.final_stack = stack.items();
  report.oracle_calls = active.oracle().calls();
  report.oracle_solver_calls = active.oracle().solver_calls();
  report.max_constraint_len = active.oracle().max_constraints_seen();
  for (const Site& site : touched) {
    if (site.h == 0) continue;  // only the forced action is available there
    report.surviving_actions.push_back({site, active.actions(site)});
  }
  report.stack_op_rounds = stack::count_stack_op_rounds(stack.ops());
  report.simulator_steps = session.steps_taken();
  return report;
}

stack::CheckResult audit_trace(const RunReport& report, const policy::PolicySpace* space,
                               std::size_t enum_limit) {
  return stack::check_stack_ops(report.stack_ops, report.horizon, space, enum_limit);
}

}  // namespace stoch
}  // namespace eluder
