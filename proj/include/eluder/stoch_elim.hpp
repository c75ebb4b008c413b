#pragma once

#include <unordered_map>
#include <vector>

#include "eluder/env.hpp"
#include "eluder/policy.hpp"
#include "eluder/stack.hpp"
#include "eluder/types.hpp"

namespace eluder {
namespace stoch {

struct Parameters {
  long t_star = 0;   // outer rounds
  long n_paths = 0;  // sample paths per exploration call
};

// Round budget 6H + 4(H+1)*dim_E and path count
// ceil((8/gap^2) * rbar^2 * ln(4*t_star/delta) + 8*rbar/eps), natural log.
Parameters default_parameters(int horizon, int dim_e, double gap, double reward_bound,
                              double eps, double delta);

struct RunConfig {
  long t_star = 0;
  long n_paths = 0;
  double delta = 0.1;
  double eps = 0.1;
  double gap = 0.1;
  double reward_bound = 1.0;
  std::uint64_t seed = 0;
};

struct TraceEvent {
  long round = 0;
  enum Kind { kPush, kPop, kClean } kind = kClean;
  policy::UncertaintyItem item;  // push/pop rounds
  ActionId eliminated = -1;      // pop rounds
  double q_updated = 0;          // clean rounds: refreshed start estimate
  int stack_depth_after = 0;
  std::size_t z_size_after = 0;
};

struct RunReport {
  RunConfig config;
  int horizon = 0;
  std::vector<TraceEvent> trace;
  std::vector<stack::Op> stack_ops;
  policy::ConstraintSet z;
  env::QTable<double> q_hat;
  std::vector<policy::UncertaintyItem> final_stack;
  // Realizable actions at every site the run touched, under the final
  // constraint set.
  std::vector<std::pair<Site, std::vector<ActionId>>> surviving_actions;
  long oracle_calls = 0;
  long oracle_solver_calls = 0;
  std::size_t max_constraint_len = 0;
  long stack_op_rounds = 0;
  long simulator_steps = 0;
};

struct ExploreOutcome {
  bool pushed = false;
  policy::UncertaintyItem item;  // set when pushed
  double q_value = 0;            // set when all paths were uncertainty-free
};

// Runs up to n_paths sample paths from `start`, always taking `first_action`
// there and following the estimate-greedy action within the oracle's set
// afterwards. A path that meets a site where more than one action survives
// pushes the disagreement at the deepest such epoch and aborts the call;
// otherwise the mean return over the paths is written into the estimate for
// (start, first_action).
ExploreOutcome explore_stochastic(env::SimSession& session, int horizon, Site start,
                                  ActionId first_action, policy::ActivePolicySet& active,
                                  env::QTable<double>& q_hat, long n_paths,
                                  stack::UncertaintyStack& stack);

// Outer elimination loop. The sim must expose a fixed start with one forced
// initial action (see env::augment_initial); the policy space must be shifted
// to the same epoch layout.
RunReport run_policy_elimination(const env::StochasticSim& sim,
                                 const policy::PolicySpace& space, const RunConfig& cfg);

// Replays the recorded trace against the stack discipline and the
// independence requirement. `space` may be null to skip independence.
stack::CheckResult audit_trace(const RunReport& report, const policy::PolicySpace* space,
                               std::size_t enum_limit = 1u << 20);

}  // namespace stoch
}  // namespace eluder
