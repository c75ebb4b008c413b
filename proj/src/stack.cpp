#include "eluder/stack.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace eluder {
namespace stack {

long count_stack_op_rounds(const std::vector<Op>& ops) {
  std::set<long> rounds;
  for (const Op& op : ops) rounds.insert(op.round);
  return static_cast<long>(rounds.size());
}

CheckResult check_stack_ops(const std::vector<Op>& ops, int horizon,
                            const policy::PolicySpace* space, std::size_t enum_limit) {
  CheckResult result;

  // Replay the discipline checks and pair each pop with its push.
  struct Entry {
    policy::UncertaintyItem item;
    long push_round;
  };
  std::vector<Entry> sim;
  struct PopRecord {
    policy::UncertaintyItem item;
    long push_round;
    long pop_round;
  };
  std::vector<PopRecord> pops;
  std::map<long, int> pushes_per_round;
  std::vector<policy::UncertaintyItem> popped_so_far;

  for (const Op& op : ops) {
    if (op.is_push) {
      if (++pushes_per_round[op.round] > 1)
        result.fail(op.round, "more than one push in a single round");
      if (!sim.empty() && sim.back().item.h >= op.item.h)
        result.fail(op.round, "pushed epoch does not exceed the top epoch");
      sim.push_back({op.item, op.round});
      if (static_cast<int>(sim.size()) > horizon)
        result.fail(op.round, "stack depth exceeds the horizon");
      if (space) {
        try {
          if (policy::is_dependent(*space, op.item, popped_so_far, enum_limit))
            result.fail(op.round, "pushed item depends on the popped sequence");
        } catch (const NotAvailableError&) {
          // class not enumerable at this limit; independence check skipped
        }
      }
    } else {
      if (sim.empty()) {
        result.fail(op.round, "pop from an empty stack");
        continue;
      }
      if (!(sim.back().item == op.item))
        result.fail(op.round, "popped item does not match the stack top");
      pops.push_back({sim.back().item, sim.back().push_round, op.round});
      popped_so_far.push_back(sim.back().item);
      sim.pop_back();
    }
  }

  // sigma(n): rounds up to n containing at least one operation.
  std::vector<long> op_rounds;
  for (const Op& op : ops) op_rounds.push_back(op.round);
  std::sort(op_rounds.begin(), op_rounds.end());
  op_rounds.erase(std::unique(op_rounds.begin(), op_rounds.end()), op_rounds.end());
  auto sigma = [&](long n) {
    return static_cast<long>(std::upper_bound(op_rounds.begin(), op_rounds.end(), n) -
                             op_rounds.begin());
  };

  // Representative pops: y_1 is the first pop; y_{i+1} is the first pop whose
  // push round is later than y_i's pop round.
  long prev_pop_round = -1;
  bool first = true;
  for (const PopRecord& rec : pops) {
    if (!first && rec.push_round <= prev_pop_round) continue;
    if (sigma(rec.pop_round) != sigma(rec.push_round) + 1)
      result.fail(rec.pop_round, "stack operations occurred while the representative was on top");
    if (first) {
      if (sigma(rec.push_round) > horizon)
        result.fail(rec.push_round, "too many stack operations before the first representative");
    } else {
      if (sigma(rec.push_round) > sigma(prev_pop_round) + 2 * horizon)
        result.fail(rec.push_round,
                    "too many stack operations between consecutive representatives");
    }
    prev_pop_round = rec.pop_round;
    first = false;
  }

  return result;
}

}  // namespace stack
}  // namespace eluder
