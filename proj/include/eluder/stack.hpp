#pragma once

#include <string>
#include <vector>

#include "eluder/policy.hpp"
#include "eluder/types.hpp"

namespace eluder {
namespace stack {

struct Op {
  long round = 0;
  bool is_push = false;
  policy::UncertaintyItem item;
};

// FILO stack of unresolved disagreements. The structural invariants are
// enforced on every operation: depth never exceeds the horizon and epochs
// strictly increase from bottom to top. All operations are logged with the
// round set by the caller.
class UncertaintyStack {
 public:
  explicit UncertaintyStack(int horizon) : horizon_(horizon) {}

  void set_round(long round) { round_ = round; }

  void push(const policy::UncertaintyItem& item) {
    if (item.a1 == item.a2) throw ContractError("stack item actions must differ");
    if (!items_.empty() && items_.back().h >= item.h)
      throw ContractError("stack epochs must strictly increase, push at epoch " +
                          std::to_string(item.h) + " over top epoch " +
                          std::to_string(items_.back().h));
    if (static_cast<int>(items_.size()) >= horizon_)
      throw ContractError("stack depth would exceed the horizon");
    items_.push_back(item);
    ops_.push_back({round_, true, item});
  }

  policy::UncertaintyItem pop() {
    if (items_.empty()) throw ContractError("pop from an empty stack");
    policy::UncertaintyItem item = items_.back();
    items_.pop_back();
    ops_.push_back({round_, false, item});
    return item;
  }

  const policy::UncertaintyItem& top() const {
    if (items_.empty()) throw ContractError("top of an empty stack");
    return items_.back();
  }

  bool empty() const { return items_.empty(); }
  int depth() const { return static_cast<int>(items_.size()); }
  const std::vector<policy::UncertaintyItem>& items() const { return items_; }
  const std::vector<Op>& ops() const { return ops_; }

 private:
  int horizon_;
  long round_ = 0;
  std::vector<policy::UncertaintyItem> items_;
  std::vector<Op> ops_;
};

struct CheckResult {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(long round, const std::string& message) {
    ok = false;
    violations.push_back("round " + std::to_string(round) + ": " + message);
  }
};

// Replays a recorded operation stream and verifies the stack discipline:
//   - pops match the current top, depth stays <= horizon, epochs increase;
//   - at most one push per round;
//   - every pushed item is independent of the sequence popped before it
//     (skipped when `space` is null or not enumerable);
//   - the alternating-representative count bookkeeping: taking y_i as the
//     first element popped after round r_{i-1} was pushed, with sigma(n) the
//     number of rounds <= n containing a stack operation,
//     sigma(r_i) = sigma(l_i) + 1 and sigma(l_i) <= sigma(r_{i-1}) + 2H,
//     and sigma(l_1) <= H.
CheckResult check_stack_ops(const std::vector<Op>& ops, int horizon,
                            const policy::PolicySpace* space,
                            std::size_t enum_limit = 1u << 20);

// Number of distinct rounds containing at least one stack operation.
long count_stack_op_rounds(const std::vector<Op>& ops);

}  // namespace stack
}  // namespace eluder
