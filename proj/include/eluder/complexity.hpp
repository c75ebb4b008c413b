#pragma once

#include <cstdint>
#include <vector>

#include "eluder/policy.hpp"
#include "eluder/rational.hpp"
#include "eluder/types.hpp"

namespace eluder {
namespace complexity {

struct SearchLimits {
  std::size_t enum_limit = 1u << 20;    // max class cardinality to enumerate
  std::size_t node_budget = 8'000'000;  // max search nodes before flagging
};

// Every ordered disagreement item over the site universe.
std::vector<policy::UncertaintyItem> all_items(const policy::PolicySpace& space,
                                               const std::vector<Site>& sites);

// Longest sequence of items in which each element is independent of its
// prefix. `exact` is false when the node budget ran out, in which case the
// value is a certified lower bound (the witness itself).
struct EluderResult {
  int value = 0;
  bool exact = true;
  std::vector<policy::UncertaintyItem> witness;
};

EluderResult eluder_dim_exact(const policy::PolicySpace& space,
                              const std::vector<policy::UncertaintyItem>& universe,
                              const SearchLimits& limits = {});
EluderResult eluder_dim_exact(const policy::PolicySpace& space,
                              const std::vector<Site>& site_universe,
                              const SearchLimits& limits = {});

// Checks that each witness element is independent of its prefix.
bool validate_independence_sequence(const policy::PolicySpace& space,
                                    const std::vector<policy::UncertaintyItem>& seq,
                                    std::size_t enum_limit = 1u << 20);

// Complete binary tree of decision sites with one consistent parameter per
// leaf. Heap layout: node 1 is the root, node v has children 2v (label 0)
// and 2v+1 (label 1); leaf index L encodes the root-to-leaf label sequence
// most-significant bit first.
struct ShatteredTree {
  int depth = 0;
  std::vector<Site> nodes;                  // size 2^depth, index 1..2^depth-1 used
  std::vector<policy::Param> leaf_witnesses;  // size 2^depth

  Site node_at_level(std::size_t leaf, int level) const;
  int label_at_level(std::size_t leaf, int level) const;
};

struct LittlestoneResult {
  int value = 0;
  bool exact = true;
  ShatteredTree witness;  // depth = value
};

// Deepest feature-labeled complete binary tree the class shatters over the
// universe. Binary action spaces only. Iterative deepening, so a budget
// overrun still leaves a verified tree for the reported depth.
LittlestoneResult littlestone_dim_exact(const policy::PolicySpace& space,
                                        const std::vector<Site>& site_universe,
                                        const SearchLimits& limits = {});

bool validate_shattered(const policy::PolicySpace& space, const ShatteredTree& tree);

// Bisection tree for 1-d threshold policies on [0, 1]: every node carries the
// pair (phi = 1, c = interval midpoint), both child labels stay realizable,
// and after N levels each leaf interval has length exactly 2^-N. Exact
// rationals throughout.
struct ThresholdShatterTree {
  int depth = 0;
  std::vector<Rational> cut;                              // heap order, like ShatteredTree
  std::vector<std::pair<Rational, Rational>> leaf_interval;
  std::vector<Rational> leaf_witness;
};

ThresholdShatterTree threshold_shatter_witness(int depth);

// Greedy independence-sequence growth from i.i.d. standard normal features
// against a finite sphere packing, trial by trial. A trial appends a feature
// whenever it splits some not-yet-separated parameter pair and stops once
// every pair is separated; the report compares the recorded lengths against
// the (4*pi/eps) * ln(|packing|/delta) threshold.
struct PackingExperimentReport {
  double bound = 0;
  std::vector<int> lengths;
  int exceed_count = 0;
  double exceed_fraction = 0;
};

PackingExperimentReport random_feature_experiment(double eps,
                                                  const std::vector<std::vector<double>>& packing,
                                                  double delta, int trials,
                                                  std::uint64_t seed);

// |support|, after deduplication. The eluder dimension of the matching
// function class never exceeds it; the exhaustive cross-check lives in tests.
int fourier_dim_bound(std::vector<std::uint32_t> support);

}  // namespace complexity
}  // namespace eluder
