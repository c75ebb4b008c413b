#include "eluder/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace eluder {
namespace complexity {

namespace {

// Enumerated view of the class over the sites a search touches.
struct EnumeratedClass {
  std::vector<policy::Param> params;
  std::vector<Site> sites;
  std::vector<std::uint8_t> act;  // params x sites

  std::uint8_t action(std::size_t p, std::size_t k) const { return act[p * sites.size() + k]; }

  static EnumeratedClass build(const policy::PolicySpace& space, std::vector<Site> sites,
                               std::size_t enum_limit) {
    EnumeratedClass e;
    e.params = policy::enumerate_params(space, enum_limit);
    e.sites = std::move(sites);
    e.act.resize(e.params.size() * e.sites.size());
    for (std::size_t p = 0; p < e.params.size(); ++p)
      for (std::size_t k = 0; k < e.sites.size(); ++k)
        e.act[p * e.sites.size() + k] =
            static_cast<std::uint8_t>(policy::policy_action(space, e.params[p], e.sites[k]));
    return e;
  }
};

using Bits = std::vector<std::uint64_t>;

struct BitsHash {
  std::size_t operator()(const Bits& b) const {
    std::size_t h = 1469598103934665603ull;
    for (std::uint64_t w : b) {
      h ^= static_cast<std::size_t>(w);
      h *= 1099511628211ull;
    }
    return h;
  }
};

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

void set_union_into(Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] |= b[i];
}

struct BudgetExceeded {};

// Depth-first maximization of the independence-sequence length. The search
// state is exactly the set of ordered parameter pairs some prefix item has
// already separated, so results are memoized on that bitset.
class EluderSearch {
 public:
  EluderSearch(const EnumeratedClass& cls, const std::vector<policy::UncertaintyItem>& universe,
               std::size_t node_budget)
      : node_budget_(node_budget) {
    const std::size_t n = cls.params.size();
    words_ = (n * n + 63) / 64;
    std::unordered_set<Bits, BitsHash> seen;
    std::unordered_map<Site, std::size_t, SiteHash> site_index;
    for (std::size_t k = 0; k < cls.sites.size(); ++k) site_index[cls.sites[k]] = k;
    for (const auto& item : universe) {
      const std::size_t k = site_index.at(item.site());
      Bits mask(words_, 0);
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (cls.action(i, k) != item.a1) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (cls.action(j, k) != item.a2) continue;
          const std::size_t bit = i * n + j;
          mask[bit / 64] |= 1ULL << (bit % 64);
          any = true;
        }
      }
      if (!any) continue;  // no pair can ever be split by this item
      if (seen.insert(mask).second) {
        items_.push_back(item);
        masks_.push_back(std::move(mask));
      }
    }
  }

  EluderResult run() {
    EluderResult result;
    Bits u(words_, 0);
    std::vector<int> seq;
    try {
      result.value = search(u, seq);
      result.exact = true;
      // Rebuild an optimal sequence from the memo table: every explored
      // state's children are memoized, so a maximizing child always exists.
      Bits cur = u;
      for (int remaining = result.value; remaining > 0; --remaining) {
        bool stepped = false;
        for (std::size_t x = 0; x < masks_.size() && !stepped; ++x) {
          if (subset_of(masks_[x], cur)) continue;
          Bits nxt = cur;
          set_union_into(nxt, masks_[x]);
          auto it = memo_.find(nxt);
          if (it != memo_.end() && it->second == remaining - 1) {
            result.witness.push_back(items_[x]);
            cur = std::move(nxt);
            stepped = true;
          }
        }
        if (!stepped) throw std::logic_error("witness reconstruction failed");
      }
    } catch (const BudgetExceeded&) {
      result.value = static_cast<int>(best_seq_.size());
      result.exact = false;
      for (int idx : best_seq_) result.witness.push_back(items_[idx]);
    }
    return result;
  }

 private:
  int search(const Bits& u, std::vector<int>& seq) {
    if (++nodes_ > node_budget_) throw BudgetExceeded{};
    auto memo = memo_.find(u);
    if (memo != memo_.end()) return memo->second;
    int best = 0;
    for (std::size_t x = 0; x < masks_.size(); ++x) {
      if (subset_of(masks_[x], u)) continue;  // dependent on the prefix
      Bits nxt = u;
      set_union_into(nxt, masks_[x]);
      seq.push_back(static_cast<int>(x));
      if (seq.size() > best_seq_.size()) best_seq_ = seq;
      best = std::max(best, 1 + search(nxt, seq));
      seq.pop_back();
    }
    memo_.emplace(u, best);
    return best;
  }

  std::size_t words_ = 0;
  std::vector<policy::UncertaintyItem> items_;
  std::vector<Bits> masks_;
  std::unordered_map<Bits, int, BitsHash> memo_;
  std::vector<int> best_seq_;
  std::size_t nodes_ = 0;
  std::size_t node_budget_;
};

}  // namespace

std::vector<policy::UncertaintyItem> all_items(const policy::PolicySpace& space,
                                               const std::vector<Site>& sites) {
  const int na = policy::num_actions(space);
  std::vector<policy::UncertaintyItem> out;
  for (const Site& site : sites)
    for (ActionId a1 = 0; a1 < na; ++a1)
      for (ActionId a2 = 0; a2 < na; ++a2)
        if (a1 != a2) out.push_back({site.s, a1, a2, site.h});
  return out;
}

EluderResult eluder_dim_exact(const policy::PolicySpace& space,
                              const std::vector<policy::UncertaintyItem>& universe,
                              const SearchLimits& limits) {
  std::vector<Site> sites;
  std::set<Site> seen;
  for (const auto& item : universe)
    if (seen.insert(item.site()).second) sites.push_back(item.site());
  EnumeratedClass cls = EnumeratedClass::build(space, sites, limits.enum_limit);
  EluderSearch search(cls, universe, limits.node_budget);
  return search.run();
}

EluderResult eluder_dim_exact(const policy::PolicySpace& space,
                              const std::vector<Site>& site_universe,
                              const SearchLimits& limits) {
  return eluder_dim_exact(space, all_items(space, site_universe), limits);
}

bool validate_independence_sequence(const policy::PolicySpace& space,
                                    const std::vector<policy::UncertaintyItem>& seq,
                                    std::size_t enum_limit) {
  std::vector<policy::UncertaintyItem> prefix;
  for (const auto& item : seq) {
    if (policy::is_dependent(space, item, prefix, enum_limit)) return false;
    prefix.push_back(item);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Littlestone dimension

Site ShatteredTree::node_at_level(std::size_t leaf, int level) const {
  std::size_t v = 1;
  for (int k = 0; k < level; ++k) v = 2 * v + label_at_level(leaf, k);
  return nodes[v];
}

int ShatteredTree::label_at_level(std::size_t leaf, int level) const {
  return static_cast<int>((leaf >> (depth - 1 - level)) & 1);
}

namespace {

class LittlestoneSearch {
 public:
  LittlestoneSearch(const EnumeratedClass& cls, std::size_t node_budget)
      : cls_(&cls), node_budget_(node_budget) {
    words_ = (cls.params.size() + 63) / 64;
  }

  LittlestoneResult run() {
    LittlestoneResult result;
    Bits all(words_, 0);
    for (std::size_t p = 0; p < cls_->params.size(); ++p) all[p / 64] |= 1ULL << (p % 64);

    // Iterative deepening: a completed failed search certifies the exact
    // value; a budget overrun keeps the last verified tree as a lower bound.
    int depth = 0;
    ShatteredTree last;
    while (true) {
      ShatteredTree tree;
      tree.depth = depth + 1;
      tree.nodes.assign(std::size_t(1) << (depth + 1), Site{});
      tree.leaf_witnesses.assign(std::size_t(1) << (depth + 1), policy::Param{});
      bool found;
      try {
        found = build(all, depth + 1, 1, tree);
      } catch (const BudgetExceeded&) {
        result.exact = false;
        break;
      }
      if (!found) {
        result.exact = true;
        break;
      }
      ++depth;
      last = std::move(tree);
    }
    result.value = depth;
    result.witness = depth == 0 ? ShatteredTree{} : last;
    return result;
  }

 private:
  // Can `version` shatter a complete tree of the given depth? On success the
  // node sites and leaf witnesses are written into `tree` at heap position v.
  bool build(const Bits& version, int depth, std::size_t v, ShatteredTree& tree) {
    if (++nodes_ > node_budget_) throw BudgetExceeded{};
    if (depth == 0) {
      for (std::size_t p = 0; p < cls_->params.size(); ++p) {
        if (version[p / 64] >> (p % 64) & 1) {
          write_leaf_witnesses(v, tree, cls_->params[p]);
          return true;
        }
      }
      return false;
    }
    // Failing to shatter depth d rules out every depth >= d.
    auto memo = fail_memo_.find(version);
    if (memo != fail_memo_.end() && memo->second <= depth) return false;
    for (std::size_t k = 0; k < cls_->sites.size(); ++k) {
      Bits v0(words_, 0), v1(words_, 0);
      bool any0 = false, any1 = false;
      for (std::size_t p = 0; p < cls_->params.size(); ++p) {
        if (!(version[p / 64] >> (p % 64) & 1)) continue;
        if (cls_->action(p, k) == 0) {
          v0[p / 64] |= 1ULL << (p % 64);
          any0 = true;
        } else {
          v1[p / 64] |= 1ULL << (p % 64);
          any1 = true;
        }
      }
      if (!any0 || !any1) continue;
      if (build(v0, depth - 1, 2 * v, tree) && build(v1, depth - 1, 2 * v + 1, tree)) {
        tree.nodes[v] = cls_->sites[k];
        return true;
      }
    }
    auto [it, inserted] = fail_memo_.try_emplace(version, depth);
    if (!inserted) it->second = std::min(it->second, depth);
    return false;
  }

  // A leaf of the search corresponds to a whole subtree of remaining depth 0;
  // fill every tree leaf below heap node v with the chosen parameter.
  void write_leaf_witnesses(std::size_t v, ShatteredTree& tree, const policy::Param& p) {
    const std::size_t total = std::size_t(1) << tree.depth;
    std::size_t lo = v, hi = v;
    while (hi < total) {
      lo = 2 * lo;
      hi = 2 * hi + 1;
    }
    for (std::size_t leaf = lo; leaf <= hi; ++leaf) tree.leaf_witnesses[leaf - total] = p;
  }

  const EnumeratedClass* cls_;
  std::size_t words_ = 0;
  std::unordered_map<Bits, int, BitsHash> fail_memo_;  // version -> shallowest failed depth
  std::size_t nodes_ = 0;
  std::size_t node_budget_;
};

}  // namespace

LittlestoneResult littlestone_dim_exact(const policy::PolicySpace& space,
                                        const std::vector<Site>& site_universe,
                                        const SearchLimits& limits) {
  if (policy::num_actions(space) != 2)
    throw NotAvailableError("shattering search requires a binary action space");
  EnumeratedClass cls = EnumeratedClass::build(space, site_universe, limits.enum_limit);
  LittlestoneSearch search(cls, limits.node_budget);
  return search.run();
}

bool validate_shattered(const policy::PolicySpace& space, const ShatteredTree& tree) {
  if (tree.depth == 0) return true;
  const std::size_t leaves = std::size_t(1) << tree.depth;
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    const policy::Param& witness = tree.leaf_witnesses[leaf];
    for (int level = 0; level < tree.depth; ++level) {
      const Site site = tree.node_at_level(leaf, level);
      if (policy::policy_action(space, witness, site) != tree.label_at_level(leaf, level))
        return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bisection witness for 1-d thresholds

ThresholdShatterTree threshold_shatter_witness(int depth) {
  if (depth < 1) throw ConfigError("depth must be at least 1");
  ThresholdShatterTree t;
  t.depth = depth;
  const std::size_t leaves = std::size_t(1) << depth;
  t.cut.assign(2 * leaves, Rational(0));
  t.leaf_interval.resize(leaves);
  t.leaf_witness.resize(leaves);
  // Intervals per heap node; label 1 keeps the upper half (action is
  // 1{theta > midpoint}), label 0 the closed lower half.
  std::vector<std::pair<Rational, Rational>> interval(2 * leaves);
  interval[1] = {Rational(0), Rational(1)};
  for (std::size_t v = 1; v < leaves; ++v) {
    const auto& [lo, hi] = interval[v];
    const Rational mid = (lo + hi) / 2;
    t.cut[v] = mid;
    interval[2 * v] = {lo, mid};
    interval[2 * v + 1] = {mid, hi};
  }
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    const auto& [lo, hi] = interval[leaves + leaf];
    t.leaf_interval[leaf] = {lo, hi};
    t.leaf_witness[leaf] = (lo + hi) / 2;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Random-feature packing experiment

PackingExperimentReport random_feature_experiment(double eps,
                                                  const std::vector<std::vector<double>>& packing,
                                                  double delta, int trials,
                                                  std::uint64_t seed) {
  if (eps <= 0 || delta <= 0 || delta >= 1 || trials <= 0)
    throw ConfigError("eps, delta and trials must be positive (delta < 1)");
  const std::size_t n = packing.size();
  if (n == 0) throw ConfigError("empty packing");
  const std::size_t d = packing[0].size();
  for (const auto& theta : packing) {
    if (theta.size() != d) throw ConfigError("packing vectors have mixed dimensions");
    double norm2 = 0;
    for (double x : theta) norm2 += x * x;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
      throw ConfigError("packing vector is not on the unit sphere");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist2 = 0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = packing[i][k] - packing[j][k];
        dist2 += diff * diff;
      }
      if (std::sqrt(dist2) < eps - 1e-12)
        throw ConfigError("packing separation below the required radius");
    }
  }

  PackingExperimentReport report;
  report.bound = 4.0 * M_PI / eps * std::log(static_cast<double>(n) / delta);
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::pair<std::size_t, std::size_t>> open;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) open.push_back({i, j});
    int length = 0;
    while (!open.empty()) {
      std::vector<double> phi(d);
      for (double& x : phi) x = gauss(rng);
      auto side = [&](std::size_t idx) {
        double dot = 0;
        for (std::size_t k = 0; k < d; ++k) dot += packing[idx][k] * phi[k];
        return dot > 0;
      };
      bool split_any = false;
      std::vector<std::pair<std::size_t, std::size_t>> still;
      for (const auto& [i, j] : open) {
        if (side(i) != side(j))
          split_any = true;
        else
          still.push_back({i, j});
      }
      if (split_any) {
        ++length;  // the feature is independent of the sequence so far
        open = std::move(still);
      }
    }
    report.lengths.push_back(length);
    if (length > report.bound) ++report.exceed_count;
  }
  report.exceed_fraction =
      static_cast<double>(report.exceed_count) / static_cast<double>(trials);
  return report;
}

int fourier_dim_bound(std::vector<std::uint32_t> support) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  return static_cast<int>(support.size());
}

}  // namespace complexity
}  // namespace eluder
