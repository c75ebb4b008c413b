#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "eluder/gf2.hpp"
#include "eluder/rational.hpp"
#include "eluder/types.hpp"

namespace eluder {
namespace policy {

// An unresolved action disagreement: the active class can take either a1 or
// a2 at (s, h). Always a1 != a2.
struct UncertaintyItem {
  StateId s = 0;
  ActionId a1 = 0;
  ActionId a2 = 0;
  Epoch h = 0;

  Site site() const { return {s, h}; }
  friend bool operator==(const UncertaintyItem& x, const UncertaintyItem& y) {
    return x.s == y.s && x.a1 == y.a1 && x.a2 == y.a2 && x.h == y.h;
  }
};

// "Surviving policies must not take action a at (s, h)."
struct Constraint {
  StateId s = 0;
  ActionId a = 0;
  Epoch h = 0;

  Site site() const { return {s, h}; }
  friend bool operator==(const Constraint& x, const Constraint& y) {
    return x.s == y.s && x.a == y.a && x.h == y.h;
  }
};

// Append-only list of eliminated (state, action, epoch) triples, indexed by
// site for constant-time retrieval during oracle queries.
class ConstraintSet {
 public:
  void append(const Constraint& c) {
    items_.push_back(c);
    by_site_[c.site()].push_back(c.a);
  }
  const std::vector<Constraint>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  const std::vector<ActionId>* forbidden_at(Site site) const {
    auto it = by_site_.find(site);
    return it == by_site_.end() ? nullptr : &it->second;
  }

 private:
  std::vector<Constraint> items_;
  std::unordered_map<Site, std::vector<ActionId>, SiteHash> by_site_;
};

// ---------------------------------------------------------------------------
// Policy class descriptors

using SiteActionTable = std::unordered_map<Site, ActionId, SiteHash>;

// Explicit list of policies given as (s, h) -> action tables.
struct FiniteClass {
  int num_actions = 2;
  std::vector<SiteActionTable> policies;
};

// All deterministic maps over the given state/action/horizon box.
struct TabularAllClass {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
};

using Gf2FeatureTable = std::unordered_map<Site, std::uint64_t, SiteHash>;

// Binary-action linear policies over the two-element field: the action at a
// site is <theta, phi(site)> with arithmetic mod 2.
struct Gf2LinearClass {
  int dim = 0;
  std::shared_ptr<const Gf2FeatureTable> table;
  // Optional live source; takes precedence over the table when set. Used by
  // environments that reveal features on first visit.
  std::function<std::uint64_t(Site)> live;

  std::uint64_t feature(Site site) const;
};

struct ThresholdFeature {
  std::vector<Rational> phi;
  Rational c;
};

using ThresholdFeatureTable = std::unordered_map<Site, ThresholdFeature, SiteHash>;

// Binary-action halfspace policies: action 1 iff <theta, phi(site)> > c(site).
struct LinearThresholdClass {
  int dim = 0;
  std::shared_ptr<const ThresholdFeatureTable> table;

  const ThresholdFeature& feature(Site site) const;
};

using CubePointTable = std::unordered_map<Site, std::uint32_t, SiteHash>;

// Sign-valued functions on the hypercube {-1,1}^cube_dim whose Fourier mass
// lies on the given support family. Points are encoded with bit i set iff
// coordinate i equals -1. Action 1 corresponds to function value +1.
struct FourierSupportClass {
  int cube_dim = 0;
  std::vector<std::uint32_t> support;  // subset masks over [cube_dim]
  std::shared_ptr<const CubePointTable> points;

  std::uint32_t point(Site site) const;
};

using PolicySpace = std::variant<FiniteClass, TabularAllClass, Gf2LinearClass,
                                 LinearThresholdClass, FourierSupportClass>;

int num_actions(const PolicySpace& space);

// Shifts every site's epoch by delta (used when an environment gains a
// synthetic start epoch). Table-backed classes only.
PolicySpace shift_epochs(const PolicySpace& space, Epoch delta);

// ---------------------------------------------------------------------------
// Parameters

struct FiniteParam {
  std::size_t index = 0;
};
struct TabularParam {
  ActionId default_action = 0;
  SiteActionTable overrides;
};
struct Gf2Param {
  std::uint64_t mask = 0;
};
struct ThresholdParam {
  std::vector<Rational> theta;
};
struct FourierParam {
  std::uint64_t truth = 0;  // bit p set iff f(point p) = +1
};

using Param =
    std::variant<FiniteParam, TabularParam, Gf2Param, ThresholdParam, FourierParam>;

ActionId policy_action(const PolicySpace& space, const Param& theta, Site site);

// True iff theta1 takes a1 and theta2 takes a2 at the item's site.
bool distinguishable(const PolicySpace& space, const Param& theta1, const Param& theta2,
                     const UncertaintyItem& item);

// All parameters of an enumerable class, at most `limit` of them.
std::vector<Param> enumerate_params(const PolicySpace& space, std::size_t limit = 1u << 20);

// True iff every parameter pair that agrees (is indistinguishable) on the
// whole history also agrees on x. Exhaustive over parameter pairs.
bool is_dependent(const PolicySpace& space, const UncertaintyItem& x,
                  const std::vector<UncertaintyItem>& history,
                  std::size_t enum_limit = 1u << 20);

// ---------------------------------------------------------------------------
// Elimination oracles

// Incremental oracle for one run: constraints are appended one at a time and
// queries return the set of actions still realizable at a site, ascending.
// Queries are cached until the next constraint lands; every query (cached or
// not) is counted. Throws ContractError when the class empties out. The
// session holds a reference into the space it was built from, which must
// outlive it.
class OracleSession {
 public:
  virtual ~OracleSession() = default;

  std::vector<ActionId> actions(Site site);
  void forbid(Site site, ActionId a);

  // A surviving parameter taking `a` at `site`, when the class can produce
  // one cheaply (not available for the relaxed Fourier oracle).
  virtual std::optional<Param> witness(Site site, ActionId a) const = 0;

  long calls() const { return calls_; }
  long solver_calls() const { return solver_calls_; }
  std::size_t num_constraints() const { return num_constraints_; }
  std::size_t max_constraints_seen() const { return max_constraints_seen_; }

 protected:
  virtual std::vector<ActionId> query(Site site) = 0;
  virtual void apply(Site site, ActionId a) = 0;

 private:
  std::unordered_map<Site, std::vector<ActionId>, SiteHash> cache_;
  long calls_ = 0;
  long solver_calls_ = 0;
  std::size_t num_constraints_ = 0;
  std::size_t max_constraints_seen_ = 0;
};

std::unique_ptr<OracleSession> make_oracle(const PolicySpace& space);

// One-shot oracle query under an explicit constraint list.
std::vector<ActionId> elimination_oracle(const PolicySpace& space, const ConstraintSet& z,
                                         Site site);

// Oracle plus the constraint list it has absorbed; owned by a single run.
class ActivePolicySet {
 public:
  explicit ActivePolicySet(const PolicySpace& space) : oracle_(make_oracle(space)) {}

  std::vector<ActionId> actions(Site site) { return oracle_->actions(site); }
  void eliminate(Site site, ActionId a) {
    z_.append({site.s, a, site.h});
    oracle_->forbid(site, a);
  }
  const ConstraintSet& constraints() const { return z_; }
  const OracleSession& oracle() const { return *oracle_; }

 private:
  std::unique_ptr<OracleSession> oracle_;
  ConstraintSet z_;
};

}  // namespace policy
}  // namespace eluder
