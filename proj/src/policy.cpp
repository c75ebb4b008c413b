#include "eluder/policy.hpp"

#include <algorithm>
#include <bit>

#include "eluder/feasibility.hpp"

namespace eluder {
namespace policy {

namespace {

std::string site_str(Site site) {
  return "(" + std::to_string(site.s) + "," + std::to_string(site.h) + ")";
}

}  // namespace

std::uint64_t Gf2LinearClass::feature(Site site) const {
  if (live) return live(site);
  if (table) {
    auto it = table->find(site);
    if (it != table->end()) return it->second;
  }
  throw ContractError("no feature vector at " + site_str(site));
}

const ThresholdFeature& LinearThresholdClass::feature(Site site) const {
  if (table) {
    auto it = table->find(site);
    if (it != table->end()) return it->second;
  }
  throw ContractError("no feature vector at " + site_str(site));
}

std::uint32_t FourierSupportClass::point(Site site) const {
  if (points) {
    auto it = points->find(site);
    if (it != points->end()) return it->second;
  }
  throw ContractError("no hypercube point at " + site_str(site));
}

int num_actions(const PolicySpace& space) {
  return std::visit(
      [](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FiniteClass>) return c.num_actions;
        if constexpr (std::is_same_v<T, TabularAllClass>) return c.num_actions;
        return 2;
      },
      space);
}

PolicySpace shift_epochs(const PolicySpace& space, Epoch delta) {
  return std::visit(
      [&](const auto& c) -> PolicySpace {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FiniteClass>) {
          FiniteClass out = c;
          for (auto& table : out.policies) {
            SiteActionTable shifted;
            for (const auto& [site, a] : table) shifted[{site.s, site.h + delta}] = a;
            table = std::move(shifted);
          }
          return out;
        } else if constexpr (std::is_same_v<T, TabularAllClass>) {
          TabularAllClass out = c;
          out.horizon += delta;
          return out;
        } else if constexpr (std::is_same_v<T, Gf2LinearClass>) {
          if (c.live) throw ContractError("cannot shift a live feature source");
          Gf2LinearClass out = c;
          auto shifted = std::make_shared<Gf2FeatureTable>();
          if (c.table)
            for (const auto& [site, f] : *c.table) (*shifted)[{site.s, site.h + delta}] = f;
          out.table = shifted;
          return out;
        } else if constexpr (std::is_same_v<T, LinearThresholdClass>) {
          LinearThresholdClass out = c;
          auto shifted = std::make_shared<ThresholdFeatureTable>();
          if (c.table)
            for (const auto& [site, f] : *c.table) (*shifted)[{site.s, site.h + delta}] = f;
          out.table = shifted;
          return out;
        } else {
          FourierSupportClass out = c;
          auto shifted = std::make_shared<CubePointTable>();
          if (c.points)
            for (const auto& [site, p] : *c.points) (*shifted)[{site.s, site.h + delta}] = p;
          out.points = shifted;
          return out;
        }
      },
      space);
}

// ---------------------------------------------------------------------------
// Parameter evaluation

namespace {

int chi_sign(std::uint32_t subset, std::uint32_t point) {
  // Product of coordinates in `subset`; bit set in `point` means -1.
  return (std::popcount(subset & point) & 1) ? -1 : 1;
}

Rational threshold_margin(const ThresholdParam& theta, const ThresholdFeature& f) {
  Rational dot = 0;
  for (std::size_t i = 0; i < f.phi.size() && i < theta.theta.size(); ++i)
    dot += theta.theta[i] * f.phi[i];
  return dot - f.c;
}

std::size_t point_index(std::uint32_t point) { return point; }

}  // namespace

ActionId policy_action(const PolicySpace& space, const Param& theta, Site site) {
  if (const auto* c = std::get_if<FiniteClass>(&space)) {
    const auto& p = std::get<FiniteParam>(theta);
    if (p.index >= c->policies.size()) throw ContractError("policy index out of range");
    auto it = c->policies[p.index].find(site);
    if (it == c->policies[p.index].end())
      throw ContractError("policy undefined at " + site_str(site));
    return it->second;
  }
  if (std::holds_alternative<TabularAllClass>(space)) {
    const auto& p = std::get<TabularParam>(theta);
    auto it = p.overrides.find(site);
    return it == p.overrides.end() ? p.default_action : it->second;
  }
  if (const auto* c = std::get_if<Gf2LinearClass>(&space)) {
    const auto& p = std::get<Gf2Param>(theta);
    return gf2::dot(p.mask, c->feature(site));
  }
  if (const auto* c = std::get_if<LinearThresholdClass>(&space)) {
    const auto& p = std::get<ThresholdParam>(theta);
    return threshold_margin(p, c->feature(site)) > 0 ? 1 : 0;
  }
  const auto& c = std::get<FourierSupportClass>(space);
  const auto& p = std::get<FourierParam>(theta);
  return (p.truth >> point_index(c.point(site))) & 1;
}

bool distinguishable(const PolicySpace& space, const Param& theta1, const Param& theta2,
                     const UncertaintyItem& item) {
  if (item.a1 == item.a2) throw ContractError("item actions must differ");
  return policy_action(space, theta1, item.site()) == item.a1 &&
         policy_action(space, theta2, item.site()) == item.a2;
}

std::vector<Param> enumerate_params(const PolicySpace& space, std::size_t limit) {
  std::vector<Param> out;
  if (const auto* c = std::get_if<FiniteClass>(&space)) {
    if (c->policies.size() > limit) throw NotAvailableError("finite class exceeds limit");
    for (std::size_t i = 0; i < c->policies.size(); ++i) out.push_back(FiniteParam{i});
    return out;
  }
  if (const auto* c = std::get_if<TabularAllClass>(&space)) {
    const long sites = static_cast<long>(c->num_states) * c->horizon;
    double total = 1;
    for (long i = 0; i < sites; ++i) {
      total *= c->num_actions;
      if (total > static_cast<double>(limit))
        throw NotAvailableError("tabular class exceeds limit");
    }
    std::vector<ActionId> digits(sites, 0);
    while (true) {
      TabularParam p;
      for (StateId s = 0; s < c->num_states; ++s)
        for (Epoch h = 0; h < c->horizon; ++h)
          p.overrides[{s, h}] = digits[s * c->horizon + h];
      out.push_back(std::move(p));
      long i = 0;
      for (; i < sites; ++i) {
        if (++digits[i] < c->num_actions) break;
        digits[i] = 0;
      }
      if (i == sites) break;
    }
    return out;
  }
  if (const auto* c = std::get_if<Gf2LinearClass>(&space)) {
    if (c->dim >= 63 || (1ULL << c->dim) > limit)
      throw NotAvailableError("field-linear class exceeds limit");
    for (std::uint64_t m = 0; m < (1ULL << c->dim); ++m) out.push_back(Gf2Param{m});
    return out;
  }
  if (const auto* c = std::get_if<FourierSupportClass>(&space)) {
    if (c->cube_dim > 4)
      throw NotAvailableError("hypercube function class enumerable only up to dimension 4");
    const int npoints = 1 << c->cube_dim;
    if ((1ULL << npoints) > limit)
      throw NotAvailableError("hypercube function class exceeds limit");
    // Keep exactly the sign vectors whose correlation with every basis
    // function outside the support family vanishes.
    std::vector<std::uint32_t> off_support;
    for (std::uint32_t s = 0; s < (1u << c->cube_dim); ++s) {
      if (std::find(c->support.begin(), c->support.end(), s) == c->support.end())
        off_support.push_back(s);
    }
    for (std::uint64_t truth = 0; truth < (1ULL << npoints); ++truth) {
      bool ok = true;
      for (std::uint32_t s : off_support) {
        int corr = 0;
        for (int p = 0; p < npoints; ++p) {
          const int fval = ((truth >> p) & 1) ? 1 : -1;
          corr += fval * chi_sign(s, static_cast<std::uint32_t>(p));
        }
        if (corr != 0) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(FourierParam{truth});
    }
    return out;
  }
  throw NotAvailableError("class is not enumerable");
}

bool is_dependent(const PolicySpace& space, const UncertaintyItem& x,
                  const std::vector<UncertaintyItem>& history, std::size_t enum_limit) {
  const std::vector<Param> params = enumerate_params(space, enum_limit);
  // Cache actions at the sites involved.
  std::vector<Site> sites{x.site()};
  for (const auto& it : history) sites.push_back(it.site());
  std::vector<std::vector<ActionId>> act(params.size(),
                                         std::vector<ActionId>(sites.size()));
  for (std::size_t p = 0; p < params.size(); ++p)
    for (std::size_t k = 0; k < sites.size(); ++k)
      act[p][k] = policy_action(space, params[p], sites[k]);

  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = 0; j < params.size(); ++j) {
      if (act[i][0] != x.a1 || act[j][0] != x.a2) continue;  // must distinguish x
      bool indistinguishable_on_history = true;
      for (std::size_t k = 0; k < history.size(); ++k) {
        if (act[i][k + 1] == history[k].a1 && act[j][k + 1] == history[k].a2) {
          indistinguishable_on_history = false;
          break;
        }
      }
      if (indistinguishable_on_history) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// OracleSession base

std::vector<ActionId> OracleSession::actions(Site site) {
  ++calls_;
  max_constraints_seen_ = std::max(max_constraints_seen_, num_constraints_);
  auto it = cache_.find(site);
  if (it != cache_.end()) return it->second;
  ++solver_calls_;
  std::vector<ActionId> result = query(site);
  std::sort(result.begin(), result.end());
  if (result.empty())
    throw ContractError("elimination oracle: all policies eliminated at " + site_str(site));
  cache_.emplace(site, result);
  return result;
}

void OracleSession::forbid(Site site, ActionId a) {
  apply(site, a);
  ++num_constraints_;
  cache_.clear();
}

namespace {

// ---- explicit policy list ----

class FiniteOracle final : public OracleSession {
 public:
  explicit FiniteOracle(const FiniteClass& c) : class_(&c), alive_(c.policies.size(), true) {}

  std::optional<Param> witness(Site site, ActionId a) const override {
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (!alive_[i]) continue;
      auto it = class_->policies[i].find(site);
      if (it != class_->policies[i].end() && it->second == a) return FiniteParam{i};
    }
    return std::nullopt;
  }

 protected:
  std::vector<ActionId> query(Site site) override {
    std::vector<ActionId> out;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (!alive_[i]) continue;
      auto it = class_->policies[i].find(site);
      if (it == class_->policies[i].end())
        throw ContractError("policy undefined at " + site_str(site));
      if (std::find(out.begin(), out.end(), it->second) == out.end())
        out.push_back(it->second);
    }
    return out;
  }

  void apply(Site site, ActionId a) override {
    bool any = false;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (!alive_[i]) continue;
      auto it = class_->policies[i].find(site);
      if (it != class_->policies[i].end() && it->second == a)
        alive_[i] = false;
      else
        any = true;
    }
    if (!any)
      throw ContractError("elimination oracle: constraint at " + site_str(site) +
                          " eliminated every policy");
  }

 private:
  const FiniteClass* class_;
  std::vector<bool> alive_;
};

// ---- all tabular policies ----
// Constraints at different sites are independent, so the realizable set at a
// site is just the action set minus the actions forbidden there.

class TabularOracle final : public OracleSession {
 public:
  explicit TabularOracle(const TabularAllClass& c) : class_(&c) {}

  std::optional<Param> witness(Site site, ActionId a) const override {
    TabularParam p;
    for (const auto& [st, forb] : forbidden_) {
      ActionId pick = -1;
      for (ActionId cand = 0; cand < class_->num_actions; ++cand) {
        if (std::find(forb.begin(), forb.end(), cand) == forb.end()) {
          pick = cand;
          break;
        }
      }
      if (pick < 0) return std::nullopt;
      p.overrides[st] = pick;
    }
    p.overrides[site] = a;
    return p;
  }

 protected:
  std::vector<ActionId> query(Site site) override {
    std::vector<ActionId> out;
    auto it = forbidden_.find(site);
    for (ActionId a = 0; a < class_->num_actions; ++a) {
      if (it != forbidden_.end() &&
          std::find(it->second.begin(), it->second.end(), a) != it->second.end())
        continue;
      out.push_back(a);
    }
    return out;
  }

  void apply(Site site, ActionId a) override {
    auto& forb = forbidden_[site];
    if (std::find(forb.begin(), forb.end(), a) == forb.end()) forb.push_back(a);
    if (static_cast<int>(forb.size()) >= class_->num_actions)
      throw ContractError("elimination oracle: every action forbidden at " + site_str(site));
  }

 private:
  const TabularAllClass* class_;
  std::unordered_map<Site, std::vector<ActionId>, SiteHash> forbidden_;
};

// ---- linear policies over the two-element field ----
// Forbidding action a at phi pins <theta, phi> = 1-a; the surviving class is
// the solution set of the accumulated affine system, kept in echelon form.

class Gf2Oracle final : public OracleSession {
 public:
  explicit Gf2Oracle(const Gf2LinearClass& c) : class_(&c) {}

  std::optional<Param> witness(Site site, ActionId a) const override {
    auto sol = system_.solution_with(class_->feature(site), a);
    if (!sol) return std::nullopt;
    return Gf2Param{*sol};
  }

 protected:
  std::vector<ActionId> query(Site site) override {
    const std::uint64_t phi = class_->feature(site);
    std::vector<ActionId> out;
    for (int v = 0; v <= 1; ++v)
      if (system_.consistent_with(phi, v)) out.push_back(v);
    return out;
  }

  void apply(Site site, ActionId a) override {
    if (a != 0 && a != 1) throw ContractError("binary action class");
    const auto res = system_.append(class_->feature(site), 1 - a);
    if (res == gf2::Echelon::AppendResult::kInconsistent)
      throw ContractError("elimination oracle: constraint at " + site_str(site) +
                          " eliminated every policy");
  }

 private:
  const Gf2LinearClass* class_;
  gf2::Echelon system_;
};

// ---- linear threshold policies ----
// Forbidding action 1 at (phi, c) keeps <theta, phi> <= c; forbidding 0 keeps
// <theta, phi> > c. A query asks for feasibility of the accumulated system
// plus the matching inequality at the query site, solved exactly; every
// feasible answer comes with a witness that is re-checked by evaluation.

class ThresholdOracle final : public OracleSession {
 public:
  explicit ThresholdOracle(const LinearThresholdClass& c) : class_(&c) {}

  std::optional<Param> witness(Site site, ActionId a) const override {
    auto theta = solve_with(class_->feature(site), a);
    if (!theta) return std::nullopt;
    return ThresholdParam{*theta};
  }

 protected:
  std::vector<ActionId> query(Site site) override {
    const ThresholdFeature& f = class_->feature(site);
    std::vector<ActionId> out;
    for (ActionId a = 0; a <= 1; ++a) {
      auto theta = solve_with(f, a);
      if (!theta) continue;
      verify(ThresholdParam{*theta}, f, a, site);
      out.push_back(a);
    }
    return out;
  }

  void apply(Site site, ActionId a) override {
    if (a != 0 && a != 1) throw ContractError("binary action class");
    const ThresholdFeature& f = class_->feature(site);
    rows_.push_back(make_row(f, 1 - a));
    kept_.push_back({f, 1 - a});
    if (!lp::find_point(class_->dim, rows_))
      throw ContractError("elimination oracle: constraint at " + site_str(site) +
                          " eliminated every policy");
  }

 private:
  static lp::HalfSpace make_row(const ThresholdFeature& f, ActionId kept_action) {
    lp::HalfSpace row;
    if (kept_action == 1) {  // <theta, phi> > c
      row.coeffs = f.phi;
      row.rhs = f.c;
      row.strict = true;
    } else {  // <theta, phi> <= c
      row.coeffs.reserve(f.phi.size());
      for (const Rational& x : f.phi) row.coeffs.push_back(-x);
      row.rhs = -f.c;
      row.strict = false;
    }
    return row;
  }

  std::optional<std::vector<Rational>> solve_with(const ThresholdFeature& f,
                                                  ActionId a) const {
    std::vector<lp::HalfSpace> rows = rows_;
    rows.push_back(make_row(f, a));
    return lp::find_point(class_->dim, rows);
  }

  void verify(const ThresholdParam& theta, const ThresholdFeature& f, ActionId a,
              Site site) const {
    auto act = [&](const ThresholdFeature& g) {
      Rational dot = 0;
      for (std::size_t i = 0; i < g.phi.size() && i < theta.theta.size(); ++i)
        dot += theta.theta[i] * g.phi[i];
      return dot > g.c ? 1 : 0;
    };
    if (act(f) != a)
      throw std::logic_error("threshold witness takes the wrong action at " + site_str(site));
    for (const auto& [g, kept] : kept_)
      if (act(g) != kept) throw std::logic_error("threshold witness violates a constraint");
  }

  const LinearThresholdClass* class_;
  std::vector<lp::HalfSpace> rows_;
  std::vector<std::pair<ThresholdFeature, ActionId>> kept_;  // (feature, forced action)
};

// ---- small-Fourier-support functions ----
// Works on the coefficient vector over the support family: each constraint
// pins the function value at a hypercube point, a linear equation in the
// coefficients. This drops the requirement that the function be sign-valued
// elsewhere, so the realizable set can be over-approximated; the enumeration
// cross-check lives in the dimension tooling.

class RationalEchelon {
 public:
  enum class AppendResult { kInserted, kRedundant, kInconsistent };

  AppendResult append(std::vector<Rational> lhs, Rational rhs) {
    reduce(lhs, rhs);
    const int p = pivot(lhs);
    if (p < 0) return rhs == 0 ? AppendResult::kRedundant : AppendResult::kInconsistent;
    const Rational scale = lhs[p];
    for (auto& x : lhs) x /= scale;
    rhs /= scale;
    for (auto& row : rows_) {
      if (row.lhs[p] != 0) {
        const Rational f = row.lhs[p];
        for (std::size_t j = 0; j < lhs.size(); ++j) row.lhs[j] -= f * lhs[j];
        row.rhs -= f * rhs;
      }
    }
    rows_.push_back({std::move(lhs), std::move(rhs), p});
    return AppendResult::kInserted;
  }

  bool consistent_with(std::vector<Rational> lhs, Rational rhs) const {
    reduce(lhs, rhs);
    return pivot(lhs) >= 0 || rhs == 0;
  }

 private:
  struct Row {
    std::vector<Rational> lhs;
    Rational rhs;
    int pivot_col;
  };

  static int pivot(const std::vector<Rational>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) return static_cast<int>(i);
    return -1;
  }

  void reduce(std::vector<Rational>& lhs, Rational& rhs) const {
    for (const Row& row : rows_) {
      const Rational f = lhs[row.pivot_col];
      if (f == 0) continue;
      for (std::size_t j = 0; j < lhs.size(); ++j) lhs[j] -= f * row.lhs[j];
      rhs -= f * row.rhs;
    }
  }

  std::vector<Row> rows_;
};

class FourierOracle final : public OracleSession {
 public:
  explicit FourierOracle(const FourierSupportClass& c) : class_(&c) {}

  std::optional<Param> witness(Site, ActionId) const override { return std::nullopt; }

 protected:
  std::vector<ActionId> query(Site site) override {
    const std::vector<Rational> v = basis_row(class_->point(site));
    std::vector<ActionId> out;
    if (system_.consistent_with(v, Rational(-1))) out.push_back(0);
    if (system_.consistent_with(v, Rational(1))) out.push_back(1);
    return out;
  }

  void apply(Site site, ActionId a) override {
    if (a != 0 && a != 1) throw ContractError("binary action class");
    // Forbidden value a means the sign-valued function equals the opposite.
    const Rational forced = a == 1 ? Rational(-1) : Rational(1);
    const auto res = system_.append(basis_row(class_->point(site)), forced);
    if (res == RationalEchelon::AppendResult::kInconsistent)
      throw ContractError("elimination oracle: constraint at " + site_str(site) +
                          " eliminated every policy");
  }

 private:
  std::vector<Rational> basis_row(std::uint32_t point) const {
    std::vector<Rational> v;
    v.reserve(class_->support.size());
    for (std::uint32_t s : class_->support) v.emplace_back(chi_sign(s, point));
    return v;
  }

  const FourierSupportClass* class_;
  RationalEchelon system_;
};

}  // namespace

std::unique_ptr<OracleSession> make_oracle(const PolicySpace& space) {
  return std::visit(
      [](const auto& c) -> std::unique_ptr<OracleSession> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FiniteClass>)
          return std::make_unique<FiniteOracle>(c);
        else if constexpr (std::is_same_v<T, TabularAllClass>)
          return std::make_unique<TabularOracle>(c);
        else if constexpr (std::is_same_v<T, Gf2LinearClass>)
          return std::make_unique<Gf2Oracle>(c);
        else if constexpr (std::is_same_v<T, LinearThresholdClass>)
          return std::make_unique<ThresholdOracle>(c);
        else
          return std::make_unique<FourierOracle>(c);
      },
      space);
}

std::vector<ActionId> elimination_oracle(const PolicySpace& space, const ConstraintSet& z,
                                         Site site) {
  auto oracle = make_oracle(space);
  for (const Constraint& c : z.items()) oracle->forbid(c.site(), c.a);
  return oracle->actions(site);
}

}  // namespace policy
}  // namespace eluder
