#include "eluder/instance_gen.hpp"

#include <cmath>
#include <random>

#include "eluder/gf2.hpp"

namespace eluder {
namespace gen {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

int gf2_rank_of(const policy::Gf2FeatureTable& table) {
  std::vector<std::uint64_t> vecs;
  vecs.reserve(table.size());
  for (const auto& [site, phi] : table) vecs.push_back(phi);
  return gf2::rank(vecs);
}

}  // namespace

DetInstance random_det_instance(std::uint64_t seed, int horizon, int num_states, int dim) {
  std::mt19937_64 rng(mix(seed, 0xdecaf));
  const std::uint64_t mask = (1ULL << dim) - 1;

  auto features = std::make_shared<policy::Gf2FeatureTable>();
  for (StateId s = 0; s < num_states; ++s)
    for (Epoch h = 0; h < horizon; ++h) (*features)[{s, h}] = rng() & mask;

  const std::uint64_t theta_star = rng() & mask;

  DetInstance inst;
  inst.theta_star = theta_star;
  inst.mdp.horizon = horizon;
  inst.mdp.num_states = num_states;
  inst.mdp.num_actions = 2;
  inst.mdp.start = 0;
  // Unit bonus on the planted action plus noise below 1/(4H) keeps the
  // planted action strictly optimal at every site.
  const long noise_den = 64L * horizon;
  for (StateId s = 0; s < num_states; ++s) {
    for (Epoch h = 0; h < horizon; ++h) {
      const ActionId best = gf2::dot(theta_star, features->at({s, h}));
      for (ActionId a = 0; a < 2; ++a) {
        const long k = static_cast<long>(rng() % 16);
        inst.mdp.reward[{s, a, h}] = Rational(a == best ? 1 : 0) + Rational(k, noise_den);
        if (h + 1 < horizon)
          inst.mdp.next[{s, a, h}] = static_cast<StateId>(rng() % num_states);
      }
    }
  }
  inst.mdp.reward_bound = env::max_total_reward(inst.mdp);
  env::validate(inst.mdp);

  policy::Gf2LinearClass cls;
  cls.dim = dim;
  cls.table = features;
  inst.space = cls;
  inst.dim_e = gf2_rank_of(*features);
  return inst;
}

DetInstance random_det_instance(std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 0xd37));
  const int horizon = 2 + static_cast<int>(rng() % 5);
  const int dim = 2 + static_cast<int>(rng() % 5);
  const int states = 4 + static_cast<int>(rng() % 61);
  return random_det_instance(seed, horizon, states, dim);
}

StochInstance random_stoch_instance(std::uint64_t seed, int horizon, int num_states,
                                    int dim) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(mix(seed, 0x570c + attempt));
    const std::uint64_t mask = (1ULL << dim) - 1;

    auto features = std::make_shared<policy::Gf2FeatureTable>();
    for (StateId s = 0; s < num_states; ++s)
      for (Epoch h = 0; h < horizon; ++h) (*features)[{s, h}] = rng() & mask;
    const std::uint64_t theta_star = rng() & mask;

    StochInstance inst;
    inst.theta_star = theta_star;
    inst.sim.horizon = horizon;
    inst.sim.num_states = num_states;
    inst.sim.num_actions = 2;
    inst.sim.start = 0;
    // Bonus 2/5 on the planted action; reward noise is a fair two-point
    // distribution below 1/(8H), small enough to keep the advantage over 1/5.
    const Rational bonus(2, 5);
    const long noise_den = 128L * horizon;
    for (StateId s = 0; s < num_states; ++s) {
      for (Epoch h = 0; h < horizon; ++h) {
        const ActionId best = gf2::dot(theta_star, features->at({s, h}));
        for (ActionId a = 0; a < 2; ++a) {
          const Rational base = a == best ? bonus : Rational(0);
          const Rational nu(static_cast<long>(rng() % 16), noise_den);
          env::RewardDistribution rd;
          if (nu == 0) {
            rd = env::RewardDistribution::atomic(base);
          } else {
            rd.atoms = {{base, Rational(1, 2)}, {base + nu, Rational(1, 2)}};
          }
          inst.sim.reward[{s, a, h}] = rd;
          if (h + 1 < horizon) {
            const StateId s1 = static_cast<StateId>(rng() % num_states);
            const StateId s2 = static_cast<StateId>(rng() % num_states);
            env::StateDistribution sd;
            if (s1 == s2) {
              sd = env::StateDistribution::atomic(s1);
            } else if (rng() % 2 == 0) {
              sd.atoms = {{s1, Rational(1, 2)}, {s2, Rational(1, 2)}};
            } else {
              sd.atoms = {{s1, Rational(1, 4)}, {s2, Rational(3, 4)}};
            }
            inst.sim.next[{s, a, h}] = sd;
          }
        }
      }
    }
    inst.sim.reward_bound = env::max_total_reward(inst.sim);
    env::validate(inst.sim);

    policy::Gf2LinearClass cls;
    cls.dim = dim;
    cls.table = features;
    inst.space = cls;
    inst.dim_e = gf2_rank_of(*features);

    // Verify the planted separation exactly; reroll on the rare failure.
    try {
      const env::ExactSolution sol = env::exact_q_star(inst.sim);
      auto oracle = policy::make_oracle(inst.space);
      const env::GapResult gap =
          env::q_gap(sol, [&](Site site) { return oracle->actions(site); });
      if (!gap.infinite && gap.value >= Rational(1, 5)) {
        inst.gap = gap.value;
        return inst;
      }
    } catch (const AssumptionError&) {
    }
  }
}

StochInstance random_stoch_instance(std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 0x57a7));
  const int horizon = 2 + static_cast<int>(rng() % 3);
  const int dim = 2 + static_cast<int>(rng() % 2);
  const int states = 4 + static_cast<int>(rng() % 17);
  return random_stoch_instance(seed, horizon, states, dim);
}

SpaceWithSites gf2_full_feature_space(int dim) {
  if (dim < 1 || dim > 16) throw ConfigError("feature-space dimension out of range");
  SpaceWithSites out;
  auto features = std::make_shared<policy::Gf2FeatureTable>();
  for (std::uint64_t v = 0; v < (1ULL << dim); ++v) {
    const Site site{static_cast<StateId>(v), 0};
    (*features)[site] = v;
    out.sites.push_back(site);
  }
  policy::Gf2LinearClass cls;
  cls.dim = dim;
  cls.table = features;
  out.space = cls;
  return out;
}

SpaceWithSites fourier_space(int cube_dim, std::vector<std::uint32_t> support) {
  SpaceWithSites out;
  auto points = std::make_shared<policy::CubePointTable>();
  for (std::uint32_t p = 0; p < (1u << cube_dim); ++p) {
    const Site site{static_cast<StateId>(p), 0};
    (*points)[site] = p;
    out.sites.push_back(site);
  }
  policy::FourierSupportClass cls;
  cls.cube_dim = cube_dim;
  cls.support = std::move(support);
  cls.points = points;
  out.space = cls;
  return out;
}

std::vector<std::vector<double>> random_sphere_packing(int dim, int count, double eps,
                                                       std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 0x9ac4));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> packing;
  long attempts = 0;
  while (static_cast<int>(packing.size()) < count) {
    if (++attempts > 200000L * count)
      throw ConfigError("could not grow the requested packing");
    std::vector<double> v(dim);
    double norm2 = 0;
    for (double& x : v) {
      x = gauss(rng);
      norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    if (norm < 1e-9) continue;
    for (double& x : v) x /= norm;
    bool ok = true;
    for (const auto& u : packing) {
      double d2 = 0;
      for (int k = 0; k < dim; ++k) d2 += (u[k] - v[k]) * (u[k] - v[k]);
      if (std::sqrt(d2) < eps) {
        ok = false;
        break;
      }
    }
    if (ok) packing.push_back(std::move(v));
  }
  return packing;
}

}  // namespace gen
}  // namespace eluder
