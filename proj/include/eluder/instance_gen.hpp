#pragma once

#include <cstdint>
#include <vector>

#include "eluder/env.hpp"
#include "eluder/policy.hpp"

namespace eluder {
namespace gen {

// Random deterministic system with a planted field-linear optimal policy:
// the action <theta*, phi(s,h)> earns a unit bonus everywhere, tie-broken by
// small rational noise, so the optimal action is unique at every site and
// the planted parameter is optimal everywhere. reward_bound is the exact
// maximum total.
struct DetInstance {
  env::DeterministicMdp mdp;
  policy::PolicySpace space;
  std::uint64_t theta_star = 0;
  int dim_e = 0;  // field rank of the realized features
};

DetInstance random_det_instance(std::uint64_t seed, int horizon, int num_states, int dim);
// horizon in 2..6, states in 4..64, dim in 2..6, drawn from the seed.
DetInstance random_det_instance(std::uint64_t seed);

// Stochastic counterpart: two-point transition kernels, two-point reward
// noise on top of the planted bonus. The optimal-action advantage stays
// above 1/5 by construction and is re-verified exactly before returning.
struct StochInstance {
  env::StochasticSim sim;
  policy::PolicySpace space;
  std::uint64_t theta_star = 0;
  int dim_e = 0;
  Rational gap;
};

StochInstance random_stoch_instance(std::uint64_t seed, int horizon, int num_states, int dim);
// horizon in 2..4, states in 4..20, dim in {2,3}.
StochInstance random_stoch_instance(std::uint64_t seed);

struct SpaceWithSites {
  policy::PolicySpace space;
  std::vector<Site> sites;
};

// Field-linear class with one site per vector of the whole feature space.
SpaceWithSites gf2_full_feature_space(int dim);

// Fourier-support class with one site per hypercube point.
SpaceWithSites fourier_space(int cube_dim, std::vector<std::uint32_t> support);

// Unit vectors on the sphere with pairwise distance at least eps, grown
// greedily from the seed.
std::vector<std::vector<double>> random_sphere_packing(int dim, int count, double eps,
                                                       std::uint64_t seed);

}  // namespace gen
}  // namespace eluder
