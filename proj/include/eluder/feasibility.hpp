#pragma once

#include <optional>
#include <vector>

#include "eluder/rational.hpp"

namespace eluder {
namespace lp {

// One half-space over free variables x: <coeffs, x> >= rhs, or strictly >
// when strict is set.
struct HalfSpace {
  std::vector<Rational> coeffs;
  Rational rhs;
  bool strict = false;
};

// Decides whether the system of half-spaces has a solution x in Q^n and
// returns one if so. Strict inequalities are handled exactly: the system is
// homogenized with a scale variable t >= 1 and every strict row becomes
// <coeffs, x> - rhs*t >= 1, which a strictly feasible point satisfies after
// scaling. Everything runs in exact rational arithmetic (Phase-I simplex,
// Bland's rule).
std::optional<std::vector<Rational>> find_point(int num_vars,
                                                const std::vector<HalfSpace>& rows);

// Feasibility of A x >= b over free x, exact arithmetic. Used directly by
// find_point and by tests.
std::optional<std::vector<Rational>> solve_ge(int num_vars,
                                              const std::vector<std::vector<Rational>>& lhs,
                                              const std::vector<Rational>& rhs);

}  // namespace lp
}  // namespace eluder
