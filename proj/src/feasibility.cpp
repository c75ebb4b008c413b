#include "eluder/feasibility.hpp"

#include <cassert>

namespace eluder {
namespace lp {

namespace {

// Phase-I simplex on  M v = b, v >= 0, minimizing the sum of artificials.
// Returns the basic solution for the first `num_cols` structural columns
// when the optimum is zero, nullopt otherwise.
std::optional<std::vector<Rational>> phase_one(int num_cols,
                                               std::vector<std::vector<Rational>> m,
                                               std::vector<Rational> b) {
  const int rows = static_cast<int>(m.size());
  const int total = num_cols + rows;  // structural + one artificial per row

  // Normalize signs so b >= 0, then append the artificial identity block
  // and the right-hand side.
  std::vector<std::vector<Rational>> t(rows, std::vector<Rational>(total + 1));
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) {
    const bool flip = b[i] < 0;
    for (int j = 0; j < num_cols; ++j) t[i][j] = flip ? -m[i][j] : m[i][j];
    t[i][num_cols + i] = 1;
    t[i][total] = flip ? -b[i] : b[i];
    basis[i] = num_cols + i;
  }

  // Reduced costs for minimizing the artificial sum.
  std::vector<Rational> red(total + 1);
  for (int j = 0; j <= total; ++j) {
    Rational sum = 0;
    for (int i = 0; i < rows; ++i) sum += t[i][j];
    red[j] = (j >= num_cols && j < total ? Rational(1) : Rational(0)) - sum;
  }

  while (true) {
    int enter = -1;
    for (int j = 0; j < total; ++j) {
      if (red[j] < 0) {
        enter = j;  // Bland: smallest index
        break;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    Rational best_ratio;
    for (int i = 0; i < rows; ++i) {
      if (t[i][enter] > 0) {
        Rational ratio = t[i][total] / t[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return std::nullopt;  // unbounded: cannot happen here

    const Rational pivot = t[leave][enter];
    for (int j = 0; j <= total; ++j) t[leave][j] /= pivot;
    for (int i = 0; i < rows; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rational f = t[i][enter];
      for (int j = 0; j <= total; ++j) t[i][j] -= f * t[leave][j];
    }
    {
      const Rational f = red[enter];
      if (f != 0)
        for (int j = 0; j <= total; ++j) red[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  // Optimum is zero exactly when every artificial sits at zero.
  for (int i = 0; i < rows; ++i) {
    if (basis[i] >= num_cols && t[i][total] != 0) return std::nullopt;
  }

  std::vector<Rational> v(num_cols, Rational(0));
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < num_cols) v[basis[i]] = t[i][total];
  }
  return v;
}

}  // namespace

std::optional<std::vector<Rational>> solve_ge(int num_vars,
                                              const std::vector<std::vector<Rational>>& lhs,
                                              const std::vector<Rational>& rhs) {
  assert(lhs.size() == rhs.size());
  const int rows = static_cast<int>(lhs.size());
  // Free variables split as x = p - n with p, n >= 0; one slack per row.
  const int cols = 2 * num_vars + rows;
  std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < num_vars; ++j) {
      m[i][j] = lhs[i][j];
      m[i][num_vars + j] = -lhs[i][j];
    }
    m[i][2 * num_vars + i] = -1;  // <lhs, x> - slack = rhs
  }
  auto v = phase_one(cols, std::move(m), rhs);
  if (!v) return std::nullopt;
  std::vector<Rational> x(num_vars);
  for (int j = 0; j < num_vars; ++j) x[j] = (*v)[j] - (*v)[num_vars + j];
  return x;
}

std::optional<std::vector<Rational>> find_point(int num_vars,
                                                const std::vector<HalfSpace>& rows) {
  // Homogenize with a scale variable t, appended as variable num_vars.
  std::vector<std::vector<Rational>> lhs;
  std::vector<Rational> rhs;
  for (const HalfSpace& r : rows) {
    std::vector<Rational> row(num_vars + 1, Rational(0));
    for (int j = 0; j < num_vars && j < static_cast<int>(r.coeffs.size()); ++j)
      row[j] = r.coeffs[j];
    row[num_vars] = -r.rhs;
    lhs.push_back(std::move(row));
    rhs.emplace_back(r.strict ? 1 : 0);
  }
  {
    std::vector<Rational> row(num_vars + 1, Rational(0));
    row[num_vars] = 1;
    lhs.push_back(std::move(row));
    rhs.emplace_back(1);  // t >= 1
  }
  auto point = solve_ge(num_vars + 1, lhs, rhs);
  if (!point) return std::nullopt;
  const Rational t = (*point)[num_vars];
  std::vector<Rational> x(num_vars);
  for (int j = 0; j < num_vars; ++j) x[j] = (*point)[j] / t;
  return x;
}

}  // namespace lp
}  // namespace eluder
