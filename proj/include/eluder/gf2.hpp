#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

namespace eluder {

// Linear algebra over the two-element field, with vectors of dimension <= 64
// packed into one word (bit i = coordinate i).
namespace gf2 {

inline int dot(std::uint64_t a, std::uint64_t b) {
  return std::popcount(a & b) & 1;
}

// Incremental row-echelon form of an affine system <theta, phi_k> = b_k.
// Rows can only be appended, which matches append-only constraint sets.
class Echelon {
 public:
  enum class AppendResult { kInserted, kRedundant, kInconsistent };

  // Inserts the equation <theta, phi> = rhs. The system stays fully reduced:
  // no row has a bit at another row's pivot, so appends and queries cost
  // O(rank) word operations.
  AppendResult append(std::uint64_t phi, int rhs) {
    auto [vec, bit] = reduce(phi, rhs);
    if (vec == 0) return bit ? AppendResult::kInconsistent : AppendResult::kRedundant;
    const std::uint64_t pivot_mask = 1ULL << pivot(vec);
    for (Row& row : rows_) {
      if (row.lhs & pivot_mask) {
        row.lhs ^= vec;
        row.rhs ^= bit;
      }
    }
    rows_.push_back({vec, bit});
    for (std::size_t i = 0; i + 1 < rows_.size(); ++i) {
      std::size_t j = rows_.size() - 1 - i;
      if (pivot(rows_[j - 1].lhs) < pivot(rows_[j].lhs)) break;
      std::swap(rows_[j - 1], rows_[j]);
    }
    return AppendResult::kInserted;
  }

  // Would the system stay solvable with <theta, phi> = rhs added?
  bool consistent_with(std::uint64_t phi, int rhs) const {
    auto [vec, bit] = reduce(phi, rhs);
    return vec != 0 || bit == 0;
  }

  // The value of <theta, phi> forced by the system, if any.
  std::optional<int> implied_value(std::uint64_t phi) const {
    auto [vec, bit] = reduce(phi, 0);
    if (vec == 0) return bit;
    return std::nullopt;
  }

  // A solution with all free coordinates set to zero.
  std::uint64_t solution() const {
    std::uint64_t theta = 0;
    for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
      const int p = pivot(it->lhs);
      const int val = it->rhs ^ dot(it->lhs & ~(1ULL << p), theta);
      if (val) theta |= 1ULL << p;
    }
    return theta;
  }

  // Like solution(), for the system extended with <theta, phi> = rhs.
  std::optional<std::uint64_t> solution_with(std::uint64_t phi, int rhs) const {
    Echelon extended = *this;
    if (extended.append(phi, rhs) == AppendResult::kInconsistent) return std::nullopt;
    return extended.solution();
  }

  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  struct Row {
    std::uint64_t lhs;
    int rhs;
  };

  static int pivot(std::uint64_t v) { return std::countr_zero(v); }

  std::pair<std::uint64_t, int> reduce(std::uint64_t phi, int rhs) const {
    for (const Row& row : rows_) {
      const int p = pivot(row.lhs);
      if (phi & (1ULL << p)) {
        phi ^= row.lhs;
        rhs ^= row.rhs;
      }
    }
    return {phi, rhs};
  }

  std::vector<Row> rows_;  // sorted by pivot position, fully reduced
};

inline int rank(const std::vector<std::uint64_t>& vectors) {
  Echelon e;
  for (std::uint64_t v : vectors) e.append(v, 0);
  return e.rank();
}

}  // namespace gf2
}  // namespace eluder
