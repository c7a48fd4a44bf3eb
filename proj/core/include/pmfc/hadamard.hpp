#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pmfc {

/// Exact integer check of H * H^T == order * I for a square ±1 matrix given
/// in row-major order. Returns false on any violation (including entries
/// outside {+1, -1}).
bool is_hadamard(int order, std::span<const std::int8_t> row_major);

/// Orders this library can construct: 1, 2, and multiples of 4 reachable by
/// the Sylvester doubling or the Paley quadratic-residue construction.
bool is_supported_order(int order);

/// A validated Hadamard matrix of ±1 entries. Immutable after construction.
class HadamardMatrix {
 public:
  /// Validates H * H^T == order * I and throws std::invalid_argument otherwise.
  HadamardMatrix(int order, std::vector<std::int8_t> row_major);

  /// Sylvester doubling construction of order 2^k. First row and column are
  /// all +1.
  static HadamardMatrix sylvester(int k);

  /// Paley construction of order p + 1 for a prime p with p % 4 == 3.
  static HadamardMatrix paley(int p);

  /// Dispatches to a construction for any supported order.
  static HadamardMatrix of_order(int order);

  int order() const noexcept { return order_; }
  int at(int row, int col) const;  // zero-based, returns +1 or -1

  /// Column by zero-based index, as ±1 doubles ready for the signal formulas.
  std::vector<double> column(int index) const;

  /// The sign vector for time slot n >= 1: column ((n - 1) mod order). The
  /// schedule cycles through every column once per period.
  std::vector<double> schedule_column(long n) const;
  int schedule_index(long n) const;  // zero-based column index for time n

 private:
  int order_;
  std::vector<std::int8_t> entries_;  // row-major
};

}  // namespace pmfc
