#include "pmfc/hadamard.hpp"

#include <stdexcept>
#include <string>

namespace pmfc {

namespace {

// Construction sizes are capped at desk scale; entries are a dense
// order^2 byte array.
constexpr int kMaxOrder = 4096;

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; static_cast<long>(d) * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

bool is_hadamard(int order, std::span<const std::int8_t> row_major) {
  if (order <= 0) return false;
  if (row_major.size() != static_cast<std::size_t>(order) * order) return false;
  for (const std::int8_t e : row_major) {
    if (e != 1 && e != -1) return false;
  }
  for (int i = 0; i < order; ++i) {
    for (int j = i; j < order; ++j) {
      long long dot = 0;
      for (int k = 0; k < order; ++k) {
        dot += static_cast<long long>(row_major[i * order + k]) * row_major[j * order + k];
      }
      const long long expected = (i == j) ? order : 0;
      if (dot != expected) return false;
    }
  }
  return true;
}

bool is_supported_order(int order) {
  if (order == 1 || order == 2) return true;
  if (order <= 0 || order > kMaxOrder || order % 4 != 0) return false;
  if ((order & (order - 1)) == 0) return true;  // Sylvester
  return is_prime(order - 1) && (order - 1) % 4 == 3;  // Paley
}

HadamardMatrix::HadamardMatrix(int order, std::vector<std::int8_t> row_major)
    : order_(order), entries_(std::move(row_major)) {
  if (!is_hadamard(order_, entries_)) {
    throw std::invalid_argument("HadamardMatrix: entries fail H*H^T == order*I");
  }
}

HadamardMatrix HadamardMatrix::sylvester(int k) {
  if (k < 0) throw std::invalid_argument("sylvester: k must be >= 0");
  if (k > 12) throw std::length_error("sylvester: order 2^k exceeds the supported size");
  const int n = 1 << k;
  std::vector<std::int8_t> e(static_cast<std::size_t>(n) * n, 1);
  // Doubling: H_{2m} = [[H_m, H_m], [H_m, -H_m]].
  for (int m = 1; m < n; m <<= 1) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const std::int8_t v = e[i * n + j];
        e[i * n + (j + m)] = v;
        e[(i + m) * n + j] = v;
        e[(i + m) * n + (j + m)] = static_cast<std::int8_t>(-v);
      }
    }
  }
  return HadamardMatrix(n, std::move(e));
}

HadamardMatrix HadamardMatrix::paley(int p) {
  if (!is_prime(p) || p % 4 != 3) {
    throw std::invalid_argument("paley: requires a prime p with p % 4 == 3");
  }
  if (p + 1 > kMaxOrder) throw std::length_error("paley: order exceeds the supported size");
  const int n = p + 1;

  // Quadratic-residue character chi over GF(p); chi(0) = 0.
  std::vector<int> chi(p, -1);
  chi[0] = 0;
  for (int x = 1; x < p; ++x) {
    chi[static_cast<int>((static_cast<long>(x) * x) % p)] = 1;
  }

  // H = I + C with C the skew conference matrix bordered from the
  // Jacobsthal matrix Q_{ab} = chi(b - a).
  std::vector<std::int8_t> e(static_cast<std::size_t>(n) * n, 0);
  e[0] = 1;
  for (int j = 1; j < n; ++j) {
    e[j] = 1;       // first row
    e[j * n] = -1;  // first column
  }
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      if (i == j) {
        e[i * n + j] = 1;
      } else {
        const int diff = ((j - i) % p + p) % p;
        e[i * n + j] = static_cast<std::int8_t>(chi[diff]);
      }
    }
  }
  return HadamardMatrix(n, std::move(e));
}

HadamardMatrix HadamardMatrix::of_order(int order) {
  if (!is_supported_order(order)) {
    throw std::invalid_argument("of_order: no supported Hadamard construction for order " +
                                std::to_string(order));
  }
  if ((order & (order - 1)) == 0) {
    int k = 0;
    while ((1 << k) < order) ++k;
    return sylvester(k);
  }
  return paley(order - 1);
}

int HadamardMatrix::at(int row, int col) const {
  if (row < 0 || row >= order_ || col < 0 || col >= order_) {
    throw std::out_of_range("HadamardMatrix::at");
  }
  return entries_[static_cast<std::size_t>(row) * order_ + col];
}

std::vector<double> HadamardMatrix::column(int index) const {
  if (index < 0 || index >= order_) throw std::out_of_range("HadamardMatrix::column");
  std::vector<double> col(order_);
  for (int i = 0; i < order_; ++i) {
    col[i] = entries_[static_cast<std::size_t>(i) * order_ + index];
  }
  return col;
}

int HadamardMatrix::schedule_index(long n) const {
  if (n < 1) throw std::invalid_argument("schedule_index: time index starts at 1");
  return static_cast<int>((n - 1) % order_);
}

std::vector<double> HadamardMatrix::schedule_column(long n) const {
  return column(schedule_index(n));
}

}  // namespace pmfc
