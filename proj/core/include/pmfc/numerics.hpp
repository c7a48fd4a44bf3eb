#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pmfc {

/// A probability value, validated to lie in [0, 1].
class Probability {
 public:
  Probability() = default;
  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::domain_error("Probability outside [0, 1]");
    }
  }
  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// Search interval for the root finders.
struct Bracket {
  double lo;
  double hi;
  double tolerance;

  Bracket(double lo, double hi, double tolerance)
      : lo(lo), hi(hi), tolerance(tolerance) {
    if (!(lo < hi)) throw std::invalid_argument("Bracket: lo must be < hi");
    if (!(tolerance > 0.0)) throw std::invalid_argument("Bracket: tolerance must be > 0");
  }
};

/// Standard normal density.
double std_normal_pdf(double x) noexcept;

/// Standard normal CDF, absolute error below 1e-12 everywhere.
Probability std_normal_cdf(double x);

/// Inverse standard normal CDF on the open interval (0, 1).
double std_normal_inv_cdf(double p);

/// Upper tail Q(x) = 1 - Phi(x), relative accuracy preserved in the far tail.
Probability q_tail(double x);

/// Inverse of q_tail on (0, 1).
double q_tail_inv(double p);

/// Bisection on [bracket.lo, bracket.hi]. Requires a sign change; stops once
/// the bracket width reaches the tolerance (or the floating-point floor) and
/// returns the midpoint. Deterministic for a given (f, bracket).
template <class F>
double bisect(F&& f, const Bracket& bracket) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  double flo = f(lo);
  double fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) {
    throw std::runtime_error("bisect: non-finite function value at bracket endpoint");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bisect: no sign change over bracket");
  }
  while (hi - lo > bracket.tolerance) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // floating-point resolution floor
    const double fmid = f(mid);
    if (!std::isfinite(fmid)) {
      throw std::runtime_error("bisect: non-finite function value");
    }
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace pmfc
