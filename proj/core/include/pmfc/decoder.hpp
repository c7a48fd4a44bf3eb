#pragma once

#include "pmfc/encoder.hpp"
#include "pmfc/numerics.hpp"

namespace pmfc {

/// One step's kernel map s -> slope * s + intercept, strictly increasing.
struct AffineMap {
  double slope = 1.0;
  double intercept = 0.0;
};

/// Running composition T_n = w_1 o w_2 o ... o w_n, with the slope tracked in
/// the log domain so widths stay representable at any horizon.
struct ComposedMap {
  double slope = 1.0;
  double intercept = 0.0;
  double log_slope = 0.0;  // sum of log kernel slopes, natural log
  int steps = 0;

  double operator()(double s) const noexcept { return slope * s + intercept; }
};

/// Symmetric terminal interval (-half_width, half_width) for the last symbol.
struct TerminalInterval {
  explicit TerminalInterval(double half_width);
  double half_width;
};

/// Decoded message-space interval with its width tracked in the log domain.
struct MessageInterval {
  Probability lo;
  Probability hi;
  double log_width = 0.0;  // natural log of |hi - lo|
};

/// Kernel for one step: slope sqrt(residual_var / next_power), intercept
/// gain * y. Inverts the matching encoder update for the same step.
AffineMap kernel_from_step(const Coefficients& c, double y, double next_power);

/// Right-composition: the new kernel becomes the innermost map,
/// T'(s) = T(w(s)).
ComposedMap compose(const ComposedMap& t, const AffineMap& w);

/// Half width t with P(|X| >= t) == target_error for X ~ N(0, power).
TerminalInterval choose_terminal_interval(double target_error, double power);

/// Pulls the terminal interval back through T and maps it to message space
/// through the N(0, power) CDF, where power is the variance of the first
/// symbol. Falls back to a mean-value form for the log width once the direct
/// CDF difference is smaller than 1e-14.
MessageInterval decode(const ComposedMap& t, const TerminalInterval& j1, double power);

/// -log2(width) / n, in bits per channel use.
double achieved_rate_bits(const MessageInterval& interval, int n);

/// Open-interval membership of the message point.
bool check_success(const MessagePoint& theta, const MessageInterval& interval);

/// Fixed-rate view: the decoded interval qualifies at rate R iff its width is
/// at most 2^{-n R}.
bool meets_fixed_rate(const MessageInterval& interval, int n, double rate_bits);

}  // namespace pmfc
