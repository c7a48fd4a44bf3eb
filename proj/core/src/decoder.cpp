#include "pmfc/decoder.hpp"

#include <cmath>
#include <stdexcept>

namespace pmfc {

namespace {
constexpr double kDirectWidthFloor = 1e-14;
constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)
}  // namespace

TerminalInterval::TerminalInterval(double half_width) : half_width(half_width) {
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("TerminalInterval: half_width must be > 0");
  }
}

AffineMap kernel_from_step(const Coefficients& c, double y, double next_power) {
  if (!(c.residual_var > 0.0) || !(next_power > 0.0)) {
    throw std::invalid_argument("kernel_from_step: variances must be > 0");
  }
  return {std::sqrt(c.residual_var / next_power), c.gain * y};
}

ComposedMap compose(const ComposedMap& t, const AffineMap& w) {
  if (!(w.slope > 0.0)) throw std::invalid_argument("compose: kernel slope must be > 0");
  ComposedMap next;
  next.slope = t.slope * w.slope;
  next.intercept = t.slope * w.intercept + t.intercept;
  next.log_slope = t.log_slope + std::log(w.slope);
  next.steps = t.steps + 1;
  return next;
}

TerminalInterval choose_terminal_interval(double target_error, double power) {
  if (!(target_error > 0.0 && target_error < 1.0)) {
    throw std::invalid_argument("choose_terminal_interval: target_error must lie in (0, 1)");
  }
  if (!(power > 0.0)) {
    throw std::invalid_argument("choose_terminal_interval: power must be > 0");
  }
  return TerminalInterval(std::sqrt(power) * q_tail_inv(0.5 * target_error));
}

MessageInterval decode(const ComposedMap& t, const TerminalInterval& j1, double power) {
  if (!(power > 0.0)) throw std::invalid_argument("decode: power must be > 0");
  const double scale = std::sqrt(power);
  const double lo_arg = t(-j1.half_width) / scale;
  const double hi_arg = t(j1.half_width) / scale;

  MessageInterval out;
  out.lo = std_normal_cdf(lo_arg);
  out.hi = std_normal_cdf(hi_arg);

  const double direct = out.hi.value() - out.lo.value();
  if (direct > kDirectWidthFloor) {
    out.log_width = std::log(direct);
  } else {
    // Mean-value form: width = slope * 2t * f(midpoint), evaluated in logs.
    // The interval midpoint pre-image is the composed intercept.
    const double xi = t.intercept;
    const double log_density = -0.5 * xi * xi / power - 0.5 * (kLog2Pi + std::log(power));
    out.log_width = t.log_slope + std::log(2.0 * j1.half_width) + log_density;
  }
  return out;
}

double achieved_rate_bits(const MessageInterval& interval, int n) {
  if (n < 1) throw std::invalid_argument("achieved_rate_bits: n must be >= 1");
  return -interval.log_width / (n * M_LN2);
}

bool check_success(const MessagePoint& theta, const MessageInterval& interval) {
  return interval.lo.value() < theta.value && theta.value < interval.hi.value();
}

bool meets_fixed_rate(const MessageInterval& interval, int n, double rate_bits) {
  if (n < 1) throw std::invalid_argument("meets_fixed_rate: n must be >= 1");
  return interval.log_width <= -static_cast<double>(n) * rate_bits * M_LN2;
}

}  // namespace pmfc
