#pragma once

#include <span>
#include <vector>

#include "pmfc/channel.hpp"
#include "pmfc/encoder.hpp"

namespace pmfc {

/// Closed-form rate prediction for one scheme. sum_rate_bits is the sum of
/// the per-user rates; the coupled closed forms live in the *_sum_rate_bits
/// helpers so the two routes can be compared in tests.
struct RatePrediction {
  Scheme scheme = Scheme::point_to_point;
  std::vector<double> rate_bits;    // per-user R*
  double sum_rate_bits = 0.0;       // sum of rate_bits
  std::vector<double> contraction;  // per-user limiting kernel slope r
};

/// Per-step contraction coefficient L = 1 - cov_hat^2 / var(Y) with
///   cov_hat = sum_t alpha_t corr(t, m) sqrt(P_t),
///   var(Y)  = sum_t sum_l alpha_t alpha_l corr(t, l) sqrt(P_t P_l) + noise.
/// Equals the squared kernel slope residual_var / P_m computed by the
/// coefficient route.
double l_coefficient(const SquareMatrix& corr, std::span<const double> alpha,
                     std::span<const double> powers, int user, double noise_variance);

/// Same, reading the correlation out of a scheme state.
double l_coefficient(const CorrelationState& state, std::span<const double> alpha,
                     const PowerProfile& profile, int user);

struct ContractionCheck {
  double r = 0.0;      // limiting kernel slope over the periodic cycle
  bool satisfied = false;  // 0 < r < 1
};

/// Evaluates the contraction condition on one period of the limit cycle of
/// per-step L values (the limit superior of a periodic sequence is its
/// maximum over one period).
ContractionCheck contraction_condition(std::span<const double> l_cycle);

/// Two-user rates at the sustained correlation magnitude:
/// R_m = 0.5 log2(1 + P_m (1 - rho^2)).
RatePrediction ozarow_rates(double rho_star, double p1, double p2);

/// Coupled closed form 0.5 log2(1 + P1 + P2 + 2 rho sqrt(P1 P2)); equals the
/// per-user sum exactly when rho solves the two-user fixed-point equation.
double ozarow_sum_rate_bits(double rho_star, double p1, double p2);

/// Symmetric per-user rate R = -0.5 log2(1 - P lambda^2 / (M P lambda + 1))
/// for every user.
RatePrediction symmetric_rates(double lambda_star, double power, int num_users);

/// Coupled closed form 0.5 log2(1 + P M lambda); equals M times the per-user
/// rate exactly when lambda solves the symmetric fixed-point equation.
double symmetric_sum_rate_bits(double lambda_star, double power, int num_users);

/// Error-decay target curve 2^{2 n (R* - R - delta)} for plotting -log p(e)
/// against; an asymptotic order, not an equality. Requires R < R*.
double error_exponent_target(double r_star_bits, double rate_bits, long n,
                             double delta_bits = 0.0);

}  // namespace pmfc
