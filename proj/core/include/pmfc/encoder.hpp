#pragma once

#include <span>
#include <variant>
#include <vector>

#include "pmfc/channel.hpp"
#include "pmfc/hadamard.hpp"

namespace pmfc {

/// Message point in the open unit interval.
struct MessagePoint {
  explicit MessagePoint(double theta);
  double value;
};

/// Per-step MMSE pair for one user: E[X|Y] = gain * Y and
/// var(X|Y) = residual_var. residual_var sits in (0, P].
struct Coefficients {
  double gain = 0.0;
  double residual_var = 0.0;
};

/// Minimal dense square matrix, row-major.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, double fill = 0.0)
      : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const noexcept { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// Two-user shared state: the signed correlation between the matched symbols.
struct TwoUserState {
  double rho = 0.0;
};

/// Symmetric M-user shared state: normalized covariance plus its eigenvalue
/// cycle on the Hadamard columns. eigen_cycle[k] belongs to the column used
/// k steps from now (eigen_cycle[0] pairs with the current sign vector).
struct SymmetricState {
  SquareMatrix corr;
  std::vector<double> eigen_cycle;
};

/// Deterministic, message-independent encoder/decoder state at step `step`.
struct CorrelationState {
  int step = 1;
  std::variant<TwoUserState, SymmetricState> state;
};

/// sgn with sgn(0) = +1, the convention used by the two-user sign schedule.
inline double sign_of(double v) noexcept { return v < 0.0 ? -1.0 : 1.0; }

/// X_1 = sqrt(P) * Phi^{-1}(theta); strictly increasing in theta.
double init_symbol(const MessagePoint& theta, double power);

/// X' = sqrt(next_power) * (x - gain * y) / sqrt(residual_var).
double update_symbol(double x, double y, const Coefficients& c, double next_power);

/// MMSE pair from the full correlation matrix: gain = cov(X_m, Y) / var(Y),
/// residual = P_m - cov^2 / var(Y), with
///   cov(X_m, Y) = sum_t alpha_t corr(t, m) sqrt(P_t P_m)
///   var(Y)      = sum_t sum_l alpha_t alpha_l corr(t, l) sqrt(P_t P_l) + noise.
Coefficients mmse_coefficients(const SquareMatrix& corr, std::span<const double> alpha,
                               std::span<const double> powers, int user,
                               double noise_variance);

/// Closed-form two-user route (sign schedule alpha = (1, sgn(rho)) folded in).
/// `user` is 0 or 1; `effective_noise` is the total variance of the non-signal
/// part of the fed-back value (channel noise plus any injected variance).
Coefficients two_user_coefficients(double rho, double p1, double p2, int user,
                                   double effective_noise);

/// Closed-form symmetric route on the eigen-schedule: for the current sign
/// vector with eigenvalue lambda1 and this user's sign entry alpha_m,
///   gain = P lambda1 alpha_m / (M P lambda1 + noise),
///   residual = P (1 - P lambda1^2 / (M P lambda1 + noise)).
Coefficients eigen_coefficients(double lambda1, double alpha_m, double power, int num_users,
                                double noise_variance);

/// Correlation recursion for the two-user scheme under the sign schedule,
/// with the channel-plus-injection variance as `effective_noise`:
///   rho' = (rho * N - sgn(rho) sqrt(P1 P2) (1 - rho^2))
///          / sqrt((P2 (1 - rho^2) + N)(P1 (1 - rho^2) + N)).
double two_user_rho_step(double rho, double p1, double p2, double effective_noise);

/// One step of the normalized-covariance recursion on the Hadamard schedule:
///   R' = (V R - P lambda1^2 alpha alpha^T) / (V - P lambda1^2),
/// where V = M P lambda1 + noise. Diagonal entries stay exactly 1; positive
/// definiteness is the caller-checked invariant.
SquareMatrix symmetric_corr_step(const SquareMatrix& corr, double lambda1,
                                 std::span<const double> alpha, double power,
                                 double noise_variance = 1.0);

/// Matching eigenvalue-cycle recursion: with V and D = V - P lambda1^2,
///   lambda'[k] = V lambda[k+1] / D for k < M-1, and
///   lambda'[M-1] = noise * lambda[0] / D.
std::vector<double> symmetric_lambda_step(std::span<const double> lambda, double power,
                                          int num_users, double noise_variance = 1.0);

/// alpha-weighted signals actually placed on the channel.
std::vector<double> transmit_signals(std::span<const double> symbols,
                                     std::span<const double> alpha);

/// Full encoder for one trial: per-user matched symbols plus the shared
/// deterministic state, advanced one channel use at a time. Power may vary
/// over the first steps (the forced symmetric scheme); `power_schedule[n-1]`
/// is the symbol variance at step n and the last entry repeats afterwards.
class EncoderBank {
 public:
  EncoderBank(Scheme scheme, PowerProfile profile, std::span<const MessagePoint> messages,
              std::vector<double> power_schedule = {});

  /// Sign vector for the current step.
  const std::vector<double>& alpha() const noexcept { return alpha_; }

  /// alpha-weighted transmit vector for the current step.
  std::vector<double> transmit() const { return transmit_signals(symbols_, alpha_); }

  /// Coefficients for the current step (identical at transmitters, receiver).
  Coefficients coefficients(int user, double extra_feedback_variance = 0.0) const;

  /// Advances symbols and state after the fed-back value y was observed.
  void absorb(double y, double extra_feedback_variance = 0.0);

  std::span<const double> symbols() const noexcept { return symbols_; }
  const CorrelationState& state() const noexcept { return state_; }
  int step() const noexcept { return state_.step; }

  /// Variance of user `user`'s matched symbol at step `step`.
  double user_power(int user, int step) const;
  double user_power(int user) const;  // at the current step

 private:
  Scheme scheme_;
  PowerProfile profile_;
  std::vector<double> power_schedule_;
  std::vector<double> symbols_;
  std::vector<double> alpha_;
  CorrelationState state_;
  HadamardMatrix hadamard_;

  void refresh_alpha();
};

}  // namespace pmfc
