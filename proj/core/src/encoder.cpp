#include "pmfc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmfc/numerics.hpp"

namespace pmfc {

MessagePoint::MessagePoint(double theta) : value(theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::domain_error("MessagePoint: theta must lie in the open interval (0, 1)");
  }
}

double init_symbol(const MessagePoint& theta, double power) {
  if (!(power > 0.0)) throw std::invalid_argument("init_symbol: power must be > 0");
  return std::sqrt(power) * std_normal_inv_cdf(theta.value);
}

double update_symbol(double x, double y, const Coefficients& c, double next_power) {
  if (!(c.residual_var > 0.0)) {
    throw std::invalid_argument("update_symbol: residual variance must be > 0");
  }
  return std::sqrt(next_power) * (x - c.gain * y) / std::sqrt(c.residual_var);
}

Coefficients mmse_coefficients(const SquareMatrix& corr, std::span<const double> alpha,
                               std::span<const double> powers, int user,
                               double noise_variance) {
  const int m = corr.size();
  if (static_cast<int>(alpha.size()) != m || static_cast<int>(powers.size()) != m ||
      user < 0 || user >= m) {
    throw std::invalid_argument("mmse_coefficients: dimension mismatch");
  }
  double cov = 0.0;  // cov(X_user, Y)
  for (int t = 0; t < m; ++t) {
    cov += alpha[t] * corr(t, user) * std::sqrt(powers[t] * powers[user]);
  }
  double var_y = noise_variance;
  for (int t = 0; t < m; ++t) {
    for (int l = 0; l < m; ++l) {
      var_y += alpha[t] * alpha[l] * corr(t, l) * std::sqrt(powers[t] * powers[l]);
    }
  }
  if (!(var_y > 0.0)) throw std::runtime_error("mmse_coefficients: var(Y) <= 0");
  return {cov / var_y, powers[user] - cov * cov / var_y};
}

Coefficients two_user_coefficients(double rho, double p1, double p2, int user,
                                   double effective_noise) {
  if (user != 0 && user != 1) throw std::invalid_argument("two_user_coefficients: user");
  const double cross = std::sqrt(p1 * p2);
  const double mag = std::abs(rho);
  const double var_y = p1 + p2 + 2.0 * mag * cross + effective_noise;
  if (user == 0) {
    return {(p1 + mag * cross) / var_y,
            p1 * (p2 * (1.0 - rho * rho) + effective_noise) / var_y};
  }
  return {sign_of(rho) * (p2 + mag * cross) / var_y,
          p2 * (p1 * (1.0 - rho * rho) + effective_noise) / var_y};
}

Coefficients eigen_coefficients(double lambda1, double alpha_m, double power, int num_users,
                                double noise_variance) {
  const double var_y = num_users * power * lambda1 + noise_variance;
  if (!(var_y > 0.0)) throw std::runtime_error("eigen_coefficients: var(Y) <= 0");
  return {power * lambda1 * alpha_m / var_y,
          power * (1.0 - power * lambda1 * lambda1 / var_y)};
}

double two_user_rho_step(double rho, double p1, double p2, double effective_noise) {
  const double one_minus = 1.0 - rho * rho;
  const double num = rho * effective_noise - sign_of(rho) * std::sqrt(p1 * p2) * one_minus;
  const double den = std::sqrt((p2 * one_minus + effective_noise) *
                               (p1 * one_minus + effective_noise));
  return std::clamp(num / den, -1.0, 1.0);
}

SquareMatrix symmetric_corr_step(const SquareMatrix& corr, double lambda1,
                                 std::span<const double> alpha, double power,
                                 double noise_variance) {
  const int m = corr.size();
  if (static_cast<int>(alpha.size()) != m) {
    throw std::invalid_argument("symmetric_corr_step: dimension mismatch");
  }
  const double var_y = m * power * lambda1 + noise_variance;
  const double rank1 = power * lambda1 * lambda1;
  const double denom = var_y - rank1;
  if (!(denom > 0.0)) {
    throw std::runtime_error("symmetric_corr_step: state lost positive definiteness");
  }
  SquareMatrix next(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      next(i, j) = (var_y * corr(i, j) - rank1 * alpha[i] * alpha[j]) / denom;
    }
  }
  return next;
}

std::vector<double> symmetric_lambda_step(std::span<const double> lambda, double power,
                                          int num_users, double noise_variance) {
  if (static_cast<int>(lambda.size()) != num_users) {
    throw std::invalid_argument("symmetric_lambda_step: dimension mismatch");
  }
  for (const double l : lambda) {
    if (!(l > 0.0)) throw std::invalid_argument("symmetric_lambda_step: eigenvalues must be > 0");
  }
  const double var_y = num_users * power * lambda[0] + noise_variance;
  const double denom = var_y - power * lambda[0] * lambda[0];
  if (!(denom > 0.0)) {
    throw std::runtime_error("symmetric_lambda_step: state lost positive definiteness");
  }
  std::vector<double> next(num_users);
  for (int k = 0; k + 1 < num_users; ++k) next[k] = var_y * lambda[k + 1] / denom;
  next[num_users - 1] = noise_variance * lambda[0] / denom;
  return next;
}

std::vector<double> transmit_signals(std::span<const double> symbols,
                                     std::span<const double> alpha) {
  if (symbols.size() != alpha.size()) {
    throw std::invalid_argument("transmit_signals: dimension mismatch");
  }
  std::vector<double> out(symbols.size());
  for (std::size_t m = 0; m < symbols.size(); ++m) out[m] = alpha[m] * symbols[m];
  return out;
}

EncoderBank::EncoderBank(Scheme scheme, PowerProfile profile,
                         std::span<const MessagePoint> messages,
                         std::vector<double> power_schedule)
    : scheme_(scheme),
      profile_(std::move(profile)),
      power_schedule_(std::move(power_schedule)),
      hadamard_(HadamardMatrix::of_order(scheme == Scheme::two_user ? 1
                                                                    : profile_.num_users())) {
  profile_.validate();
  const int m = profile_.num_users();
  if (static_cast<int>(messages.size()) != m) {
    throw std::invalid_argument("EncoderBank: one message point per user required");
  }
  switch (scheme_) {
    case Scheme::point_to_point:
      if (m != 1) throw std::invalid_argument("EncoderBank: point_to_point requires 1 user");
      break;
    case Scheme::two_user:
      if (m != 2) throw std::invalid_argument("EncoderBank: two_user requires 2 users");
      if (!power_schedule_.empty()) {
        throw std::invalid_argument("EncoderBank: power schedules apply to the symmetric scheme");
      }
      break;
    case Scheme::symmetric:
      for (const double p : profile_.powers) {
        if (p != profile_.powers.front()) {
          throw std::invalid_argument("EncoderBank: symmetric scheme requires equal powers");
        }
      }
      break;
  }
  for (const double p : power_schedule_) {
    if (!(p > 0.0)) throw std::invalid_argument("EncoderBank: scheduled powers must be > 0");
  }

  if (scheme_ == Scheme::two_user) {
    state_.state = TwoUserState{0.0};
  } else {
    state_.state = SymmetricState{SquareMatrix::identity(m), std::vector<double>(m, 1.0)};
  }
  state_.step = 1;

  symbols_.resize(m);
  for (int u = 0; u < m; ++u) symbols_[u] = init_symbol(messages[u], user_power(u, 1));
  refresh_alpha();
}

double EncoderBank::user_power(int user, int step) const {
  if (user < 0 || user >= profile_.num_users() || step < 1) {
    throw std::invalid_argument("user_power: out of range");
  }
  if (!power_schedule_.empty()) {
    const std::size_t idx = std::min<std::size_t>(step - 1, power_schedule_.size() - 1);
    return power_schedule_[idx];
  }
  return profile_.powers[user];
}

double EncoderBank::user_power(int user) const { return user_power(user, state_.step); }

Coefficients EncoderBank::coefficients(int user, double extra_feedback_variance) const {
  const double noise = profile_.noise_variance + extra_feedback_variance;
  if (const auto* two = std::get_if<TwoUserState>(&state_.state)) {
    return two_user_coefficients(two->rho, profile_.powers[0], profile_.powers[1], user, noise);
  }
  const auto& sym = std::get<SymmetricState>(state_.state);
  return eigen_coefficients(sym.eigen_cycle[0], alpha_[user], user_power(user),
                            profile_.num_users(), noise);
}

void EncoderBank::absorb(double y, double extra_feedback_variance) {
  const int m = profile_.num_users();
  const int next_step = state_.step + 1;
  for (int u = 0; u < m; ++u) {
    symbols_[u] =
        update_symbol(symbols_[u], y, coefficients(u, extra_feedback_variance),
                      user_power(u, next_step));
  }
  const double noise = profile_.noise_variance + extra_feedback_variance;
  if (auto* two = std::get_if<TwoUserState>(&state_.state)) {
    two->rho = two_user_rho_step(two->rho, profile_.powers[0], profile_.powers[1], noise);
  } else {
    auto& sym = std::get<SymmetricState>(state_.state);
    const double power = user_power(0);
    sym.corr = symmetric_corr_step(sym.corr, sym.eigen_cycle[0], alpha_, power, noise);
    sym.eigen_cycle = symmetric_lambda_step(sym.eigen_cycle, power, m, noise);
  }
  state_.step = next_step;
  refresh_alpha();
}

void EncoderBank::refresh_alpha() {
  if (const auto* two = std::get_if<TwoUserState>(&state_.state)) {
    alpha_ = {1.0, sign_of(two->rho)};
  } else {
    alpha_ = hadamard_.schedule_column(state_.step);
  }
}

}  // namespace pmfc
