#include "pmfc/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace pmfc {

double l_coefficient(const SquareMatrix& corr, std::span<const double> alpha,
                     std::span<const double> powers, int user, double noise_variance) {
  const int m = corr.size();
  if (static_cast<int>(alpha.size()) != m || static_cast<int>(powers.size()) != m ||
      user < 0 || user >= m) {
    throw std::invalid_argument("l_coefficient: dimension mismatch");
  }
  double cov_hat = 0.0;
  for (int t = 0; t < m; ++t) cov_hat += alpha[t] * corr(t, user) * std::sqrt(powers[t]);
  double var_y = noise_variance;
  for (int t = 0; t < m; ++t) {
    for (int l = 0; l < m; ++l) {
      var_y += alpha[t] * alpha[l] * corr(t, l) * std::sqrt(powers[t] * powers[l]);
    }
  }
  return 1.0 - cov_hat * cov_hat / var_y;
}

double l_coefficient(const CorrelationState& state, std::span<const double> alpha,
                     const PowerProfile& profile, int user) {
  if (const auto* two = std::get_if<TwoUserState>(&state.state)) {
    SquareMatrix corr = SquareMatrix::identity(2);
    corr(0, 1) = corr(1, 0) = two->rho;
    return l_coefficient(corr, alpha, profile.powers, user, profile.noise_variance);
  }
  const auto& sym = std::get<SymmetricState>(state.state);
  return l_coefficient(sym.corr, alpha, profile.powers, user, profile.noise_variance);
}

ContractionCheck contraction_condition(std::span<const double> l_cycle) {
  if (l_cycle.empty()) throw std::invalid_argument("contraction_condition: empty cycle");
  double max_l = 0.0;
  for (const double l : l_cycle) {
    if (!(l > 0.0)) throw std::invalid_argument("contraction_condition: L must be > 0");
    max_l = std::max(max_l, l);
  }
  ContractionCheck check;
  check.r = std::sqrt(max_l);
  check.satisfied = check.r > 0.0 && check.r < 1.0;
  return check;
}

RatePrediction ozarow_rates(double rho_star, double p1, double p2) {
  const double one_minus = 1.0 - rho_star * rho_star;
  RatePrediction pred;
  pred.scheme = Scheme::two_user;
  pred.rate_bits = {0.5 * std::log2(1.0 + p1 * one_minus),
                    0.5 * std::log2(1.0 + p2 * one_minus)};
  pred.sum_rate_bits = pred.rate_bits[0] + pred.rate_bits[1];
  const double var_y = p1 + p2 + 1.0 + 2.0 * std::abs(rho_star) * std::sqrt(p1 * p2);
  pred.contraction = {std::sqrt((p2 * one_minus + 1.0) / var_y),
                      std::sqrt((p1 * one_minus + 1.0) / var_y)};
  return pred;
}

double ozarow_sum_rate_bits(double rho_star, double p1, double p2) {
  return 0.5 * std::log2(1.0 + p1 + p2 + 2.0 * rho_star * std::sqrt(p1 * p2));
}

RatePrediction symmetric_rates(double lambda_star, double power, int num_users) {
  if (num_users < 1) throw std::invalid_argument("symmetric_rates: num_users must be >= 1");
  const double var_y = num_users * power * lambda_star + 1.0;
  const double l = 1.0 - power * lambda_star * lambda_star / var_y;
  RatePrediction pred;
  pred.scheme = num_users == 1 ? Scheme::point_to_point : Scheme::symmetric;
  pred.rate_bits.assign(num_users, -0.5 * std::log2(l));
  pred.sum_rate_bits = num_users * pred.rate_bits.front();
  pred.contraction.assign(num_users, std::sqrt(l));
  return pred;
}

double symmetric_sum_rate_bits(double lambda_star, double power, int num_users) {
  return 0.5 * std::log2(1.0 + power * num_users * lambda_star);
}

double error_exponent_target(double r_star_bits, double rate_bits, long n,
                             double delta_bits) {
  if (!(rate_bits < r_star_bits)) {
    throw std::domain_error("error_exponent_target: requires R < R*");
  }
  if (n < 1) throw std::invalid_argument("error_exponent_target: n must be >= 1");
  return std::exp2(2.0 * static_cast<double>(n) * (r_star_bits - rate_bits - delta_bits));
}

}  // namespace pmfc
