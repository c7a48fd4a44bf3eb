#pragma once

#include <vector>

namespace pmfc {

/// Steady state of the two-user scheme: the sustained correlation magnitude
/// and the step-1 feedback injection variance that places the recursion on
/// its limit cycle immediately.
struct TwoUserFixedPoint {
  double rho_star = 0.0;
  double sigma_w2 = 0.0;
  double residual = 0.0;  // defining-equation residual at rho_star
};

/// Steady state of the symmetric M-user scheme: the fixed-point eigenvalue,
/// the invariant eigenvalue cycle, and the time-varying powers that force the
/// state onto that cycle within M - 1 steps.
struct SymmetricFixedPoint {
  double lambda_star = 1.0;
  double residual = 0.0;      // raw defining-equation residual
  double log_residual = 0.0;  // log-domain residual (stable at large M * P)
  std::vector<double> eigen_cycle;     // lambda_1..lambda_M, lambda_1 = lambda_star
  std::vector<double> forcing_powers;  // P_1..P_{M-1}
};

/// Defining function of the two-user correlation fixed point:
///   f(rho) = rho + (rho - sqrt(P1 P2)(1 - rho^2))
///            / sqrt((P2(1 - rho^2) + 1)(P1(1 - rho^2) + 1)).
double ozarow_residual(double rho, double p1, double p2);

/// Largest root of ozarow_residual in (0, 1), by grid scan for the rightmost
/// sign change followed by bisection.
double ozarow_rho_star(double p1, double p2);

/// Raw residual of (P M lambda + 1)^{M-1} - (P lambda (M - lambda) + 1)^M.
double kramer_residual(double lambda, double power, int num_users);

/// Same equation evaluated in the log domain, which stays well scaled for
/// large M and P.
double kramer_log_residual(double lambda, double power, int num_users);

/// Largest solution in [1, M]; returns exactly 1 for M == 1.
double kramer_lambda_star(double power, int num_users);

/// Injection variance sigma_w^2 >= 0 with
///   sqrt(P1 P2) / sqrt((P1 + 1 + s)(P2 + 1 + s)) == rho_target.
/// Throws if rho_target exceeds the uninjected step-2 magnitude.
double sigma_w2_for_target(double rho_target, double p1, double p2);

/// rho_star plus the sigma_w^2 that pins |rho_2| = rho_star.
TwoUserFixedPoint solve_two_user(double p1, double p2);

/// lambda_star, the invariant cycle, and the forcing powers P_1..P_{M-1}.
/// The returned cycle is verified by direct iteration: applying the
/// eigenvalue recursion at constant power maps it to itself.
SymmetricFixedPoint forcing_powers(double power, int num_users);

}  // namespace pmfc
