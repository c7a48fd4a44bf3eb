#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pmfc {

enum class Scheme { point_to_point, two_user, symmetric };

/// Per-user transmit power budgets and the channel noise variance.
struct PowerProfile {
  std::vector<double> powers;
  double noise_variance = 1.0;

  int num_users() const noexcept { return static_cast<int>(powers.size()); }
  void validate() const;  // throws std::invalid_argument
};

/// Counter-based Gaussian/uniform generator. A given (seed, stream) pair
/// always yields the same sequence, independent of any other stream, so
/// trials can be split across threads without shared state.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, std::uint64_t stream) noexcept;

  /// Uniform on the open interval (0, 1).
  double next_uniform() noexcept;

  /// N(0, variance) by inverse-CDF transform; variance 0 returns exactly 0.
  double next_gaussian(double variance);

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Noise-free channel combination sum_m alpha_m * x_m.
double combine(std::span<const double> x, std::span<const double> alpha);

/// Memoryless AWGN multiple-access channel with noiseless feedback.
class GaussianMac {
 public:
  explicit GaussianMac(PowerProfile profile);

  /// Y = sum_m alpha_m x_m + Z with Z ~ N(0, noise_variance).
  double transmit(std::span<const double> x, std::span<const double> alpha,
                  NoiseSource& noise) const;

  const PowerProfile& profile() const noexcept { return profile_; }

 private:
  PowerProfile profile_;
};

/// Receiver-side injection applied to the fed-back value: returns y + W with
/// W ~ N(0, sigma_w2). The receiver generates W, so the injected value is
/// known at both ends of the feedback link.
double inject_feedback_noise(double y, double sigma_w2, NoiseSource& noise);

}  // namespace pmfc
