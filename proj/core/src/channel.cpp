#include "pmfc/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "pmfc/numerics.hpp"

namespace pmfc {

namespace {

// splitmix64 finalizer; full-avalanche mix of a 64-bit word.
std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

void PowerProfile::validate() const {
  if (powers.empty()) throw std::invalid_argument("PowerProfile: no users");
  for (const double p : powers) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("PowerProfile: powers must be finite and > 0");
    }
  }
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("PowerProfile: noise_variance must be finite and > 0");
  }
}

NoiseSource::NoiseSource(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed) ^ stream)) {}

double NoiseSource::next_uniform() noexcept {
  const std::uint64_t word = mix64(key_ ^ mix64(counter_++));
  // 53-bit mantissa, offset by half an ulp so both endpoints are excluded.
  return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseSource::next_gaussian(double variance) {
  if (!(variance >= 0.0)) throw std::invalid_argument("next_gaussian: variance must be >= 0");
  const double u = next_uniform();
  if (variance == 0.0) return 0.0;
  return std::sqrt(variance) * std_normal_inv_cdf(u);
}

double combine(std::span<const double> x, std::span<const double> alpha) {
  if (x.size() != alpha.size()) throw std::invalid_argument("combine: dimension mismatch");
  double sum = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) sum += alpha[m] * x[m];
  return sum;
}

GaussianMac::GaussianMac(PowerProfile profile) : profile_(std::move(profile)) {
  if (profile_.powers.empty()) throw std::invalid_argument("GaussianMac: no users");
  for (const double p : profile_.powers) {
    if (!(p > 0.0)) throw std::invalid_argument("GaussianMac: powers must be > 0");
  }
  if (!(profile_.noise_variance >= 0.0)) {
    throw std::invalid_argument("GaussianMac: noise_variance must be >= 0");
  }
}

double GaussianMac::transmit(std::span<const double> x, std::span<const double> alpha,
                             NoiseSource& noise) const {
  if (static_cast<int>(x.size()) != profile_.num_users()) {
    throw std::invalid_argument("transmit: dimension mismatch");
  }
  return combine(x, alpha) + noise.next_gaussian(profile_.noise_variance);
}

double inject_feedback_noise(double y, double sigma_w2, NoiseSource& noise) {
  if (!(sigma_w2 >= 0.0)) throw std::invalid_argument("inject_feedback_noise: sigma_w2 < 0");
  return y + noise.next_gaussian(sigma_w2);
}

}  // namespace pmfc
