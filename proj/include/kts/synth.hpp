#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "kts/error.hpp"
#include "kts/features.hpp"

namespace kts {

/// Counter-based generator: the i-th draw is the SplitMix64 finaliser applied
/// to seed + (i + 1) * 0x9E3779B97F4A7C15. Any draw can be reproduced from
/// (seed, i) alone, independent of platform libraries.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t counter) noexcept {
    return mix(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t next_u64() noexcept { return at(seed_, counter_++); }

  /// Uniform in [0, bound) by 128-bit multiply-shift.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal pair by Box-Muller; u1 is shifted into (0, 1].
  std::pair<double, double> next_gaussian_pair() noexcept {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct SyntheticConfig {
  std::size_t n = 100;
  std::size_t d = 8;
  std::size_t segment_count = 4;
  double mean_separation = 5.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SyntheticConfig&, const SyntheticConfig&) = default;
};

struct SyntheticInstance {
  FeatureSequence features;
  std::vector<std::size_t> true_change_points;
  SyntheticConfig config;
};

/// Mean vector for segment s. Segments cycle over the signed coordinate
/// axes (+e0, -e0, +e1, -e1, ...). While they fit on one shell of 2d points
/// the radius is sep / sqrt(2), giving pairwise distances of exactly sep
/// (orthogonal axes) or sqrt(2) * sep (opposite ends of an axis). Beyond 2d
/// segments, further shells at radii sep, 2 sep, ... keep every pair at
/// least sep apart.
inline std::vector<double> segment_mean(std::size_t s, std::size_t segment_count, std::size_t d,
                                        double separation) {
  std::vector<double> mean(d, 0.0);
  const std::size_t per_shell = 2 * d;
  const std::size_t shell = s / per_shell;
  const std::size_t slot = s % per_shell;
  const double unit = segment_count <= per_shell ? separation / std::numbers::sqrt2 : separation;
  const double radius = unit * static_cast<double>(shell + 1);
  mean[slot / 2] = slot % 2 == 0 ? radius : -radius;
  return mean;
}

/// Piecewise-stationary sequence with planted change points.
///
/// Draw order on the counter stream: first the change points (partial
/// Fisher-Yates over [1, n-1], sorted), then row-major Gaussian noise in
/// Box-Muller pairs.
inline SyntheticInstance generate(const SyntheticConfig& config) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InfeasibleConfig, why); };
  if (config.n < 1 || config.d < 1) fail("n and d must be >= 1");
  if (config.segment_count < 1 || config.segment_count > config.n) {
    fail("segment count must lie in [1, n]");
  }
  if (!(config.mean_separation >= 0.0) || !std::isfinite(config.mean_separation)) {
    fail("mean separation must be finite and >= 0");
  }
  if (!(config.noise_sigma >= 0.0) || !std::isfinite(config.noise_sigma)) {
    fail("noise sigma must be finite and >= 0");
  }

  CounterRng rng(config.seed);
  const std::size_t n = config.n;
  const std::size_t d = config.d;
  const std::size_t k = config.segment_count - 1;

  std::vector<std::size_t> slots(n - 1);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i + 1;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.next_below(slots.size() - i);
    std::swap(slots[i], slots[j]);
  }
  std::vector<std::size_t> cps(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(cps.begin(), cps.end());

  std::vector<std::vector<double>> means;
  means.reserve(config.segment_count);
  for (std::size_t s = 0; s < config.segment_count; ++s) {
    means.push_back(segment_mean(s, config.segment_count, d, config.mean_separation));
  }

  std::vector<double> values(n * d);
  std::size_t segment = 0;
  double spare = 0.0;
  bool has_spare = false;
  for (std::size_t i = 0; i < n; ++i) {
    while (segment < k && i >= cps[segment]) ++segment;
    for (std::size_t c = 0; c < d; ++c) {
      double z;
      if (has_spare) {
        z = spare;
        has_spare = false;
      } else {
        auto [z0, z1] = rng.next_gaussian_pair();
        z = z0;
        spare = z1;
        has_spare = true;
      }
      values[i * d + c] = means[segment][c] + config.noise_sigma * z;
    }
  }

  return {FeatureSequence(n, d, std::move(values)), std::move(cps), config};
}

}  // namespace kts
