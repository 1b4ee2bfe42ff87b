#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "kts/error.hpp"
#include "kts/segmentation.hpp"
#include "kts/variance_table.hpp"

namespace kts {

inline constexpr std::size_t kBruteForceMaxCandidates = 16;

/// Reference solver: enumerates every placement of m - 1 change points in
/// lexicographic order and keeps the first strict minimum, so ties resolve to
/// the lexicographically smallest change-point vector.
inline Segmentation brute_force(const VarianceTable& table, std::size_t m,
                                std::size_t min_segment_length = 1) {
  const std::size_t n = table.size();
  if (n > kBruteForceMaxCandidates) {
    throw Error(ErrorCode::InstanceTooLarge, "brute force is capped at " +
                                                 std::to_string(kBruteForceMaxCandidates) +
                                                 " candidates, got " + std::to_string(n));
  }
  if (min_segment_length < 1) {
    throw Error(ErrorCode::InvalidArgument, "minSegmentLength must be >= 1");
  }
  if (m < 1 || m * min_segment_length > n) {
    throw Error(ErrorCode::InfeasibleSegmentCount,
                std::to_string(m) + " segments do not fit in " + std::to_string(n) + " candidates");
  }

  const std::size_t k = m - 1;
  std::vector<std::size_t> cps(k);
  for (std::size_t i = 0; i < k; ++i) cps[i] = i + 1;

  std::vector<std::size_t> best_cps;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  auto admissible = [&] {
    std::size_t prev = 0;
    for (std::size_t t : cps) {
      if (t - prev < min_segment_length) return false;
      prev = t;
    }
    return n - prev >= min_segment_length;
  };

  while (true) {
    if (admissible()) {
      const double value = segmentation_objective(table, cps);
      if (!found || value < best) {
        best = value;
        best_cps = cps;
        found = true;
      }
    }
    // Next combination of k values from [1, n - 1] in lexicographic order.
    std::size_t i = k;
    while (i > 0 && cps[i - 1] == n - 1 - (k - i)) --i;
    if (i == 0) break;
    ++cps[i - 1];
    for (std::size_t j = i; j < k; ++j) cps[j] = cps[j - 1] + 1;
  }

  Segmentation seg;
  seg.n = n;
  seg.m = m;
  seg.change_points = best_cps;
  seg.objective = best;
  seg.min_segment_length = min_segment_length;
  return seg;
}

}  // namespace kts
