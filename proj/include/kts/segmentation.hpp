#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kts/error.hpp"

namespace kts {

/// Result of a segmentation solve. Segment i spans the half-open candidate
/// range [t_{i-1}, t_i) with t_0 = 0 and t_m = n; change_points holds
/// t_1 .. t_{m-1}.
struct Segmentation {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::size_t> change_points;
  double objective = 0.0;       // total within-segment scatter
  double penalty = 0.0;         // weight * g(m, n); 0 for fixed-m solves
  double penalty_weight = 0.0;  // 0 for fixed-m solves
  std::string kernel = "dot";
  std::size_t min_segment_length = 1;

  /// Segment boundaries t_0 .. t_m.
  std::vector<std::size_t> boundaries() const {
    std::vector<std::size_t> b;
    b.reserve(change_points.size() + 2);
    b.push_back(0);
    b.insert(b.end(), change_points.begin(), change_points.end());
    b.push_back(n);
    return b;
  }

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

/// Throws InvariantViolation if seg breaks any structural rule.
inline void validate(const Segmentation& seg) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvariantViolation, why); };
  if (seg.n < 1) fail("n must be >= 1");
  if (seg.m < 1 || seg.m > seg.n) fail("m must lie in [1, n]");
  if (seg.min_segment_length < 1) fail("minSegmentLength must be >= 1");
  if (seg.change_points.size() != seg.m - 1) {
    fail("expected " + std::to_string(seg.m - 1) + " change points, got " +
         std::to_string(seg.change_points.size()));
  }
  std::size_t prev = 0;
  for (std::size_t t : seg.change_points) {
    if (t <= prev || t >= seg.n) fail("change points must be strictly increasing in [1, n-1]");
    prev = t;
  }
  const auto b = seg.boundaries();
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[i] - b[i - 1] < seg.min_segment_length) fail("segment shorter than minSegmentLength");
  }
  if (!std::isfinite(seg.objective) || seg.objective < 0.0) fail("objective must be finite and >= 0");
  if (!std::isfinite(seg.penalty) || seg.penalty < 0.0) fail("penalty must be finite and >= 0");
  if (!std::isfinite(seg.penalty_weight) || seg.penalty_weight < 0.0) {
    fail("penaltyWeight must be finite and >= 0");
  }
}

/// Sum of var over the segments delimited by change_points, accumulated left
/// to right.
template <typename Table>
double segmentation_objective(const Table& table, const std::vector<std::size_t>& change_points) {
  double total = 0.0;
  std::size_t start = 0;
  for (std::size_t t : change_points) {
    total += table.var(start, t);
    start = t;
  }
  return total + table.var(start, table.size());
}

}  // namespace kts
