#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "kts/error.hpp"
#include "kts/sampling.hpp"
#include "kts/segmentation.hpp"
#include "kts/solver.hpp"
#include "kts/variance_table.hpp"

namespace kts {

struct BoundaryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched = 0;
  std::size_t tolerance = 0;
};

namespace detail {

inline void require_strictly_increasing(const std::vector<std::size_t>& v, const char* name) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) {
      throw Error(ErrorCode::UnsortedInput, std::string(name) + " must be strictly increasing");
    }
  }
}

}  // namespace detail

/// Boundary precision/recall under one-to-one matching within tolerance.
/// Pairs are matched greedily, closest first (ties by predicted then truth
/// index). An empty prediction has precision 1; an empty truth has recall 1.
inline BoundaryMetrics boundary_metrics(const std::vector<std::size_t>& predicted,
                                        const std::vector<std::size_t>& truth,
                                        std::size_t tolerance) {
  detail::require_strictly_increasing(predicted, "predicted");
  detail::require_strictly_increasing(truth, "truth");

  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> pairs;
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    for (std::size_t t = 0; t < truth.size(); ++t) {
      const std::size_t dist =
          predicted[p] > truth[t] ? predicted[p] - truth[t] : truth[t] - predicted[p];
      if (dist <= tolerance) pairs.emplace_back(dist, p, t);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<bool> used_pred(predicted.size(), false);
  std::vector<bool> used_truth(truth.size(), false);
  std::size_t matched = 0;
  for (const auto& [dist, p, t] : pairs) {
    if (used_pred[p] || used_truth[t]) continue;
    used_pred[p] = used_truth[t] = true;
    ++matched;
  }

  BoundaryMetrics m;
  m.matched = matched;
  m.tolerance = tolerance;
  m.precision = predicted.empty() ? 1.0 : static_cast<double>(matched) / predicted.size();
  m.recall = truth.empty() ? 1.0 : static_cast<double>(matched) / truth.size();
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

struct ObjectiveComparison {
  double kts_objective = 0.0;
  double uniform_objective = 0.0;
};

/// Optimal m-segment objective next to that of the equal-length split.
inline ObjectiveComparison objective_comparison(const VarianceTable& table, std::size_t m) {
  const Segmentation seg = solve_fixed(table, m);
  ObjectiveComparison out{seg.objective,
                          segmentation_objective(table, uniform_change_points(table.size(), m))};
  if (out.kts_objective > out.uniform_objective) {
    throw Error(ErrorCode::InvariantViolation, "optimal objective exceeds the uniform split");
  }
  return out;
}

/// Segment counts floor(n / q) for q = 1, 2, 3, 4, 6, 8, 12, 16, 24, ...
/// (alternating x4/3 and x3/2 steps), deduplicated, largest first.
inline std::vector<std::size_t> sweep_grid(std::size_t n) {
  std::vector<std::size_t> grid;
  auto push = [&](std::size_t q) {
    const std::size_t m = n / q;
    if (m >= 1 && (grid.empty() || grid.back() != m)) grid.push_back(m);
    return m >= 1;
  };
  push(1);
  push(2);
  for (std::size_t q = 3; push(q) && push(q + q / 3); q *= 2) {
  }
  if (grid.back() != 1) grid.push_back(1);
  return grid;
}

struct SweepRow {
  std::size_t m = 0;
  double kts_objective = 0.0;
  double uniform_objective = 0.0;
  double kts_f1 = 0.0;
  double uniform_f1 = 0.0;
};

/// KTS against the uniform split for every segment count in grid, sharing a
/// single partition table. Boundary F1 is scored against truth.
inline std::vector<SweepRow> sweep_instance(const VarianceTable& table,
                                            const std::vector<std::size_t>& grid,
                                            const std::vector<std::size_t>& truth,
                                            std::size_t tolerance) {
  if (grid.empty()) return {};
  const PartitionTable dp(table, *std::max_element(grid.begin(), grid.end()));
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t m : grid) {
    const auto uniform_cps = uniform_change_points(table.size(), m);
    SweepRow row;
    row.m = m;
    row.kts_objective = dp.objective(m);
    row.uniform_objective = segmentation_objective(table, uniform_cps);
    if (row.kts_objective > row.uniform_objective) {
      throw Error(ErrorCode::InvariantViolation,
                  "optimal objective exceeds the uniform split at m = " + std::to_string(m));
    }
    row.kts_f1 = boundary_metrics(dp.change_points(m), truth, tolerance).f1;
    row.uniform_f1 = boundary_metrics(uniform_cps, truth, tolerance).f1;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace kts
