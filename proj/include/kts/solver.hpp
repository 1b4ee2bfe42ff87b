#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "kts/error.hpp"
#include "kts/segmentation.hpp"
#include "kts/variance_table.hpp"

namespace kts {

/// Model-selection penalty g(m, n) = m * ln(m / n + 1).
inline double segment_count_penalty(std::size_t m, std::size_t n) {
  const double md = static_cast<double>(m);
  return md * std::log(md / static_cast<double>(n) + 1.0);
}

/// Exact optimal-partition table for every segment count up to max_segments.
///
/// Row i (1-based) holds cost[i][j], the minimum total scatter of splitting
/// the prefix [0, j) into exactly i segments of length >= min_len. Rows are
/// filled in order so any segment count up to max_segments can be read back
/// without re-solving. Ties in each cell go to the smallest split index.
class PartitionTable {
 public:
  PartitionTable(const VarianceTable& table, std::size_t max_segments, std::size_t min_len = 1)
      : n_(table.size()), max_segments_(max_segments), min_len_(min_len) {
    if (min_len_ < 1) {
      throw Error(ErrorCode::InvalidArgument, "minSegmentLength must be >= 1");
    }
    if (max_segments_ < 1 || max_segments_ > n_ / min_len_) {
      throw Error(ErrorCode::InfeasibleSegmentCount,
                  std::to_string(max_segments_) + " segments of length >= " +
                      std::to_string(min_len_) + " do not fit in " + std::to_string(n_) +
                      " candidates");
    }

    const std::size_t stride = n_ + 1;
    constexpr double inf = std::numeric_limits<double>::infinity();
    cost_.assign(max_segments_ * stride, inf);
    split_.assign(max_segments_ * stride, 0);

    for (std::size_t j = min_len_; j <= n_; ++j) cost_[j] = table.var_unchecked(0, j);

    for (std::size_t i = 2; i <= max_segments_; ++i) {
      const double* prev = &cost_[(i - 2) * stride];
      double* row = &cost_[(i - 1) * stride];
      std::size_t* back = &split_[(i - 1) * stride];
      for (std::size_t j = i * min_len_; j <= n_; ++j) {
        double best = inf;
        std::size_t best_t = 0;
        const std::size_t last = j - min_len_;
        for (std::size_t t = (i - 1) * min_len_; t <= last; ++t) {
          const double candidate = prev[t] + table.var_unchecked(t, j);
          if (candidate < best) {
            best = candidate;
            best_t = t;
          }
        }
        row[j] = best;
        back[j] = best_t;
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t max_segments() const noexcept { return max_segments_; }
  std::size_t min_segment_length() const noexcept { return min_len_; }

  /// Optimal total scatter for exactly m segments over all n candidates.
  double objective(std::size_t m) const {
    check(m);
    return cost_[(m - 1) * (n_ + 1) + n_];
  }

  /// Backtracks the optimal change points for exactly m segments.
  std::vector<std::size_t> change_points(std::size_t m) const {
    check(m);
    std::vector<std::size_t> cps(m - 1);
    std::size_t j = n_;
    for (std::size_t i = m; i >= 2; --i) {
      j = split_[(i - 1) * (n_ + 1) + j];
      cps[i - 2] = j;
    }
    return cps;
  }

  Segmentation segmentation(std::size_t m) const {
    Segmentation seg;
    seg.n = n_;
    seg.m = m;
    seg.change_points = change_points(m);
    seg.objective = objective(m);
    seg.min_segment_length = min_len_;
    return seg;
  }

 private:
  void check(std::size_t m) const {
    if (m < 1 || m > max_segments_) {
      throw Error(ErrorCode::InfeasibleSegmentCount,
                  "segment count " + std::to_string(m) + " outside [1, " +
                      std::to_string(max_segments_) + "]");
    }
  }

  std::size_t n_;
  std::size_t max_segments_;
  std::size_t min_len_;
  std::vector<double> cost_;
  std::vector<std::size_t> split_;
};

/// Globally optimal split into exactly m segments. O(m n^2).
inline Segmentation solve_fixed(const VarianceTable& table, std::size_t m,
                                std::size_t min_segment_length = 1) {
  return PartitionTable(table, m, min_segment_length).segmentation(m);
}

/// Chooses m in [1, max_segments] minimising J_m + weight * g(m, n). Equal
/// penalised totals resolve to the smaller m.
inline Segmentation solve_auto(const VarianceTable& table, std::size_t max_segments,
                               double penalty_weight = 1.0, std::size_t min_segment_length = 1) {
  if (!(penalty_weight > 0.0) || !std::isfinite(penalty_weight)) {
    throw Error(ErrorCode::NonPositivePenaltyWeight, "penalty weight must be positive and finite");
  }
  const PartitionTable dp(table, max_segments, min_segment_length);
  const std::size_t n = table.size();

  std::size_t best_m = 1;
  double best_total = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= max_segments; ++m) {
    const double total = dp.objective(m) + penalty_weight * segment_count_penalty(m, n);
    if (total < best_total) {
      best_total = total;
      best_m = m;
    }
  }
  Segmentation seg = dp.segmentation(best_m);
  seg.penalty_weight = penalty_weight;
  seg.penalty = penalty_weight * segment_count_penalty(best_m, n);
  return seg;
}

}  // namespace kts
