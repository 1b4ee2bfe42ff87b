#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kts/error.hpp"
#include "kts/kernel.hpp"

namespace kts {

/// O(1) within-segment scatter queries over half-open windows [a, b).
///
/// The segment mean lives in the kernel's feature space and is never
/// materialised: the scatter of a window equals the trace of its Gram block
/// minus the block sum divided by the window length. Both terms come from
/// prefix sums over the diagonal and from an integral image of the Gram
/// matrix, so building the table is O(n^2) and every query is O(1).
class VarianceTable {
 public:
  explicit VarianceTable(const GramMatrix& gram)
      : n_(gram.size()),
        stride_(gram.size() + 1),
        diag_(n_ + 1, 0.0),
        block_diag_(n_ + 1, 0.0),
        block_(stride_ * stride_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) diag_[i + 1] = diag_[i] + gram(i, i);
    for (std::size_t i = 0; i < n_; ++i) {
      double row_sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        row_sum += gram(i, j);
        block_[(i + 1) * stride_ + (j + 1)] = block_[i * stride_ + (j + 1)] + row_sum;
      }
    }
    for (std::size_t i = 0; i <= n_; ++i) block_diag_[i] = block_[i * stride_ + i];
  }

  std::size_t size() const noexcept { return n_; }

  /// Sum of G[r][c] over a <= r < b, a <= c < b. G is symmetric, so the two
  /// off-diagonal corners of the integral image coincide and only the row
  /// for b is read; queries with fixed b and varying a stay contiguous.
  double block_sum(std::size_t a, std::size_t b) const noexcept {
    return block_diag_[b] - 2.0 * block_[b * stride_ + a] + block_diag_[a];
  }

  /// Integral image entry: sum of G[r][c] over r < i, c < j.
  double integral(std::size_t i, std::size_t j) const noexcept { return block_[i * stride_ + j]; }

  /// Unclamped scatter; may be slightly negative from cancellation.
  double raw_var(std::size_t a, std::size_t b) const noexcept {
    return (diag_[b] - diag_[a]) - block_sum(a, b) / static_cast<double>(b - a);
  }

  /// Scatter of window [a, b), clamped at zero. Throws IndexOutOfRange
  /// unless 0 <= a < b <= n.
  double var(std::size_t a, std::size_t b) const {
    if (!(a < b && b <= n_)) {
      throw Error(ErrorCode::IndexOutOfRange, "window [" + std::to_string(a) + ", " +
                                                  std::to_string(b) + ") outside [0, " +
                                                  std::to_string(n_) + "]");
    }
    return var_unchecked(a, b);
  }

  double var_unchecked(std::size_t a, std::size_t b) const noexcept {
    if (b - a == 1) return 0.0;
    const double raw = raw_var(a, b);
    // Cancellation error scales with the magnitude of the trace term.
    assert(raw >= -1e-9 * std::max(1.0, std::abs(diag_[b] - diag_[a])));
    return raw > 0.0 ? raw : 0.0;
  }

 private:
  std::size_t n_;
  std::size_t stride_;
  std::vector<double> diag_;        // prefix sums of the Gram diagonal
  std::vector<double> block_diag_;  // block_[i][i]
  std::vector<double> block_;       // (n+1) x (n+1) integral image
};

inline VarianceTable build_variance_table(const GramMatrix& gram) { return VarianceTable(gram); }

}  // namespace kts
