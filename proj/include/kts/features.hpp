#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kts/error.hpp"

namespace kts {

/// n candidate frames by d feature components, stored row-major in double
/// precision. Optional per-frame timestamps (seconds, strictly increasing).
class FeatureSequence {
 public:
  FeatureSequence(std::size_t n, std::size_t d, std::vector<double> values,
                  std::vector<double> timestamps = {})
      : n_(n), d_(d), values_(std::move(values)), timestamps_(std::move(timestamps)) {
    if (n_ == 0 || d_ == 0) {
      throw Error(ErrorCode::InvalidArgument, "feature sequence needs n >= 1 and d >= 1");
    }
    if (values_.size() != n_ * d_) {
      throw Error(ErrorCode::InvalidArgument,
                  "expected " + std::to_string(n_ * d_) + " values, got " +
                      std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(i / d_ + 1) +
                                                   ", column " + std::to_string(i % d_ + 1));
      }
    }
    if (!timestamps_.empty()) {
      if (timestamps_.size() != n_) {
        throw Error(ErrorCode::InvalidArgument, "timestamps must have length n");
      }
      for (std::size_t i = 1; i < n_; ++i) {
        if (!(timestamps_[i] > timestamps_[i - 1])) {
          throw Error(ErrorCode::InvalidArgument, "timestamps must be strictly increasing");
        }
      }
    }
  }

  /// Builds a sequence from a list of equal-width rows.
  static FeatureSequence from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
      throw Error(ErrorCode::InvalidArgument, "feature sequence needs n >= 1 and d >= 1");
    }
    const std::size_t d = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& row : rows) {
      if (row.size() != d) throw Error(ErrorCode::RaggedRows, "rows differ in width");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return FeatureSequence(rows.size(), d, std::move(flat));
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * d_, d_};
  }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& timestamps() const noexcept { return timestamps_; }
  bool has_timestamps() const noexcept { return !timestamps_.empty(); }

  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> values_;
  std::vector<double> timestamps_;
};

}  // namespace kts
