#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kts/error.hpp"
#include "kts/features.hpp"

namespace kts {

inline constexpr std::size_t kDefaultMaxCandidates = 4096;

/// Pairwise similarity between frame descriptors. Dot-product on raw
/// features is the default; cosine and rbf are extensions.
struct KernelSpec {
  enum class Kind { DotProduct, Cosine, Rbf };

  Kind kind = Kind::DotProduct;
  double bandwidth = 1.0;  // rbf only

  static KernelSpec dot() { return {}; }
  static KernelSpec cosine() { return {Kind::Cosine, 1.0}; }
  static KernelSpec rbf(double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
      throw Error(ErrorCode::InvalidArgument, "rbf bandwidth must be positive");
    }
    return {Kind::Rbf, bandwidth};
  }

  /// Parses "dot", "cosine" or "rbf:<bandwidth>".
  static KernelSpec parse(std::string_view text) {
    if (text == "dot") return dot();
    if (text == "cosine") return cosine();
    if (text.starts_with("rbf:")) {
      std::string_view num = text.substr(4);
      double bw = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), bw);
      if (ec != std::errc{} || ptr != num.data() + num.size()) {
        throw Error(ErrorCode::InvalidArgument, "bad rbf bandwidth '" + std::string(num) + "'");
      }
      return rbf(bw);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(text) + "'");
  }

  std::string tag() const {
    switch (kind) {
      case Kind::DotProduct: return "dot";
      case Kind::Cosine: return "cosine";
      case Kind::Rbf: {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, bandwidth);
        return "rbf:" + std::string(buf, res.ptr);
      }
    }
    return "dot";
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Symmetric n x n kernel matrix, row-major.
class GramMatrix {
 public:
  GramMatrix(std::size_t n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    if (entries_.size() != n_ * n_) {
      throw Error(ErrorCode::InvalidArgument, "gram entries must be n*n");
    }
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  const std::vector<double>& entries() const noexcept { return entries_; }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    s += diff * diff;
  }
  return s;
}

}  // namespace detail

/// Evaluates the kernel on every pair of rows. Only the upper triangle is
/// computed; the lower triangle is mirrored so the result is exactly symmetric.
inline GramMatrix compute_gram(const FeatureSequence& features, const KernelSpec& kernel,
                               std::size_t max_candidates = kDefaultMaxCandidates) {
  const std::size_t n = features.size();
  if (n > max_candidates) {
    throw Error(ErrorCode::TooManyCandidates, std::to_string(n) + " candidates exceed the cap of " +
                                                  std::to_string(max_candidates));
  }

  std::vector<double> inv_norm;
  if (kernel.kind == KernelSpec::Kind::Cosine) {
    inv_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = std::sqrt(detail::dot(features.row(i), features.row(i)));
      if (norm == 0.0) {
        throw Error(ErrorCode::ZeroNormRow, "row " + std::to_string(i + 1) + " has zero norm");
      }
      inv_norm[i] = 1.0 / norm;
    }
  }
  if (kernel.kind == KernelSpec::Kind::Rbf && !(kernel.bandwidth > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rbf bandwidth must be positive");
  }
  const double rbf_scale =
      kernel.kind == KernelSpec::Kind::Rbf ? 1.0 / (2.0 * kernel.bandwidth * kernel.bandwidth) : 0.0;

  std::vector<double> g(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = features.row(i);
    for (std::size_t j = i; j < n; ++j) {
      const auto xj = features.row(j);
      double value = 0.0;
      switch (kernel.kind) {
        case KernelSpec::Kind::DotProduct:
          value = detail::dot(xi, xj);
          break;
        case KernelSpec::Kind::Cosine:
          value = i == j ? 1.0 : detail::dot(xi, xj) * inv_norm[i] * inv_norm[j];
          break;
        case KernelSpec::Kind::Rbf:
          value = std::exp(-detail::squared_distance(xi, xj) * rbf_scale);
          break;
      }
      g[i * n + j] = value;
      g[j * n + i] = value;
    }
  }
  return GramMatrix(n, std::move(g));
}

}  // namespace kts
