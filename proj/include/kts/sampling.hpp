#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kts/error.hpp"
#include "kts/segmentation.hpp"

namespace kts {

/// Original video timeline: duration T in seconds and native frame rate.
class VideoTimeline {
 public:
  VideoTimeline(double duration_seconds, double source_fps,
                std::optional<std::size_t> frame_count = std::nullopt)
      : duration_(duration_seconds), fps_(source_fps) {
    if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
      throw Error(ErrorCode::InvalidArgument, "duration must be positive");
    }
    if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
      throw Error(ErrorCode::InvalidArgument, "fps must be positive");
    }
    frame_count_ = frame_count ? *frame_count
                               : static_cast<std::size_t>(std::floor(duration_ * fps_));
    if (frame_count_ < 1) {
      throw Error(ErrorCode::InvalidArgument, "timeline holds no source frames");
    }
  }

  double duration_seconds() const noexcept { return duration_; }
  double source_fps() const noexcept { return fps_; }
  std::size_t frame_count() const noexcept { return frame_count_; }

 private:
  double duration_;
  double fps_;
  std::size_t frame_count_ = 0;
};

struct Candidate {
  std::size_t index = 0;
  double timestamp = 0.0;
  std::size_t source_frame = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Number of candidates produced by downsampling the timeline to rate per
/// second; always at least one.
inline std::size_t candidate_count(const VideoTimeline& timeline, double rate_per_second) {
  if (!(rate_per_second > 0.0) || !std::isfinite(rate_per_second)) {
    throw Error(ErrorCode::NonPositiveRate, "candidate rate must be positive");
  }
  const double last = std::floor(timeline.duration_seconds() * rate_per_second - 1e-9);
  return last < 0.0 ? 1 : static_cast<std::size_t>(last) + 1;
}

/// Candidate j sits at the start of its window, t = j / rate, and maps to
/// the nearest source frame (half away from zero), clamped to the video.
inline std::vector<Candidate> candidate_timestamps(const VideoTimeline& timeline,
                                                   double rate_per_second) {
  const std::size_t count = candidate_count(timeline, rate_per_second);
  std::vector<Candidate> out;
  out.reserve(count);
  const auto last_frame = static_cast<long long>(timeline.frame_count() - 1);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) / rate_per_second;
    const long long frame = std::clamp(std::llround(t * timeline.source_fps()), 0LL, last_frame);
    out.push_back({j, t, static_cast<std::size_t>(frame)});
  }
  return out;
}

struct SegmentSamples {
  std::size_t start = 0;  // candidate range [start, end)
  std::size_t end = 0;
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> source_frames;
  std::vector<double> timestamps;

  friend bool operator==(const SegmentSamples&, const SegmentSamples&) = default;
};

/// m segments x k frames on the original video timeline.
struct SamplingPlan {
  std::size_t k = 0;
  std::size_t frame_count = 0;
  std::vector<SegmentSamples> segments;

  std::vector<std::size_t> flat_candidates() const {
    std::vector<std::size_t> out;
    for (const auto& s : segments) out.insert(out.end(), s.candidates.begin(), s.candidates.end());
    return out;
  }
  std::vector<std::size_t> flat_source_frames() const {
    std::vector<std::size_t> out;
    for (const auto& s : segments) {
      out.insert(out.end(), s.source_frames.begin(), s.source_frames.end());
    }
    return out;
  }

  friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

/// Position of the i-th of k samples in a window of length len: the centre
/// of the i-th stratum, floor((i + 0.5) * len / k). Windows shorter than k
/// repeat indices.
constexpr std::size_t stratum_offset(std::size_t i, std::size_t len, std::size_t k) noexcept {
  return ((2 * i + 1) * len) / (2 * k);
}

namespace detail {

inline SamplingPlan sample_boundaries(const std::vector<std::size_t>& bounds, std::size_t k,
                                      const std::vector<Candidate>& candidates,
                                      std::size_t frame_count) {
  SamplingPlan plan;
  plan.k = k;
  plan.frame_count = frame_count;
  plan.segments.reserve(bounds.size() - 1);
  // Samples are drawn from the candidate pool only. Sampling from the full
  // source-frame span of each segment would instead map each stratum centre
  // in time to a source frame.
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    SegmentSamples seg;
    seg.start = bounds[s];
    seg.end = bounds[s + 1];
    const std::size_t len = seg.end - seg.start;
    for (std::size_t i = 0; i < k; ++i) {
      const Candidate& c = candidates[seg.start + stratum_offset(i, len, k)];
      seg.candidates.push_back(c.index);
      seg.source_frames.push_back(c.source_frame);
      seg.timestamps.push_back(c.timestamp);
    }
    plan.segments.push_back(std::move(seg));
  }
  return plan;
}

inline void check_k(std::size_t k) {
  if (k < 1) throw Error(ErrorCode::NonPositiveK, "k must be >= 1");
}

}  // namespace detail

/// Samples k frames from every segment of seg and maps them to the video.
inline SamplingPlan plan_samples(const Segmentation& seg, std::size_t k,
                                 const VideoTimeline& timeline, double rate_per_second) {
  detail::check_k(k);
  const auto candidates = candidate_timestamps(timeline, rate_per_second);
  if (candidates.size() != seg.n) {
    throw Error(ErrorCode::CandidateCountMismatch,
                "timeline yields " + std::to_string(candidates.size()) +
                    " candidates but segmentation has n = " + std::to_string(seg.n));
  }
  validate(seg);
  return detail::sample_boundaries(seg.boundaries(), k, candidates, timeline.frame_count());
}

/// Boundaries of the equal-length split: segment i spans
/// [floor(i n / m), floor((i + 1) n / m)).
inline std::vector<std::size_t> uniform_boundaries(std::size_t n, std::size_t m) {
  if (m < 1 || m > n) {
    throw Error(ErrorCode::InfeasibleSegmentCount,
                "cannot split " + std::to_string(n) + " candidates into " + std::to_string(m) +
                    " segments");
  }
  std::vector<std::size_t> b(m + 1);
  for (std::size_t i = 0; i <= m; ++i) b[i] = i * n / m;
  return b;
}

/// Interior boundaries of the equal-length split, as change points.
inline std::vector<std::size_t> uniform_change_points(std::size_t n, std::size_t m) {
  auto b = uniform_boundaries(n, m);
  return {b.begin() + 1, b.end() - 1};
}

/// Uniform-sampling baseline: equal-length segments, then k per segment.
inline SamplingPlan uniform_plan(std::size_t n, std::size_t m, std::size_t k,
                                 const VideoTimeline& timeline, double rate_per_second) {
  detail::check_k(k);
  const auto bounds = uniform_boundaries(n, m);
  const auto candidates = candidate_timestamps(timeline, rate_per_second);
  if (candidates.size() != n) {
    throw Error(ErrorCode::CandidateCountMismatch,
                "timeline yields " + std::to_string(candidates.size()) + " candidates, expected " +
                    std::to_string(n));
  }
  return detail::sample_boundaries(bounds, k, candidates, timeline.frame_count());
}

/// Throws InvariantViolation if the plan breaks its structural rules.
inline void validate(const SamplingPlan& plan) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvariantViolation, why); };
  if (plan.k < 1) fail("k must be >= 1");
  if (plan.segments.empty()) fail("plan has no segments");
  std::size_t prev_end = 0;
  std::size_t prev_frame = 0;
  for (const auto& s : plan.segments) {
    if (s.start != prev_end || s.end <= s.start) fail("segment ranges must tile the candidates");
    prev_end = s.end;
    if (s.candidates.size() != plan.k || s.source_frames.size() != plan.k ||
        s.timestamps.size() != plan.k) {
      fail("every segment must carry exactly k samples");
    }
    for (std::size_t i = 0; i < plan.k; ++i) {
      if (s.candidates[i] < s.start || s.candidates[i] >= s.end) fail("sample outside its segment");
      if (i > 0 && s.candidates[i] < s.candidates[i - 1]) fail("samples must be non-decreasing");
      if (s.source_frames[i] >= plan.frame_count) fail("source frame outside the video");
      if (s.source_frames[i] < prev_frame) fail("source frames must be non-decreasing");
      prev_frame = s.source_frames[i];
    }
  }
}

}  // namespace kts
