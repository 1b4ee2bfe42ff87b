#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kts/error.hpp"
#include "kts/features.hpp"
#include "kts/sampling.hpp"
#include "kts/segmentation.hpp"

namespace kts {

inline constexpr std::string_view kSegmentationSchema = "kts-segmentation/1";
inline constexpr std::string_view kPlanSchema = "kts-plan/1";
inline constexpr std::string_view kTruthSchema = "kts-truth/1";
inline constexpr std::array<char, 4> kFeatureMagic = {'K', 'T', 'S', 'F'};
inline constexpr std::uint32_t kFeatureVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 24;

/// Planted change points written next to a synthetic feature file.
struct GroundTruth {
  std::size_t n = 0;
  std::vector<std::size_t> change_points;
  std::uint64_t seed = 0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// ---------------------------------------------------------------------------
// Raw file access

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for '" + path.string() + "'");
  return data;
}

/// Writes to a sibling temporary file and renames it over path, so readers
/// never observe a partially written document.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  if (path.empty()) throw Error(ErrorCode::IoError, "output path is empty");
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + tmp.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto '" + path.string() + "'");
  }
}

// ---------------------------------------------------------------------------
// Binary feature files: "KTSF", u32 version, u64 n, u64 d, then n*d float32,
// all little-endian, row-major.

namespace detail {

template <typename UInt>
void put_le(std::string& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename UInt>
UInt get_le(std::string_view in, std::size_t offset) {
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return value;
}

}  // namespace detail

/// Values are narrowed to float32.
inline std::string encode_features_binary(const FeatureSequence& features) {
  std::string out;
  out.reserve(kFeatureHeaderBytes + features.values().size() * 4);
  out.append(kFeatureMagic.data(), kFeatureMagic.size());
  detail::put_le<std::uint32_t>(out, kFeatureVersion);
  detail::put_le<std::uint64_t>(out, features.size());
  detail::put_le<std::uint64_t>(out, features.dim());
  for (double v : features.values()) {
    detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

inline FeatureSequence decode_features_binary(std::string_view data) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::MalformedHeader, why); };
  if (data.size() < kFeatureHeaderBytes) bad("file shorter than the 24-byte header");
  if (data.substr(0, 4) != std::string_view(kFeatureMagic.data(), 4)) bad("missing KTSF magic");
  const auto version = detail::get_le<std::uint32_t>(data, 4);
  if (version != kFeatureVersion) bad("unsupported version " + std::to_string(version));
  const auto n = detail::get_le<std::uint64_t>(data, 8);
  const auto d = detail::get_le<std::uint64_t>(data, 16);
  if (n == 0 || d == 0) bad("header declares n = " + std::to_string(n) + ", d = " + std::to_string(d));
  const std::uint64_t payload = data.size() - kFeatureHeaderBytes;
  if (n > payload / 4 / d || n * d * 4 != payload) {
    bad("header declares " + std::to_string(n) + " x " + std::to_string(d) +
        " values but payload holds " + std::to_string(payload) + " bytes");
  }
  std::vector<double> values(n * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = detail::get_le<std::uint32_t>(data, kFeatureHeaderBytes + 4 * i);
    values[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return FeatureSequence(n, d, std::move(values));
}

// ---------------------------------------------------------------------------
// CSV feature files: no header row, d comma-separated decimals per row.

inline FeatureSequence parse_features_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t d = 0;
  std::size_t rows = 0;

  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  auto blank = [](std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; };
  while (!lines.empty() && blank(lines.back())) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::MalformedHeader, "CSV feature file is empty");

  for (std::size_t r = 0; r < lines.size(); ++r) {
    std::size_t width = 0;
    std::string_view line = lines[r];
    for (std::size_t pos = 0;;) {
      std::size_t comma = line.find(',', pos);
      std::string_view cell = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);

      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
        const std::string where =
            "row " + std::to_string(r + 1) + ", column " + std::to_string(width + 1);
        if (r == 0) {
          throw Error(ErrorCode::MalformedHeader,
                      "non-numeric cell at " + where +
                          " (CSV feature files must not have a header row)");
        }
        throw Error(ErrorCode::InvalidArgument, "non-numeric cell at " + where);
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue,
                    "row " + std::to_string(r + 1) + ", column " + std::to_string(width + 1));
      }
      values.push_back(v);
      ++width;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (r == 0) {
      d = width;
    } else if (width != d) {
      throw Error(ErrorCode::RaggedRows, "row " + std::to_string(r + 1) + " has " +
                                             std::to_string(width) + " columns, expected " +
                                             std::to_string(d));
    }
    ++rows;
  }
  return FeatureSequence(rows, d, std::move(values));
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_features_csv(const FeatureSequence& features) {
  std::string out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto row = features.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      out += format_double(row[c]);
    }
    out.push_back('\n');
  }
  return out;
}

/// Dispatches on extension: .csv or .ktsf.
inline FeatureSequence read_features(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return parse_features_csv(read_file(path));
  if (ext == ".ktsf") return decode_features_binary(read_file(path));
  throw Error(ErrorCode::InvalidArgument,
              "unknown feature file extension '" + ext + "' (expected .csv or .ktsf)");
}

inline void write_features(const FeatureSequence& features, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return write_file_atomic(path, format_features_csv(features));
  if (ext == ".ktsf") return write_file_atomic(path, encode_features_binary(features));
  throw Error(ErrorCode::InvalidArgument,
              "unknown feature file extension '" + ext + "' (expected .csv or .ktsf)");
}

// ---------------------------------------------------------------------------
// JSON documents

using json = nlohmann::json;

namespace detail {

inline json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaMismatch, what + " is not valid JSON: " + e.what());
  }
}

inline void expect_schema(const json& doc, std::string_view schema) {
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
    throw Error(ErrorCode::SchemaMismatch, "document has no schema tag");
  }
  const auto tag = doc["schema"].get<std::string>();
  if (tag != schema) {
    throw Error(ErrorCode::SchemaMismatch,
                "expected schema '" + std::string(schema) + "', found '" + tag + "'");
  }
}

inline const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw Error(ErrorCode::SchemaMismatch, std::string("missing field '") + key + "'");
  }
  return doc[key];
}

inline std::uint64_t get_count(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer()) {
      throw Error(ErrorCode::InvariantViolation, std::string("field '") + key + "' is negative");
    }
    throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::uint64_t>();
}

inline double get_real(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number()) {
    throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

inline std::vector<std::size_t> get_counts(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_array()) {
    throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be an array");
  }
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number_unsigned()) {
      throw Error(ErrorCode::InvariantViolation,
                  std::string("field '") + key + "' must hold non-negative integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

inline std::vector<double> get_reals(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_array()) {
    throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be an array");
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) {
      throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must hold numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

inline std::string format_segmentation(const Segmentation& seg) {
  json doc = {
      {"schema", kSegmentationSchema},
      {"n", seg.n},
      {"m", seg.m},
      {"changePoints", seg.change_points},
      {"objective", seg.objective},
      {"penalty", seg.penalty},
      {"penaltyWeight", seg.penalty_weight},
      {"kernel", seg.kernel},
      {"minSegmentLength", seg.min_segment_length},
  };
  return doc.dump(2) + "\n";
}

inline Segmentation parse_segmentation(std::string_view text) {
  const json doc = detail::parse_json(text, "segmentation document");
  detail::expect_schema(doc, kSegmentationSchema);
  Segmentation seg;
  seg.n = detail::get_count(doc, "n");
  seg.m = detail::get_count(doc, "m");
  seg.change_points = detail::get_counts(doc, "changePoints");
  seg.objective = detail::get_real(doc, "objective");
  seg.penalty = detail::get_real(doc, "penalty");
  seg.penalty_weight = detail::get_real(doc, "penaltyWeight");
  const json& kernel = detail::field(doc, "kernel");
  if (!kernel.is_string()) throw Error(ErrorCode::SchemaMismatch, "field 'kernel' must be a string");
  seg.kernel = kernel.get<std::string>();
  seg.min_segment_length = detail::get_count(doc, "minSegmentLength");
  validate(seg);
  return seg;
}

inline void write_segmentation(const Segmentation& seg, const std::filesystem::path& path) {
  validate(seg);
  write_file_atomic(path, format_segmentation(seg));
}

inline Segmentation read_segmentation(const std::filesystem::path& path) {
  return parse_segmentation(read_file(path));
}

inline std::string format_plan(const SamplingPlan& plan) {
  json segments = json::array();
  for (const auto& s : plan.segments) {
    segments.push_back({
        {"start", s.start},
        {"end", s.end},
        {"candidates", s.candidates},
        {"sourceFrames", s.source_frames},
        {"timestamps", s.timestamps},
    });
  }
  json doc = {
      {"schema", kPlanSchema},
      {"k", plan.k},
      {"m", plan.segments.size()},
      {"frameCount", plan.frame_count},
      {"segments", std::move(segments)},
  };
  return doc.dump(2) + "\n";
}

inline SamplingPlan parse_plan(std::string_view text) {
  const json doc = detail::parse_json(text, "plan document");
  detail::expect_schema(doc, kPlanSchema);
  SamplingPlan plan;
  plan.k = detail::get_count(doc, "k");
  plan.frame_count = detail::get_count(doc, "frameCount");
  const json& segments = detail::field(doc, "segments");
  if (!segments.is_array()) throw Error(ErrorCode::SchemaMismatch, "'segments' must be an array");
  for (const auto& s : segments) {
    SegmentSamples seg;
    seg.start = detail::get_count(s, "start");
    seg.end = detail::get_count(s, "end");
    seg.candidates = detail::get_counts(s, "candidates");
    seg.source_frames = detail::get_counts(s, "sourceFrames");
    seg.timestamps = detail::get_reals(s, "timestamps");
    plan.segments.push_back(std::move(seg));
  }
  if (detail::get_count(doc, "m") != plan.segments.size()) {
    throw Error(ErrorCode::InvariantViolation, "'m' disagrees with the number of segments");
  }
  validate(plan);
  return plan;
}

inline void write_plan(const SamplingPlan& plan, const std::filesystem::path& path) {
  validate(plan);
  write_file_atomic(path, format_plan(plan));
}

inline SamplingPlan read_plan(const std::filesystem::path& path) { return parse_plan(read_file(path)); }

inline std::string format_truth(const GroundTruth& truth) {
  json doc = {
      {"schema", kTruthSchema},
      {"n", truth.n},
      {"changePoints", truth.change_points},
      {"seed", truth.seed},
  };
  return doc.dump(2) + "\n";
}

inline GroundTruth parse_truth(std::string_view text) {
  const json doc = detail::parse_json(text, "ground-truth document");
  detail::expect_schema(doc, kTruthSchema);
  GroundTruth truth;
  truth.n = detail::get_count(doc, "n");
  truth.change_points = detail::get_counts(doc, "changePoints");
  truth.seed = detail::get_count(doc, "seed");
  std::size_t prev = 0;
  for (std::size_t t : truth.change_points) {
    if (t <= prev || t >= truth.n) {
      throw Error(ErrorCode::InvariantViolation, "change points must be strictly increasing in [1, n-1]");
    }
    prev = t;
  }
  return truth;
}

inline void write_truth(const GroundTruth& truth, const std::filesystem::path& path) {
  write_file_atomic(path, format_truth(truth));
}

inline GroundTruth read_truth(const std::filesystem::path& path) { return parse_truth(read_file(path)); }

/// Change points from either a segmentation or a ground-truth document.
inline std::vector<std::size_t> read_change_points(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const json doc = detail::parse_json(text, "'" + path.string() + "'");
  if (doc.is_object() && doc.contains("schema") && doc["schema"] == kTruthSchema) {
    return parse_truth(text).change_points;
  }
  return parse_segmentation(text).change_points;
}

}  // namespace kts
