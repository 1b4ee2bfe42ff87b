#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "kts/io.hpp"
#include "kts/synth.hpp"
#include "test_oracles.hpp"

namespace kts {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kts_io_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

  fs::path dir_;
};

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST_F(IoTest, ReadsCsv) {
  const auto x = read_features(write("a.csv", "1,0\n0,1\n"));
  EXPECT_EQ(x.size(), 2u);
  EXPECT_EQ(x.dim(), 2u);
  EXPECT_EQ(x.values(), (std::vector<double>{1, 0, 0, 1}));
  const auto y = read_features(write("b.csv", " 1.5, -2e-3\r\n+3,4\r\n\r\n"));
  EXPECT_EQ(y.values(), (std::vector<double>{1.5, -2e-3, 3, 4}));
}

TEST_F(IoTest, CsvErrors) {
  EXPECT_EQ(code_of([&] { read_features(write("r.csv", "1,0\n0\n")); }), ErrorCode::RaggedRows);
  EXPECT_EQ(code_of([&] { read_features(write("h.csv", "a,b\n1,2\n")); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([&] { read_features(write("e.csv", "")); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([&] { read_features(write("n.csv", "1,2\n3,nan\n")); }), ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of([&] { read_features(write("i.csv", "1,inf\n")); }), ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of([&] { read_features(dir_ / "missing.csv"); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([&] { read_features(write("x.txt", "1\n")); }), ErrorCode::InvalidArgument);
  try {
    read_features(write("loc.csv", "1,2\n3,nan\n"));
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos) << e.what();
  }
}

TEST_F(IoTest, BinaryLayout) {
  const auto x = FeatureSequence::from_rows({{1.0, -2.0}});
  const std::string bytes = encode_features_binary(x);
  ASSERT_EQ(bytes.size(), 24u + 8u);
  EXPECT_EQ(bytes.substr(0, 4), "KTSF");
  const std::string expected_header("KTSF\x01\x00\x00\x00\x01\x00\x00\x00\x00\x00\x00\x00\x02\x00\x00\x00\x00\x00\x00\x00", 24);
  EXPECT_EQ(bytes.substr(0, 24), expected_header);
  // 1.0f = 0x3F800000, -2.0f = 0xC0000000, little-endian.
  EXPECT_EQ(bytes.substr(24), std::string("\x00\x00\x80\x3F\x00\x00\x00\xC0", 8));
}

TEST_F(IoTest, BinaryErrors) {
  std::string header = encode_features_binary(FeatureSequence::from_rows({{1.0}}));
  std::string zero_n = header;
  for (int i = 8; i < 16; ++i) zero_n[i] = 0;
  EXPECT_EQ(code_of([&] { read_features(write("z.ktsf", zero_n.substr(0, 24))); }),
            ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([&] { read_features(write("t.ktsf", header.substr(0, 27))); }),
            ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([&] { read_features(write("l.ktsf", header + "xxxx")); }),
            ErrorCode::MalformedHeader);
  std::string bad_magic = header;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { read_features(write("m.ktsf", bad_magic)); }), ErrorCode::MalformedHeader);
  std::string bad_version = header;
  bad_version[4] = 2;
  EXPECT_EQ(code_of([&] { read_features(write("v.ktsf", bad_version)); }), ErrorCode::MalformedHeader);
  std::string nan_payload = header;
  nan_payload.replace(24, 4, std::string("\x00\x00\xC0\x7F", 4));
  EXPECT_EQ(code_of([&] { read_features(write("nan.ktsf", nan_payload)); }), ErrorCode::NonFiniteValue);
}

TEST_F(IoTest, FeatureRoundTrips) {
  CounterRng rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_below(20);
    const std::size_t d = 1 + rng.next_below(6);
    std::vector<double> v(n * d);
    // float-representable values survive the binary format exactly.
    for (double& e : v) e = static_cast<float>((rng.next_unit() - 0.5) * 1e3);
    const FeatureSequence x(n, d, v);
    write_features(x, dir_ / "f.ktsf");
    EXPECT_EQ(read_features(dir_ / "f.ktsf"), x);
    // CSV keeps full double precision.
    std::vector<double> w(n * d);
    for (double& e : w) e = (rng.next_unit() - 0.5) * 1e-3;
    const FeatureSequence y(n, d, w);
    write_features(y, dir_ / "f.csv");
    EXPECT_EQ(read_features(dir_ / "f.csv"), y);
  }
}

TEST_F(IoTest, SegmentationRoundTrip) {
  Segmentation s;
  s.n = 4;
  s.m = 2;
  s.change_points = {2};
  s.objective = 0.1 + 0.2;
  s.penalty = 2.0 * std::log(1.5);
  s.penalty_weight = 1.0 / 3.0;
  s.kernel = "rbf:0.5";
  write_segmentation(s, dir_ / "s.json");
  EXPECT_EQ(read_segmentation(dir_ / "s.json"), s);
  EXPECT_FALSE(fs::exists(dir_ / "s.json.tmp"));
}

TEST_F(IoTest, SegmentationRejections) {
  const std::string base =
      R"({"schema":"kts-segmentation/1","n":4,"m":3,"changePoints":[3,2],"objective":0,)"
      R"("penalty":0,"penaltyWeight":0,"kernel":"dot","minSegmentLength":1})";
  EXPECT_EQ(code_of([&] { parse_segmentation(base); }), ErrorCode::InvariantViolation);
  std::string v9 = base;
  v9.replace(v9.find("/1"), 2, "/9");
  EXPECT_EQ(code_of([&] { parse_segmentation(v9); }), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code_of([&] { parse_segmentation("{not json"); }), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code_of([&] { parse_segmentation(R"({"schema":"kts-segmentation/1"})"); }),
            ErrorCode::SchemaMismatch);
  std::string wrong_m = base;
  wrong_m.replace(wrong_m.find("[3,2]"), 5, "[2]");
  EXPECT_EQ(code_of([&] { parse_segmentation(wrong_m); }), ErrorCode::InvariantViolation);
  std::string short_seg = base;
  short_seg.replace(short_seg.find("[3,2]"), 5, "[1,2]");
  short_seg.replace(short_seg.find("\"minSegmentLength\":1"), 20, "\"minSegmentLength\":2");
  EXPECT_EQ(code_of([&] { parse_segmentation(short_seg); }), ErrorCode::InvariantViolation);
}

TEST_F(IoTest, RandomSegmentationRoundTrips) {
  CounterRng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Segmentation s;
    s.n = 1 + rng.next_below(500);
    s.m = 1 + rng.next_below(s.n);
    std::vector<std::size_t> slots(s.n - 1);
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i + 1;
    for (std::size_t i = 0; i + 1 < s.m; ++i) std::swap(slots[i], slots[i + rng.next_below(slots.size() - i)]);
    s.change_points.assign(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(s.m - 1));
    std::sort(s.change_points.begin(), s.change_points.end());
    s.objective = rng.next_unit() * 1e6;
    s.penalty = rng.next_unit();
    s.penalty_weight = rng.next_unit() * 10;
    s.kernel = trial % 2 ? "dot" : "cosine";
    EXPECT_EQ(parse_segmentation(format_segmentation(s)), s);
  }
}

TEST_F(IoTest, PlanRoundTrip) {
  const auto plan = plan_samples(
      [] {
        Segmentation s;
        s.n = 4;
        s.m = 2;
        s.change_points = {2};
        return s;
      }(),
      2, VideoTimeline(4.0, 30.0), 1.0);
  write_plan(plan, dir_ / "p.json");
  const auto doc = json::parse(read_file(dir_ / "p.json"));
  EXPECT_EQ(doc["segments"].size(), 2u);
  EXPECT_EQ(doc["segments"][0]["sourceFrames"].size(), 2u);
  EXPECT_EQ(read_plan(dir_ / "p.json"), plan);
}

TEST_F(IoTest, RandomPlanRoundTrips) {
  CounterRng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const VideoTimeline timeline(1.0 + static_cast<double>(rng.next_below(300)), 29.97);
    const std::size_t n = candidate_count(timeline, 1.0);
    const std::size_t m = 1 + rng.next_below(std::min<std::size_t>(n, 20));
    const auto plan = uniform_plan(n, m, 1 + rng.next_below(5), timeline, 1.0);
    EXPECT_EQ(parse_plan(format_plan(plan)), plan);
  }
}

TEST_F(IoTest, WriteErrorsCarryPath) {
  try {
    write_plan(uniform_plan(2, 1, 1, VideoTimeline(2.0, 30.0), 1.0), "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  try {
    write_file_atomic(dir_ / "no_such_dir" / "x.json", "{}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
    EXPECT_NE(std::string(e.what()).find("no_such_dir"), std::string::npos);
  }
}

TEST_F(IoTest, TruthRoundTripAndChangePointDispatch) {
  const GroundTruth truth{200, {10, 50, 120}, 42};
  write_truth(truth, dir_ / "t.json");
  EXPECT_EQ(read_truth(dir_ / "t.json"), truth);
  EXPECT_EQ(read_change_points(dir_ / "t.json"), truth.change_points);
  const auto doc = json::parse(read_file(dir_ / "t.json"));
  EXPECT_EQ(doc["schema"], "kts-truth/1");
  EXPECT_EQ(doc["seed"], 42);
}

TEST_F(IoTest, BinaryBytesStable) {
  const auto a = generate({50, 8, 3, 5.0, 1.0, 9});
  const auto b = generate({50, 8, 3, 5.0, 1.0, 9});
  write_features(a.features, dir_ / "a.ktsf");
  write_features(b.features, dir_ / "b.ktsf");
  EXPECT_EQ(read_file(dir_ / "a.ktsf"), read_file(dir_ / "b.ktsf"));
}

}  // namespace
}  // namespace kts
