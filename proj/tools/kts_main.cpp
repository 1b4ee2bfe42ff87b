// kts: command-line front end for kernel temporal segmentation.
//
// Exit codes: 0 success, 1 validation/invariant failure, 2 usage error.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kts/kts.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::string join(const std::vector<std::size_t>& v) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << ']';
  return out.str();
}

std::size_t max_candidates_from_env() {
  const char* env = std::getenv("KTS_MAX_CANDIDATES");
  if (env == nullptr || *env == '\0') return kts::kDefaultMaxCandidates;
  std::size_t value = 0;
  const std::string_view text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc{} && ptr == text.data() + text.size() && value > 0,
          "KTS_MAX_CANDIDATES must be a positive integer");
  return value;
}

kts::VarianceTable table_for(const kts::FeatureSequence& features, const kts::KernelSpec& kernel) {
  return kts::VarianceTable(kts::compute_gram(features, kernel, max_candidates_from_env()));
}

// --- segment ---------------------------------------------------------------

struct SegmentArgs {
  std::string features;
  std::optional<std::size_t> m;
  bool automatic = false;
  std::optional<std::size_t> max_segments;
  double penalty_weight = 1.0;
  std::string kernel = "dot";
  std::size_t min_seg_len = 1;
  std::string out;
};

int run_segment(const SegmentArgs& a) {
  require(a.m.has_value() != a.automatic, "exactly one of --m or --auto is required");
  if (a.m) require(*a.m >= 1, "--m must be >= 1");
  if (a.automatic) {
    require(a.max_segments.has_value(), "--auto requires --max-segments");
    require(*a.max_segments >= 1, "--max-segments must be >= 1");
    require(a.penalty_weight > 0.0 && std::isfinite(a.penalty_weight),
            "--penalty-weight must be positive");
  }
  require(a.min_seg_len >= 1, "--min-seg-len must be >= 1");
  kts::KernelSpec kernel;
  try {
    kernel = kts::KernelSpec::parse(a.kernel);
  } catch (const kts::Error& e) {
    throw UsageError(e.what());
  }

  const auto features = kts::read_features(a.features);
  const auto table = table_for(features, kernel);
  kts::Segmentation seg =
      a.automatic ? kts::solve_auto(table, *a.max_segments, a.penalty_weight, a.min_seg_len)
                  : kts::solve_fixed(table, *a.m, a.min_seg_len);
  seg.kernel = kernel.tag();
  kts::write_segmentation(seg, a.out);

  std::cout << "m=" << seg.m << " changePoints=" << join(seg.change_points)
            << " objective=" << kts::format_double(seg.objective);
  if (a.automatic) std::cout << " penalty=" << kts::format_double(seg.penalty);
  std::cout << '\n';
  return 0;
}

// --- plan ------------------------------------------------------------------

struct PlanArgs {
  std::string segmentation;
  std::size_t k = 0;
  double duration = 0.0;
  double fps = 0.0;
  double rate = 1.0;
  std::optional<std::size_t> frame_count;
  std::string out;
};

int run_plan(const PlanArgs& a) {
  require(a.k >= 1, "--k must be >= 1");
  require(a.duration > 0.0 && std::isfinite(a.duration), "--duration must be positive");
  require(a.fps > 0.0 && std::isfinite(a.fps), "--fps must be positive");
  require(a.rate > 0.0 && std::isfinite(a.rate), "--rate must be positive");
  if (a.frame_count) require(*a.frame_count >= 1, "--frame-count must be >= 1");

  const auto seg = kts::read_segmentation(a.segmentation);
  const kts::VideoTimeline timeline(a.duration, a.fps, a.frame_count);
  const std::size_t candidates = kts::candidate_count(timeline, a.rate);
  if (candidates != seg.n) {
    std::cerr << "error: candidate count mismatch: timeline yields " << candidates
              << " candidates, segmentation has n=" << seg.n << '\n';
    return kExitFailure;
  }
  const auto plan = kts::plan_samples(seg, a.k, timeline, a.rate);
  kts::write_plan(plan, a.out);
  std::cout << "m=" << plan.segments.size() << " k=" << plan.k
            << " frames=" << join(plan.flat_source_frames()) << '\n';
  return 0;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  kts::SyntheticConfig config;
  std::string out_features;
  std::string out_truth;
};

int run_synth(const SynthArgs& a) {
  require(a.config.n >= 1 && a.config.d >= 1, "--n and --d must be >= 1");
  require(a.config.segment_count >= 1 && a.config.segment_count <= a.config.n,
          "--segments must lie in [1, n]");
  require(a.config.mean_separation >= 0.0, "--separation must be >= 0");
  require(a.config.noise_sigma >= 0.0, "--sigma must be >= 0");

  const auto instance = kts::generate(a.config);
  kts::write_features(instance.features, a.out_features);
  kts::write_truth({a.config.n, instance.true_change_points, a.config.seed}, a.out_truth);
  std::cout << "n=" << a.config.n << " d=" << a.config.d << " changePoints="
            << join(instance.true_change_points) << '\n';
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::size_t tolerance = 2;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  const auto predicted = kts::read_change_points(a.pred);
  const auto truth = kts::read_change_points(a.truth);
  const auto metrics = kts::boundary_metrics(predicted, truth, a.tolerance);
  const kts::json doc = {
      {"precision", metrics.precision}, {"recall", metrics.recall}, {"f1", metrics.f1},
      {"matched", metrics.matched},     {"tolerance", metrics.tolerance},
  };
  const std::string text = doc.dump(2) + "\n";
  if (!a.out.empty()) kts::write_file_atomic(a.out, text);
  std::cout << text;
  return 0;
}

// --- oracle-check ----------------------------------------------------------

struct OracleArgs {
  std::string features;
  std::optional<std::size_t> m;
  std::size_t min_seg_len = 1;
  std::string kernel = "dot";
};

int run_oracle_check(const OracleArgs& a) {
  require(a.min_seg_len >= 1, "--min-seg-len must be >= 1");
  if (a.m) require(*a.m >= 1, "--m must be >= 1");
  kts::KernelSpec kernel;
  try {
    kernel = kts::KernelSpec::parse(a.kernel);
  } catch (const kts::Error& e) {
    throw UsageError(e.what());
  }
  const auto features = kts::read_features(a.features);
  const auto table = table_for(features, kernel);
  const std::size_t n = table.size();
  if (n > kts::kBruteForceMaxCandidates) {
    throw kts::Error(kts::ErrorCode::InstanceTooLarge,
                     "oracle-check handles at most " +
                         std::to_string(kts::kBruteForceMaxCandidates) + " candidates");
  }
  const std::size_t lo = a.m ? *a.m : 1;
  const std::size_t hi = a.m ? *a.m : n / a.min_seg_len;

  bool all_match = true;
  for (std::size_t m = lo; m <= hi; ++m) {
    const auto dp = kts::solve_fixed(table, m, a.min_seg_len);
    const auto ref = kts::brute_force(table, m, a.min_seg_len);
    const bool match = dp.change_points == ref.change_points &&
                       std::abs(dp.objective - ref.objective) <= 1e-9;
    all_match = all_match && match;
    std::cout << (match ? "match" : "mismatch") << " m=" << m << " dp=" << join(dp.change_points)
              << " brute=" << join(ref.change_points)
              << " objective=" << kts::format_double(dp.objective) << '\n';
  }
  std::cout << (all_match ? "MATCH" : "MISMATCH") << '\n';
  return all_match ? 0 : kExitFailure;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string features;
  std::string truth;
  kts::SyntheticConfig config{200, 16, 8, 5.0, 1.0, 0};
  std::size_t seeds = 10;
  std::size_t tolerance = 2;
  std::string out;
};

int run_sweep(const SweepArgs& a) {
  require(a.features.empty() == a.truth.empty(), "--features and --truth go together");
  std::ostringstream csv;
  csv << "seed,m,kts_objective,uniform_objective,kts_f1,uniform_f1\n";
  std::size_t rows = 0;

  auto emit = [&](std::uint64_t seed, const kts::VarianceTable& table,
                  const std::vector<std::size_t>& truth) {
    for (const auto& r : kts::sweep_instance(table, kts::sweep_grid(table.size()), truth,
                                             a.tolerance)) {
      csv << seed << ',' << r.m << ',' << kts::format_double(r.kts_objective) << ','
          << kts::format_double(r.uniform_objective) << ',' << kts::format_double(r.kts_f1) << ','
          << kts::format_double(r.uniform_f1) << '\n';
      ++rows;
    }
  };

  if (!a.features.empty()) {
    const auto features = kts::read_features(a.features);
    const auto truth = kts::read_truth(a.truth);
    if (truth.n != features.size()) {
      throw kts::Error(kts::ErrorCode::CandidateCountMismatch,
                       "truth has n=" + std::to_string(truth.n) + " but features have n=" +
                           std::to_string(features.size()));
    }
    emit(truth.seed, table_for(features, kts::KernelSpec::dot()), truth.change_points);
  } else {
    require(a.seeds >= 1, "--seeds must be >= 1");
    require(a.config.n >= 1 && a.config.d >= 1, "--n and --d must be >= 1");
    require(a.config.segment_count >= 1 && a.config.segment_count <= a.config.n,
            "--segments must lie in [1, n]");
    require(a.config.mean_separation >= 0.0 && a.config.noise_sigma >= 0.0,
            "--separation and --sigma must be >= 0");
    for (std::size_t s = 0; s < a.seeds; ++s) {
      kts::SyntheticConfig config = a.config;
      config.seed = a.config.seed + s;
      const auto instance = kts::generate(config);
      emit(config.seed, table_for(instance.features, kts::KernelSpec::dot()),
           instance.true_change_points);
    }
  }
  kts::write_file_atomic(a.out, csv.str());
  std::cout << rows << " rows written, ktsObjective <= uniformObjective on every row\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel temporal segmentation and adaptive frame sampling"};
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* segment = app.add_subcommand("segment", "Segment a feature sequence");
  segment->add_option("--features", seg.features, "Feature file (.csv or .ktsf)")->required();
  segment->add_option("--m", seg.m, "Fixed number of segments");
  segment->add_flag("--auto", seg.automatic, "Choose the segment count by penalised objective");
  segment->add_option("--max-segments", seg.max_segments, "Largest segment count for --auto");
  segment->add_option("--penalty-weight", seg.penalty_weight, "Penalty weight for --auto")
      ->capture_default_str();
  segment->add_option("--kernel", seg.kernel, "dot | cosine | rbf:BANDWIDTH")->capture_default_str();
  segment->add_option("--min-seg-len", seg.min_seg_len, "Minimum segment length")
      ->capture_default_str();
  segment->add_option("--out", seg.out, "Segmentation JSON output")->required();

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Build an m x k frame sampling plan");
  plan_cmd->add_option("--segmentation", plan.segmentation, "Segmentation JSON")->required();
  plan_cmd->add_option("--k", plan.k, "Frames per segment")->required();
  plan_cmd->add_option("--duration", plan.duration, "Video duration in seconds")->required();
  plan_cmd->add_option("--fps", plan.fps, "Source frame rate")->required();
  plan_cmd->add_option("--rate", plan.rate, "Candidate frames per second")->capture_default_str();
  plan_cmd->add_option("--frame-count", plan.frame_count, "Source frame count override");
  plan_cmd->add_option("--out", plan.out, "Plan JSON output")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic instance");
  synth_cmd->add_option("--n", synth.config.n)->required();
  synth_cmd->add_option("--d", synth.config.d)->required();
  synth_cmd->add_option("--segments", synth.config.segment_count)->required();
  synth_cmd->add_option("--separation", synth.config.mean_separation)->capture_default_str();
  synth_cmd->add_option("--sigma", synth.config.noise_sigma)->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed)->capture_default_str();
  synth_cmd->add_option("--out-features", synth.out_features, "Feature file (.csv or .ktsf)")
      ->required();
  synth_cmd->add_option("--out-truth", synth.out_truth, "Ground-truth JSON")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted change points against truth");
  eval_cmd->add_option("--pred", eval.pred, "Segmentation or truth JSON")->required();
  eval_cmd->add_option("--truth", eval.truth, "Truth or segmentation JSON")->required();
  eval_cmd->add_option("--tolerance", eval.tolerance)->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Optional metrics JSON output");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare the DP against brute force");
  oracle_cmd->add_option("--features", oracle.features)->required();
  oracle_cmd->add_option("--m", oracle.m, "Segment count (default: every feasible m)");
  oracle_cmd->add_option("--min-seg-len", oracle.min_seg_len)->capture_default_str();
  oracle_cmd->add_option("--kernel", oracle.kernel)->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "KTS vs uniform over a segment-count grid");
  sweep_cmd->add_option("--features", sweep.features, "Single instance features");
  sweep_cmd->add_option("--truth", sweep.truth, "Single instance truth");
  sweep_cmd->add_option("--n", sweep.config.n)->capture_default_str();
  sweep_cmd->add_option("--d", sweep.config.d)->capture_default_str();
  sweep_cmd->add_option("--segments", sweep.config.segment_count)->capture_default_str();
  sweep_cmd->add_option("--separation", sweep.config.mean_separation)->capture_default_str();
  sweep_cmd->add_option("--sigma", sweep.config.noise_sigma)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.config.seed, "First seed")->capture_default_str();
  sweep_cmd->add_option("--seeds", sweep.seeds, "Number of seeds")->capture_default_str();
  sweep_cmd->add_option("--tolerance", sweep.tolerance)->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*segment) return run_segment(seg);
    if (*plan_cmd) return run_plan(plan);
    if (*synth_cmd) return run_synth(synth);
    if (*eval_cmd) return run_eval(eval);
    if (*oracle_cmd) return run_oracle_check(oracle);
    if (*sweep_cmd) return run_sweep(sweep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const kts::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
