#include "rg/bench/cli.hpp"

#include "rg/bench/io.hpp"
#include "rg/bench/metrics.hpp"
#include "rg/bench/scene.hpp"
#include "rg/engine.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace rg::bench {

namespace {

// String-valued estimation options shared by `estimate` and `bench`.
struct EstimationFlags {
  std::string problem = "homography";
  std::optional<double> threshold;
  double confidence = 0.999;
  std::size_t min_iterations = 50;
  std::size_t max_iterations = 5000;
  std::string sampler;
  std::string scoring = "magsac++";
  std::string lo = "gc";
  std::string fo;
  double spatial_weight = LOSettings{}.spatial_weight;
  int inner_iterations = LOSettings{}.inner_iterations;
  bool no_preemption = false;
  std::uint64_t seed = 0;
};

void add_estimation_flags(CLI::App& app, EstimationFlags& f) {
  app.add_option("--problem", f.problem, "homography | fundamental | essential | absolute | rigid")->required();
  app.add_option("--threshold", f.threshold, "Inlier threshold in pixels (meters for rigid)");
  app.add_option("--confidence", f.confidence, "Termination confidence in (0, 1)");
  app.add_option("--min-iterations", f.min_iterations);
  app.add_option("--max-iterations", f.max_iterations);
  app.add_option("--sampler", f.sampler, "uniform | prosac | pnapsac (default per problem)");
  app.add_option("--scoring", f.scoring, "magsac++ | msac | ransac");
  app.add_option("--lo", f.lo, "gc | nested | none");
  app.add_option("--fo", f.fo, "irls | single (default per problem)");
  app.add_option("--spatial-weight", f.spatial_weight, "Graph-cut coherence weight");
  app.add_option("--lo-iterations", f.inner_iterations, "Nested RANSAC rounds per local optimization");
  app.add_flag("--no-preemption", f.no_preemption, "Score every hypothesis in full");
  app.add_option("--seed", f.seed);
}

EstimationConfig to_config(const EstimationFlags& f, double default_threshold) {
  EstimationConfig c;
  c.problem = problem_from_string(f.problem);
  c.threshold = f.threshold.value_or(default_threshold);
  c.confidence = f.confidence;
  c.min_iterations = f.min_iterations;
  c.max_iterations = f.max_iterations;
  if (!f.sampler.empty()) c.sampler = sampler_from_string(f.sampler);
  c.scoring = scoring_from_string(f.scoring);
  c.lo.kind = lo_from_string(f.lo);
  c.lo.spatial_weight = f.spatial_weight;
  c.lo.inner_iterations = f.inner_iterations;
  if (!f.fo.empty()) c.fo = fo_from_string(f.fo);
  c.preemption = !f.no_preemption;
  c.seed = f.seed;
  validate(c);
  return c;
}

bool is_usage_error(ErrorCode code) {
  return code == ErrorCode::Io || code == ErrorCode::InvalidConfig || code == ErrorCode::MissingIntrinsics ||
         code == ErrorCode::KindMismatch;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file || !(file << text)) throw Error(ErrorCode::Io, "cannot write " + path);
}

std::string pair_name(std::size_t i) {
  std::ostringstream s;
  s << "pair_" << std::setw(5) << std::setfill('0') << i;
  return s.str();
}

std::vector<std::string> read_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

int bench_threads() {
  if (const char* env = std::getenv("RG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return omp_get_max_threads();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust geometric estimation and benchmarking", "rgbench"};
  app.require_subcommand(1);

  EstimationFlags est;
  std::string input, intrinsics_path, output;
  bool timings = false;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate a model from one correspondence file");
  add_estimation_flags(*estimate_cmd, est);
  estimate_cmd->add_option("--input", input, "Correspondence file")->required();
  estimate_cmd->add_option("--intrinsics", intrinsics_path, "Intrinsics file (one or two K matrices)");
  estimate_cmd->add_option("--output", output, "JSON report path (default stdout)");
  estimate_cmd->add_flag("--timings", timings, "Include per-stage wall times");

  std::string synth_problem = "homography", prefix = "scene";
  std::size_t synth_n = 500;
  double synth_ratio = 0.5, synth_noise = 1.0;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  synth_cmd->add_option("--problem", synth_problem)->required();
  synth_cmd->add_option("--n", synth_n);
  synth_cmd->add_option("--inlier-ratio", synth_ratio);
  synth_cmd->add_option("--noise", synth_noise, "Noise sigma in pixels (meters for rigid)");
  synth_cmd->add_option("--seed", synth_seed);
  synth_cmd->add_option("--output", prefix, "Prefix of the written files");

  EstimationFlags bench_flags;
  std::size_t trials = 100, bench_n = 500;
  double bench_ratio = 0.4;
  std::optional<double> bench_noise;
  std::string scenes_path, csv_path, summary_path;
  bool bench_timings = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run estimation over many scenes and summarize the errors");
  add_estimation_flags(*bench_cmd, bench_flags);
  bench_cmd->add_option("--trials", trials, "Number of generated scenes");
  bench_cmd->add_option("--n", bench_n);
  bench_cmd->add_option("--inlier-ratio", bench_ratio);
  bench_cmd->add_option("--noise", bench_noise, "Noise sigma (default 1 px, 0.01 m for rigid)");
  bench_cmd->add_option("--scenes", scenes_path, "File listing scene prefixes to ingest instead of generating");
  bench_cmd->add_option("--csv", csv_path, "Per-pair CSV output");
  bench_cmd->add_option("--output", summary_path, "Summary JSON path (default stdout)");
  bench_cmd->add_flag("--timings", bench_timings, "Include runtimes in the CSV");

  std::string metrics_csv, metrics_out;
  auto* metrics_cmd = app.add_subcommand("metrics", "Recompute the summary from a per-pair CSV");
  metrics_cmd->add_option("--csv", metrics_csv)->required();
  metrics_cmd->add_option("--output", metrics_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (estimate_cmd->parsed()) {
      const EstimationConfig config = to_config(est, 1.0);
      if (!est.threshold) throw Error(ErrorCode::InvalidConfig, "--threshold is required");
      const CorrespondenceSet set = read_correspondences(input, config.problem);
      std::optional<ViewIntrinsics> K;
      if (!intrinsics_path.empty()) K = read_intrinsics(intrinsics_path);
      const EstimationReport report = estimate(set, config, K);
      emit(report_json(report, config, timings).dump(2) + "\n", output, out);
    } else if (synth_cmd->parsed()) {
      const ScenePair pair = generate_scene(problem_from_string(synth_problem), synth_n, synth_ratio, synth_noise, synth_seed);
      save_scene(prefix, pair);
      out << prefix << ".txt\n" << prefix << ".gt.txt\n";
      if (pair.intrinsics) out << prefix << ".K.txt\n";
    } else if (bench_cmd->parsed()) {
      const ProblemKind kind = problem_from_string(bench_flags.problem);
      const double noise = bench_noise.value_or(kind == ProblemKind::Rigid ? 0.01 : 1.0);
      const EstimationConfig base = to_config(bench_flags, default_threshold(kind, noise));
      std::vector<ScenePair> pairs;
      if (!scenes_path.empty()) {
        for (const auto& p : read_list(scenes_path)) pairs.push_back(load_scene(p, kind));
      } else {
        if (trials == 0) throw Error(ErrorCode::InvalidConfig, "--trials must be positive");
        pairs.resize(trials);
        for (std::size_t i = 0; i < trials; ++i) {
          pairs[i] = generate_scene(kind, bench_n, bench_ratio, noise, base.seed + i);
          pairs[i].name = pair_name(i);
        }
      }
      std::vector<PairResult> results(pairs.size());
      const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(bench_threads())
      for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        EstimationConfig config = base;
        config.seed = base.seed + k;
        try {
          results[k] = assess(pairs[k], estimate(pairs[k].set, config, pairs[k].intrinsics));
        } catch (const Error&) {
          results[k] = failed_result(pairs[k].name);
        }
      }
      std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
      if (!csv_path.empty()) {
        std::ostringstream csv;
        write_results_csv(csv, results, bench_timings);
        emit(csv.str(), csv_path, out);
      }
      emit(summary_json(evaluate(results)).dump(2) + "\n", summary_path, out);
    } else if (metrics_cmd->parsed()) {
      std::ifstream in(metrics_csv);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + metrics_csv);
      const auto results = parse_results_csv(in);
      if (results.empty()) throw Error(ErrorCode::Io, "no results in " + metrics_csv);
      emit(summary_json(evaluate(results)).dump(2) + "\n", metrics_out, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitEstimationFailed;
  }
  return kExitOk;
}

}  // namespace rg::bench
