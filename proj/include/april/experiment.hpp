#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "april/loops.hpp"
#include "april/serialization.hpp"
#include "april/synthetic.hpp"

namespace april {

enum class Method { april, irl, es };

std::string to_string(Method method);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  Method method = Method::april;
  LoopConfig loop = LoopConfig::defaults(Environment::mountain_car);
  /// Demonstrations per run (IRL: projection iterations).
  int n_iterations = 30;
  int n_runs = 101;
  /// Run i uses seed + i.
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "results";
  /// Worker threads for independent runs; results do not depend on it.
  int threads = 1;
};

/// Flat JSON: method, iterations, runs, seed, output_dir, threads, plus any LoopConfig key.
json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const json& j);

/// 16 hex digits of FNV-1a over the canonical JSON of every field that shapes the results.
std::string config_hash(const ExperimentConfig& config);

struct RunResult {
  int run_id = 0;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> records;
  /// Best emulated score after each demonstration (lower is better).
  std::vector<double> best_scores;
  /// APRIL only: the archive after the last iteration.
  json final_archive;
  /// IRL only: ||expert - projection|| after each iteration.
  std::vector<double> irl_distances;
};

RunResult run_one(const ExperimentConfig& config, int run_id);

/// Runs every index in [0, n_runs) on `threads` workers; the result order is the run order.
std::vector<RunResult> run_all(const ExperimentConfig& config);

struct QuartileRow {
  int iteration = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);
std::vector<QuartileRow> summarize(const std::vector<RunResult>& runs);

/// Writes config.json, runs/run_NNN.ndjson, scores.csv (run_id, iteration, best_score) and
/// summary.csv (iteration, mean, median, q1, q3). Returns the runs.
std::vector<RunResult> cmd_run(const ExperimentConfig& config);

/// Re-runs an APRIL run log with its recorded verdicts and returns the rebuilt state.
AprilState replay_april(const std::filesystem::path& run_log);
/// True when replaying the log reproduces the archive stored in its final record.
bool replay_matches(const std::filesystem::path& run_log);

struct SyntheticConfig {
  std::vector<int> dimensions = {10, 20, 50, 100};
  std::vector<Criterion> criteria = {Criterion::aeus, Criterion::eus_mc, Criterion::random, Criterion::max_coord};
  int iterations = 50;
  int runs = 101;
  int n_candidates = 1000;
  std::uint64_t seed = 7;
  std::filesystem::path output_dir = "synthetic";
  SyntheticOptions options;
  int threads = 1;
};

SyntheticConfig synthetic_config_from_json(const json& j);

/// One CSV per (criterion, d) named synthetic_<criterion>_d<d>.csv with rows run_id, iteration,
/// performance, plus synthetic_summary.csv with the mean curve of each pair. Returns the written paths.
std::vector<std::filesystem::path> cmd_synthetic(const SyntheticConfig& config);

/// Turns run or synthetic summary CSVs into one figure JSON document; throws on an empty input list
/// and writes nothing.
json export_plots(const std::vector<std::filesystem::path>& summaries);
void cmd_export_plots(const std::vector<std::filesystem::path>& summaries, const std::filesystem::path& output);

}  // namespace april
