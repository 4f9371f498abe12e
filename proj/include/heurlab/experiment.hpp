#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "heurlab/metrics.hpp"
#include "heurlab/search.hpp"

namespace heurlab {

/// Builds the evaluator for one (instance, seed) solve. Runs outside the
/// timed region, so model loading and table construction are not charged to
/// wall time.
using EvaluatorFactory =
    std::function<std::shared_ptr<const HeuristicEvaluator>(const PuzzleInstance& instance, std::uint64_t seed)>;

struct ExperimentConfig {
  std::string label;
  std::span<const PuzzleInstance> instances;
  EvaluatorFactory make_evaluator;
  std::vector<std::uint64_t> seeds{0};
  SearchLimits limits;
  TieBreak tie_break = TieBreak::LargerG;
  int jobs = 0;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  ///< population standard deviation across seeds
};

struct ExperimentReport {
  std::string label;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricsReport> per_seed;
  MeanStd ilr_on_solved, ilr_on_optimal, swc, optimal_pct, itr_on_solved, itr_on_optimal;
  std::string inputs_hash;  ///< git blob SHA-1 over the rendered instances
};

/// Solves every instance under every seed with OpenMP workers. Rows are
/// kept in instance order, so the report does not depend on `jobs`.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& config,
                                              std::span<const ReferenceSolution> references);

/// Single-threaded reference path for run_experiment.
[[nodiscard]] ExperimentReport run_experiment_serial(const ExperimentConfig& config,
                                                     std::span<const ReferenceSolution> references);

/// Mean and population standard deviation; NaN entries are skipped.
[[nodiscard]] MeanStd mean_std(std::span<const double> values);

/// SHA-1 of "blob <size>\0<content>", lowercase hex.
[[nodiscard]] std::string git_blob_sha1(std::string_view content);
[[nodiscard]] std::string hash_instances(std::span<const PuzzleInstance> instances);

/// Per-instance rows (seed, id, solved, optimal, S, |pi|, S*, |pi*|, ILR, SWC
/// term) followed by an aggregate block. Timing columns are written only when
/// `with_timing` is set so that the default file is reproducible bit for bit.
void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report, bool with_timing = false);

/// One JSON object per line: a header record with the config hash, inputs
/// hash and environment notes, then one record per (seed, instance).
void write_manifest(const std::filesystem::path& path, const ExperimentReport& report, std::string_view config_text);

[[nodiscard]] std::string format_number(double value, int digits = 4);

}  // namespace heurlab
