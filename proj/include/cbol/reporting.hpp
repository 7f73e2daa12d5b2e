// Run statistics, method comparison, ground-truth oracle and result files.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cbol/latent_system.hpp"
#include "cbol/tuner.hpp"

namespace cbol {

/// Statistics of the per-run best pruned losses (runs with empty S excluded).
/// median is the lower middle for even counts; std is the sample standard
/// deviation and is 0 for a single run. Scalars are absent when every run is empty.
struct SummaryStats {
  std::string method;
  int runs = 0;
  int iterations = 0;
  std::vector<double> per_run_best;
  std::optional<double> median, mean, std, min, max;
  double pruned_fraction = 0.0;
  int empty_runs = 0;
};

SummaryStats summarize(const std::vector<RunResult>& results, const std::string& method);

struct ComparisonReport {
  SummaryStats bo;
  SummaryStats rs;
  std::optional<SummaryStats> grad;
  /// BO minus RS; absent when either side has no scalar.
  std::optional<double> delta_median, delta_mean, delta_std;
  std::string seed_protocol;
};

/// Pure arithmetic over the stats; throws std::invalid_argument when the
/// methods were run with different run counts or budgets.
ComparisonReport compare(const SummaryStats& bo, const SummaryStats& rs, const std::optional<SummaryStats>& grad,
                         const std::string& seed_protocol = "");

std::string paired_seed_protocol(std::uint64_t base_seed, int runs, int iterations);

struct OracleResult {
  LatentPoint z_star = LatentPoint::Zero();
  double l_star = 0.0;
  int resolution = 0;
};

/// Per-coordinate grid search of the total loss over the manifold box
/// {|z - center|_inf <= radius} intersected with the bounds. Starting from the
/// manifold center, coordinate d is scanned over `resolution` evenly spaced
/// values with every other coordinate held at the center; the best value per
/// coordinate is kept (first wins on ties). Exact for objectives that are
/// monotone in a coordinate-separable sum, which the synthetic system is.
OracleResult run_oracle(const LatentSystem& system, const BoundsBox& bounds, const LatentPoint& manifold_center,
                        double manifold_radius, const Weights& weights, int resolution);

void save_oracle(const OracleResult& oracle, const std::filesystem::path& path);
OracleResult load_oracle(const std::filesystem::path& path);

/// One JSON object per HistoryEntry per line.
void write_history_jsonl(const RunResult& run, const std::filesystem::path& path);
RunResult read_history_jsonl(const std::filesystem::path& path, int run_index = 0);

std::string summary_csv_header();
std::string summary_csv_row(const SummaryStats& stats);
void write_summary_csv(const std::vector<SummaryStats>& stats, const std::filesystem::path& path);
void write_comparison_csv(const ComparisonReport& report, const std::filesystem::path& path);
std::string comparison_table(const ComparisonReport& report);

/// Number formatting used by every CSV and table (12 significant digits).
std::string format_number(double v);

}  // namespace cbol
