// The classifier-pruned Bayesian optimization loop.
//
// Every iteration evaluates one initial latent z_1 (forecast, decode,
// estimate, loss), feeds -L_bt to the surrogate, and records the entry.
// Entries whose decoded trajectory passes the classifier also join the pruned
// history S; the classifier never influences which point is proposed next.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cbol/acquisition.hpp"
#include "cbol/core_types.hpp"
#include "cbol/latent_system.hpp"
#include "cbol/rng.hpp"

namespace cbol {

/// Everything stored about one evaluated z_1.
struct Evaluation {
  LatentTrajectory trajectory;
  Settings settings = Settings::Zero();
  BeamLossVector losses;
  double total_loss = 0.0;
  bool passed_classifier = false;
};

/// z_1 -> Evaluation. Must be deterministic.
using Evaluator = std::function<Evaluation(const LatentPoint&)>;

/// objective_eval followed by the classifier check.
Evaluator make_evaluator(const LatentSystem& system, const Weights& weights);

struct HistoryEntry {
  int iteration = 0;
  LatentPoint z1 = LatentPoint::Zero();
  LatentTrajectory trajectory;
  Settings settings = Settings::Zero();
  BeamLossVector losses;
  double total_loss = 0.0;
  bool passed_classifier = false;
};

struct RunResult {
  int run_index = 0;
  std::uint64_t seed = 0;
  std::vector<HistoryEntry> all_entries;
  /// Indices into all_entries of the entries that passed the classifier (S).
  std::vector<std::size_t> pruned_indices;
  /// Index of the minimal-loss entry of S (S*), absent when S is empty.
  std::optional<std::size_t> best_index;
  /// Number of observations the surrogate holds at the end of the run (0 for baselines).
  int surrogate_observations = 0;

  std::vector<HistoryEntry> pruned_history() const;
  const HistoryEntry* best() const { return best_index ? &all_entries[*best_index] : nullptr; }

  /// Append an evaluated point, updating S and S*.
  void record(const LatentPoint& z1, Evaluation evaluation);
};

struct TunerConfig {
  int iterations = 1000;
  int runs = 10;
  double xi = 0.1;
  BoundsBox bounds = BoundsBox::unit_box();
  Weights weights = Weights::step();
  int candidate_count = 1024;
  int refine_steps = 32;
  std::uint64_t seed = 1;
  int initial_design = 8;

  void validate() const;
  AcquisitionConfig acquisition() const { return {xi, candidate_count, refine_steps}; }
};

/// Componentwise uniform draw in the box.
LatentPoint sample_initial(const BoundsBox& bounds, SeededRng& rng);

/// Seed of run `run_index`: hash64(cfg.seed, run_index).
std::uint64_t run_seed(std::uint64_t base_seed, int run_index);

RunResult cbol_tune(const TunerConfig& cfg, int run_index, const Evaluator& evaluate);

/// Runs 0..cfg.runs-1, each with its own derived seed.
std::vector<RunResult> multi_run(const TunerConfig& cfg, const Evaluator& evaluate);

}  // namespace cbol
