// Comparison searches over the same latent space: classifier-pruned random
// search and finite-difference Adam. Both spend exactly `iterations`
// evaluations per run and return the tuner's RunResult schema.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cbol/tuner.hpp"

namespace cbol {

struct BaselineConfig {
  int iterations = 1000;
  int runs = 10;
  BoundsBox bounds = BoundsBox::unit_box();
  Weights weights = Weights::step();
  std::uint64_t seed = 1;

  double step_size = 0.05;
  double fd_epsilon = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Starting point of gradient search; drawn uniformly when absent.
  std::optional<LatentPoint> initial_point;

  static BaselineConfig from(const TunerConfig& cfg);
  void validate() const;
};

/// `iterations` independent uniform draws, each evaluated and pruned.
RunResult random_search(const BaselineConfig& cfg, int run_index, const Evaluator& evaluate);

/// Adam ascent on -L_bt with central finite differences. Each step evaluates
/// the iterate and its 16 probes; every evaluation is a history entry and
/// counts against the budget. Iterates are clipped to the bounds.
RunResult gradient_search(const BaselineConfig& cfg, int run_index, const Evaluator& evaluate);

std::vector<RunResult> multi_run_random_search(const BaselineConfig& cfg, const Evaluator& evaluate);
std::vector<RunResult> multi_run_gradient_search(const BaselineConfig& cfg, const Evaluator& evaluate);

}  // namespace cbol
