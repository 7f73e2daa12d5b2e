#include "cbol/tuner.hpp"

#include "cbol/gp_surrogate.hpp"
#include "cbol/objective.hpp"

namespace cbol {

Evaluator make_evaluator(const LatentSystem& system, const Weights& weights) {
  weights.validate();
  return [system, weights](const LatentPoint& z1) {
    ObjectiveResult r = objective_eval(z1, system, weights);
    Evaluation e;
    e.passed_classifier = trajectory_passes(*system.classifier, r.states);
    e.trajectory = r.trajectory;
    e.settings = r.settings;
    e.losses = std::move(r.losses);
    e.total_loss = r.total_loss;
    return e;
  };
}

std::vector<HistoryEntry> RunResult::pruned_history() const {
  std::vector<HistoryEntry> s;
  s.reserve(pruned_indices.size());
  for (std::size_t i : pruned_indices) s.push_back(all_entries[i]);
  return s;
}

void RunResult::record(const LatentPoint& z1, Evaluation evaluation) {
  HistoryEntry entry;
  entry.iteration = static_cast<int>(all_entries.size());
  entry.z1 = z1;
  entry.trajectory = evaluation.trajectory;
  entry.settings = evaluation.settings;
  entry.losses = std::move(evaluation.losses);
  entry.total_loss = evaluation.total_loss;
  entry.passed_classifier = evaluation.passed_classifier;
  all_entries.push_back(std::move(entry));
  const std::size_t idx = all_entries.size() - 1;
  if (all_entries[idx].passed_classifier) {
    pruned_indices.push_back(idx);
    if (!best_index || all_entries[idx].total_loss < all_entries[*best_index].total_loss) best_index = idx;
  }
}

void TunerConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("tuner: iterations must be >= 1");
  if (runs < 1) throw std::invalid_argument("tuner: runs must be >= 1");
  if (initial_design < 1 || initial_design > iterations) {
    throw std::invalid_argument("tuner: initial_design must be in [1, iterations]");
  }
  bounds.validate();
  if (bounds.dim() != kLatentDim) throw std::invalid_argument("tuner: bounds must be 8-dimensional");
  weights.validate();
  acquisition().validate();
}

LatentPoint sample_initial(const BoundsBox& bounds, SeededRng& rng) {
  if (bounds.dim() != kLatentDim) throw std::invalid_argument("sample_initial: bounds must be 8-dimensional");
  return rng.uniform_in(bounds);
}

std::uint64_t run_seed(std::uint64_t base_seed, int run_index) {
  return hash64(base_seed, static_cast<std::uint64_t>(run_index));
}

RunResult cbol_tune(const TunerConfig& cfg, int run_index, const Evaluator& evaluate) {
  cfg.validate();
  RunResult result;
  result.run_index = run_index;
  result.seed = run_seed(cfg.seed, run_index);
  SeededRng rng(result.seed);
  const AcquisitionConfig acq = cfg.acquisition();

  GpModel surrogate;
  Eigen::VectorXd targets(0);
  for (int it = 0; it < cfg.iterations; ++it) {
    const LatentPoint z1 =
        it < cfg.initial_design ? sample_initial(cfg.bounds, rng) : LatentPoint(propose_next(surrogate, cfg.bounds, acq, rng));
    Evaluation e = evaluate(z1);

    // The surrogate maximizes -L_bt and sees every evaluation, pruned or not.
    const double value = -e.total_loss;
    targets.conservativeResize(targets.size() + 1);
    targets[targets.size() - 1] = value;
    KernelParams params = KernelParams::heuristic(cfg.bounds, targets);
    surrogate = surrogate.fitted() ? surrogate.update(z1, value, std::move(params))
                                   : GpModel::fit(z1.transpose(), targets, std::move(params));

    result.record(z1, std::move(e));
  }
  result.surrogate_observations = static_cast<int>(surrogate.size());
  return result;
}

std::vector<RunResult> multi_run(const TunerConfig& cfg, const Evaluator& evaluate) {
  cfg.validate();
  std::vector<RunResult> results;
  results.reserve(static_cast<std::size_t>(cfg.runs));
  for (int r = 0; r < cfg.runs; ++r) results.push_back(cbol_tune(cfg, r, evaluate));
  return results;
}

}  // namespace cbol
