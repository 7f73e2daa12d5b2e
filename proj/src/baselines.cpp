#include "cbol/baselines.hpp"

#include <cmath>

namespace cbol {

BaselineConfig BaselineConfig::from(const TunerConfig& cfg) {
  BaselineConfig b;
  b.iterations = cfg.iterations;
  b.runs = cfg.runs;
  b.bounds = cfg.bounds;
  b.weights = cfg.weights;
  b.seed = cfg.seed;
  return b;
}

void BaselineConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("baseline: iterations must be >= 1");
  if (runs < 1) throw std::invalid_argument("baseline: runs must be >= 1");
  bounds.validate();
  if (bounds.dim() != kLatentDim) throw std::invalid_argument("baseline: bounds must be 8-dimensional");
  weights.validate();
  if (!(step_size > 0.0)) throw std::invalid_argument("baseline: step_size must be > 0");
  if (!(fd_epsilon > 0.0)) throw std::invalid_argument("baseline: fd_epsilon must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("baseline: Adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw std::invalid_argument("baseline: adam_eps must be > 0");
  if (initial_point && !bounds.contains(*initial_point)) {
    throw std::invalid_argument("baseline: initial_point lies outside the bounds");
  }
}

RunResult random_search(const BaselineConfig& cfg, int run_index, const Evaluator& evaluate) {
  cfg.validate();
  RunResult result;
  result.run_index = run_index;
  result.seed = run_seed(cfg.seed, run_index);
  SeededRng rng(result.seed);
  for (int it = 0; it < cfg.iterations; ++it) {
    const LatentPoint z1 = sample_initial(cfg.bounds, rng);
    result.record(z1, evaluate(z1));
  }
  return result;
}

RunResult gradient_search(const BaselineConfig& cfg, int run_index, const Evaluator& evaluate) {
  cfg.validate();
  RunResult result;
  result.run_index = run_index;
  result.seed = run_seed(cfg.seed, run_index);
  SeededRng rng(result.seed);
  const int budget = cfg.iterations;
  const auto spent = [&] { return static_cast<int>(result.all_entries.size()); };

  LatentPoint x = cfg.initial_point ? *cfg.initial_point : sample_initial(cfg.bounds, rng);
  LatentPoint m = LatentPoint::Zero();
  LatentPoint v = LatentPoint::Zero();
  int t = 0;
  while (spent() < budget) {
    result.record(x, evaluate(x));

    LatentPoint grad = LatentPoint::Zero();
    for (int d = 0; d < kLatentDim; ++d) {
      if (spent() + 2 > budget) {
        // Not enough budget for a full probe pair; spend what is left on the forward probe.
        while (spent() < budget) {
          LatentPoint probe = x;
          probe[d] = std::min(x[d] + cfg.fd_epsilon, cfg.bounds.upper[d]);
          result.record(probe, evaluate(probe));
        }
        return result;
      }
      LatentPoint plus = x;
      LatentPoint minus = x;
      plus[d] = std::min(x[d] + cfg.fd_epsilon, cfg.bounds.upper[d]);
      minus[d] = std::max(x[d] - cfg.fd_epsilon, cfg.bounds.lower[d]);
      Evaluation ep = evaluate(plus);
      Evaluation em = evaluate(minus);
      // Ascent direction of -L_bt.
      grad[d] = (em.total_loss - ep.total_loss) / (plus[d] - minus[d]);
      result.record(plus, std::move(ep));
      result.record(minus, std::move(em));
    }

    ++t;
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseAbs2();
    const LatentPoint m_hat = m / (1.0 - std::pow(cfg.adam_beta1, t));
    const LatentPoint v_hat = v / (1.0 - std::pow(cfg.adam_beta2, t));
    const LatentPoint step = cfg.step_size * m_hat.array() / (v_hat.array().sqrt() + cfg.adam_eps);
    x = cfg.bounds.clip(x + step);
  }
  return result;
}

std::vector<RunResult> multi_run_random_search(const BaselineConfig& cfg, const Evaluator& evaluate) {
  cfg.validate();
  std::vector<RunResult> out;
  for (int r = 0; r < cfg.runs; ++r) out.push_back(random_search(cfg, r, evaluate));
  return out;
}

std::vector<RunResult> multi_run_gradient_search(const BaselineConfig& cfg, const Evaluator& evaluate) {
  cfg.validate();
  std::vector<RunResult> out;
  for (int r = 0; r < cfg.runs; ++r) out.push_back(gradient_search(cfg, r, evaluate));
  return out;
}

}  // namespace cbol
