#include "cbol/acquisition.hpp"

#include <cmath>
#include <numbers>

namespace cbol {

void AcquisitionConfig::validate() const {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw std::invalid_argument("acquisition xi must be >= 0");
  if (candidate_count < 1) throw std::invalid_argument("acquisition candidate_count must be >= 1");
  if (refine_steps < 0) throw std::invalid_argument("acquisition refine_steps must be >= 0");
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double expected_improvement(double mean, double std, double best, double xi) {
  if (!std::isfinite(mean) || !std::isfinite(std) || !std::isfinite(best) || !std::isfinite(xi)) {
    throw std::invalid_argument("expected_improvement: non-finite argument");
  }
  if (std < 0.0) throw std::invalid_argument("expected_improvement: negative standard deviation");
  if (std == 0.0) return 0.0;
  const double gain = mean - best - xi;
  const double z = gain / std;
  return std::max(gain * std_normal_cdf(z) + std * std_normal_pdf(z), 0.0);
}

Eigen::VectorXd propose_next(const GpModel& model, const BoundsBox& bounds, const AcquisitionConfig& cfg,
                             SeededRng& rng) {
  cfg.validate();
  bounds.validate();
  if (model.dim() != bounds.dim()) throw std::invalid_argument("propose_next: model and bounds differ in dimension");

  const double best = model.best_target();
  const int dim = bounds.dim();

  Eigen::MatrixXd candidates(cfg.candidate_count, dim);
  for (int c = 0; c < cfg.candidate_count; ++c) {
    candidates.row(c) = rng.uniform_in(bounds).transpose();
  }
  Eigen::VectorXd means;
  Eigen::VectorXd variances;
  model.posterior_batch(candidates, means, variances);

  int arg = 0;
  double best_ei = -1.0;
  for (int c = 0; c < cfg.candidate_count; ++c) {
    const double ei = expected_improvement(means[c], std::sqrt(variances[c]), best, cfg.xi);
    if (ei > best_ei) {
      best_ei = ei;
      arg = c;
    }
  }

  Eigen::VectorXd incumbent = candidates.row(arg).transpose();
  const Eigen::VectorXd step = 0.01 * bounds.width();
  for (int s = 0; s < cfg.refine_steps; ++s) {
    const int d = s % dim;
    Eigen::VectorXd trial = incumbent;
    trial[d] += step[d] * rng.uniform(-1.0, 1.0);
    trial = bounds.clip(trial);
    const Posterior p = model.posterior(trial);
    const double ei = expected_improvement(p.mean, std::sqrt(p.variance), best, cfg.xi);
    if (ei > best_ei) {
      best_ei = ei;
      incumbent = std::move(trial);
    }
  }
  return incumbent;
}

}  // namespace cbol
