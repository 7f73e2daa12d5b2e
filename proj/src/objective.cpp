#include "cbol/objective.hpp"

#include <algorithm>

namespace cbol {

double module_beam_loss(const BeamState& state, double reference_intensity) {
  if (!(reference_intensity > 0.0)) throw std::invalid_argument("module_beam_loss: reference intensity must be > 0");
  const double survived = state.projection(kLossProjection).sum();
  return std::clamp(1.0 - survived / reference_intensity, 0.0, 1.0);
}

double total_beam_loss(const BeamLossVector& losses, const Weights& weights) {
  if (losses.size() != weights.w.size()) throw std::invalid_argument("total_beam_loss: length mismatch");
  return weights.w.dot(losses);
}

Weights step_weights() { return Weights::step(); }

ObjectiveResult objective_eval(const LatentPoint& z1, const LatentSystem& system, const Weights& weights) {
  ObjectiveResult r;
  r.trajectory = system.forecaster->forecast(z1);
  r.states = system.decoder->decode(r.trajectory);
  r.settings = system.estimator->estimate(r.trajectory);
  r.losses.resize(kModules);
  for (int m = 0; m < kModules; ++m) {
    r.losses[m] = module_beam_loss(r.states[static_cast<std::size_t>(m)], system.reference_intensity);
  }
  r.total_loss = total_beam_loss(r.losses, weights);
  return r;
}

double objective_loss(const LatentPoint& z1, const LatentSystem& system, const Weights& weights) {
  const LatentTrajectory traj = system.forecaster->forecast(z1);
  BeamLossVector losses = BeamLossVector::Zero(kModules);
  for (int m = 1; m <= kModules; ++m) {
    if (weights.w[m - 1] == 0.0) continue;
    losses[m - 1] = module_beam_loss(system.decoder->decode_module(traj, m), system.reference_intensity);
  }
  return total_beam_loss(losses, weights);
}

}  // namespace cbol
