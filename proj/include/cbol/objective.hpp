// Beam loss per module and the weighted total beam loss.
#pragma once

#include <vector>

#include "cbol/core_types.hpp"
#include "cbol/latent_system.hpp"

namespace cbol {

/// clamp(1 - S / reference_intensity, 0, 1), S = pixel sum of projection 11.
double module_beam_loss(const BeamState& state, double reference_intensity);

/// weights . losses
double total_beam_loss(const BeamLossVector& losses, const Weights& weights);

/// Zero for modules 1..47, one for module 48.
Weights step_weights();

struct ObjectiveResult {
  double total_loss = 0.0;
  LatentTrajectory trajectory;
  std::vector<BeamState> states;
  Settings settings = Settings::Zero();
  BeamLossVector losses;
};

/// forecast -> decode -> estimate -> per-module loss -> weighted total.
ObjectiveResult objective_eval(const LatentPoint& z1, const LatentSystem& system, const Weights& weights);

/// Same total as objective_eval, decoding only modules with non-zero weight.
double objective_loss(const LatentPoint& z1, const LatentSystem& system, const Weights& weights);

}  // namespace cbol
