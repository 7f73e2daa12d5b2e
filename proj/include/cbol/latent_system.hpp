// Model interfaces of the latent evolution pipeline.
//
// forecast: z_1 -> z_{1:48}, decode: z_{1:48} -> X_{1:48},
// estimate: z_{1:48} -> y_{1:8}, classify: X_m -> module label.
// Any implementation (the synthetic testbed, or a wrapper around trained
// networks) must be pure: identical inputs give bitwise-identical outputs.
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cbol/core_types.hpp"

namespace cbol {

class Forecaster {
 public:
  virtual ~Forecaster() = default;
  /// points[0] of the result is `z1` exactly.
  virtual LatentTrajectory forecast(const LatentPoint& z1) const = 0;
};

class Decoder {
 public:
  virtual ~Decoder() = default;
  /// Beam state of a single module (1-based).
  virtual BeamState decode_module(const LatentTrajectory& trajectory, int module) const = 0;
  /// One state per module, in module order.
  std::vector<BeamState> decode(const LatentTrajectory& trajectory) const;
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual Settings estimate(const LatentTrajectory& trajectory) const = 0;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassLabel classify(const BeamState& state) const = 0;
};

/// True iff every state is classified as the module it was decoded for.
bool trajectory_passes(const Classifier& classifier, std::span<const BeamState> states);

/// The four models plus the intensity that means "no beam lost".
struct LatentSystem {
  std::shared_ptr<const Forecaster> forecaster;
  std::shared_ptr<const Decoder> decoder;
  std::shared_ptr<const Estimator> estimator;
  std::shared_ptr<const Classifier> classifier;
  double reference_intensity = 1.0;
};

}  // namespace cbol
