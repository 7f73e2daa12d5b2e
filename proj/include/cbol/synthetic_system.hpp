// Ground-truth-known stand-in for the trained forecaster, decoder,
// estimator and classifier.
//
// Forecaster   z_{t+1} = tanh(A z_t + b), A rescaled to spectral radius 0.9.
// Estimator    y = clip(C z_1, -0.5, 0.5).
// Decoder      Each module renders 15 projections on a grid x grid image.
//              The interior (inside a `frame`-pixel border) holds a Gaussian
//              beam blob whose
//                center_x  = cx0[m,k] + gx[m,k] * z_m[0]
//                center_y  = cy0[m,k] + gy[m,k] * z_m[1]
//                log sig_x = lx0[m,k] + lgx[m,k] * z_m[2]
//                log sig_y = ly0[m,k] + lgy[m,k] * z_m[3]
//              and whose pixel sum is the beam intensity
//                mass[k] * exp(rho_m * sum_d q_d(z_1[d])),  rho_m = (m-1)/47,
//              i.e. the injected intensity times the cumulative transmission
//              up to module m. Each q_d is a 1-D log-transmission profile,
//              so the intensity is separable in the coordinates of z_1.
//              Except on the loss projection, the border carries a fixed
//              per-module background pattern whose four segments are scaled
//              by 0.1 + 0.7 * sigmoid(fg[m,s] * z_m[4+s]), plus a 6-bit
//              barcode of the module number.
// Classifier   Nearest prototype under a normalized Chebyshev distance over
//              image features (blob centroid and spread, segment means,
//              barcode block means), NonPhysical beyond threshold tau.
//              The module-1 prototype is the feature box of the 256 vertices
//              of the physical manifold M = {z : |z - center|_inf <= radius};
//              later prototypes cover an interval enclosure of the forecast
//              image of M, with 5% slack.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "cbol/core_types.hpp"
#include "cbol/latent_system.hpp"

namespace cbol {

/// q(x) = -curvature (x - center)^2 + bump_height exp(-(x - bump_center)^2 / (2 bump_width^2)) - offset
struct TransmissionProfile {
  double curvature = 1.0;
  double center = 0.0;
  double bump_height = 0.0;
  double bump_center = 0.0;
  double bump_width = 0.1;
  double offset = 0.0;

  double operator()(double x) const;
  double raw(double x) const { return (*this)(x) + offset; }
};

struct BlobMap {
  double center_x0 = 0, center_x_gain = 0;
  double center_y0 = 0, center_y_gain = 0;
  double log_width_x0 = 0, log_width_x_gain = 0;
  double log_width_y0 = 0, log_width_y_gain = 0;
};

inline constexpr int kFrameSegments = 4;
inline constexpr int kBarcodeBits = 6;
inline constexpr int kFeaturesPerProjection = 4 + kFrameSegments + kBarcodeBits;
inline constexpr int kFeatureCount = kProjections * kFeaturesPerProjection;

using LatentMatrix = Eigen::Matrix<double, kLatentDim, kLatentDim>;

struct SyntheticConstants {
  std::uint64_t seed = 42;
  int grid = 32;
  int frame = 3;

  LatentMatrix transition = LatentMatrix::Zero();
  LatentPoint bias = LatentPoint::Zero();
  LatentMatrix estimator_map = LatentMatrix::Zero();

  std::vector<BlobMap> blob_maps;                // kModules * kProjections, module-major
  std::array<double, kProjections> projection_mass{};
  Eigen::MatrixXd frame_gain;                    // kModules x kFrameSegments
  Eigen::MatrixXd pattern;                       // kModules x 2: phase, frequency
  std::array<TransmissionProfile, kLatentDim> transmission{};

  BoundsBox bounds = BoundsBox::unit_box();
  LatentPoint manifold_center = LatentPoint::Constant(-0.3);
  double manifold_radius = 0.6;

  // Calibrated.
  Eigen::MatrixXd prototype_center;  // kModules x kFeatureCount
  Eigen::MatrixXd prototype_scale;   // kModules x kFeatureCount
  double tau = 1.0;
  double reference_intensity = 1.0;

  const BlobMap& blob(int module, int projection) const {
    return blob_maps.at(static_cast<std::size_t>((module - 1) * kProjections + (projection - 1)));
  }
};

/// Draw every seeded constant (A, b, C, decoder maps) and fix the landscape.
/// Prototypes, tau and the reference intensity are left for `calibrate`.
SyntheticConstants generate_synthetic_constants(std::uint64_t seed = 42);

struct CalibrationReport {
  double tau = 0.0;
  double agreement = 0.0;  // on the calibration set at the chosen tau
  int samples = 0;
};

/// Fill prototypes (see the header note), the reference intensity from
/// the per-coordinate transmission maxima, and choose tau maximizing
/// agreement with manifold membership on `samples_per_class` inside and
/// outside points (smallest tau among ties).
CalibrationReport calibrate(SyntheticConstants& constants, int samples_per_class = 2000);

class SyntheticSystem final : public Forecaster, public Decoder, public Estimator, public Classifier {
 public:
  explicit SyntheticSystem(SyntheticConstants constants);

  LatentTrajectory forecast(const LatentPoint& z1) const override;
  BeamState decode_module(const LatentTrajectory& trajectory, int module) const override;
  Settings estimate(const LatentTrajectory& trajectory) const override;
  ClassLabel classify(const BeamState& state) const override;

  /// Image features consumed by the classifier.
  Eigen::VectorXd features(const BeamState& state) const;
  /// Normalized Chebyshev distance of `features` to the prototype of `module`.
  double prototype_distance(const Eigen::VectorXd& features, int module) const;

  /// Ground-truth physical manifold membership (inside the bounds and the inf-ball).
  bool in_manifold(const LatentPoint& z1) const;
  /// log of the cumulative transmission through the whole linac, sum_d q_d(z1_d).
  double log_transmission(const LatentPoint& z1) const;
  /// Beam intensity (pixel sum of the blob) of projection k at module m.
  double beam_intensity(const LatentPoint& z1, int module, int projection) const;

  const SyntheticConstants& constants() const { return constants_; }

 private:
  SyntheticConstants constants_;
};

/// Bundle one synthetic instance as all four models.
LatentSystem make_latent_system(std::shared_ptr<const SyntheticSystem> system);

}  // namespace cbol
