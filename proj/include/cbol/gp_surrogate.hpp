// Gaussian-process surrogate over the initial-latent search space.
//
// Squared-exponential kernel with one length scale per input dimension,
// zero-mean prior on mean-centered targets, and a Cholesky factor that is
// recomputed on every update. Models are immutable once built.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cbol/core_types.hpp"

namespace cbol {

struct KernelParams {
  double signal_variance = 1.0;
  Eigen::VectorXd length_scales;
  double noise_variance = 0.0;

  void validate() const;

  /// Fixed heuristic used by the tuner: length_d = 0.25 * box width,
  /// signal variance = population variance of the targets (at least 1e-6),
  /// noise variance = 1e-8.
  static KernelParams heuristic(const BoundsBox& bounds, const Eigen::VectorXd& targets);
};

/// sf * exp(-0.5 * sum_d ((a_d - b_d) / l_d)^2)
double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                   const KernelParams& params);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

class GpModel {
 public:
  inline static constexpr double kInitialJitter = 1e-10;
  inline static constexpr double kMaxJitter = 1e-4;

  /// An unfitted model; posterior queries throw StateError.
  GpModel() = default;

  /// Rows of `inputs` are observations.
  static GpModel fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, KernelParams params);

  /// Refit on the dataset augmented by (point, value). *this is unchanged.
  GpModel update(const Eigen::Ref<const Eigen::VectorXd>& point, double value) const;
  GpModel update(const Eigen::Ref<const Eigen::VectorXd>& point, double value, KernelParams params) const;

  Posterior posterior(const Eigen::Ref<const Eigen::VectorXd>& query) const;

  /// Posterior at every row of `queries`; `means`/`variances` are resized.
  void posterior_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries, Eigen::VectorXd& means,
                       Eigen::VectorXd& variances) const;

  bool fitted() const { return inputs_.rows() > 0; }
  Eigen::Index size() const { return inputs_.rows(); }
  int dim() const { return static_cast<int>(inputs_.cols()); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  const KernelParams& params() const { return params_; }
  double target_mean() const { return target_mean_; }
  /// Jitter that was added to the diagonal for the factorization to succeed.
  double jitter() const { return jitter_; }
  /// Largest observed target (the incumbent f+ for expected improvement).
  double best_target() const;
  const Eigen::MatrixXd& factor() const { return factor_; }

 private:
  void require_fitted() const;
  Eigen::VectorXd cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& query) const;

  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  KernelParams params_;
  Eigen::MatrixXd factor_;  // lower triangular
  Eigen::VectorXd alpha_;
  double target_mean_ = 0.0;
  double jitter_ = 0.0;
};

}  // namespace cbol
