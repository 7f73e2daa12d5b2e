// Expected improvement and its maximization over a bounded box.
#pragma once

#include <Eigen/Dense>

#include "cbol/core_types.hpp"
#include "cbol/gp_surrogate.hpp"
#include "cbol/rng.hpp"

namespace cbol {

struct AcquisitionConfig {
  double xi = 0.1;
  int candidate_count = 1024;
  int refine_steps = 32;

  void validate() const;
};

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// EI for a maximized quantity with incumbent `best`:
///   (mean - best - xi) * Phi(z) + std * phi(z),  z = (mean - best - xi) / std,
/// and exactly 0 when std == 0.
double expected_improvement(double mean, double std, double best, double xi);

/// Highest-EI point of the box. Samples `candidate_count` uniform candidates,
/// scores them in index order (first maximum wins), then tries
/// `refine_steps` single-coordinate perturbations of the incumbent of up to
/// 1% of the box width, keeping strict improvements only.
Eigen::VectorXd propose_next(const GpModel& model, const BoundsBox& bounds, const AcquisitionConfig& cfg,
                             SeededRng& rng);

}  // namespace cbol
