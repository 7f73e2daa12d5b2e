#include "cbol/gp_surrogate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace cbol {

void KernelParams::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw std::invalid_argument("kernel signal_variance must be positive and finite");
  }
  if (length_scales.size() == 0) throw std::invalid_argument("kernel length_scales must be non-empty");
  for (Eigen::Index d = 0; d < length_scales.size(); ++d) {
    if (!(length_scales[d] > 0.0) || !std::isfinite(length_scales[d])) {
      throw std::invalid_argument("kernel length_scales must be positive and finite");
    }
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("kernel noise_variance must be non-negative and finite");
  }
}

KernelParams KernelParams::heuristic(const BoundsBox& bounds, const Eigen::VectorXd& targets) {
  KernelParams p;
  p.length_scales = 0.25 * bounds.width();
  double var = 0.0;
  if (targets.size() > 0) {
    const double mean = targets.mean();
    var = (targets.array() - mean).square().mean();
  }
  p.signal_variance = std::max(var, 1e-6);
  p.noise_variance = 1e-8;
  return p;
}

double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                   const KernelParams& params) {
  if (a.size() != b.size() || a.size() != params.length_scales.size()) {
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  }
  if (!a.allFinite() || !b.allFinite()) throw std::invalid_argument("kernel_eval: non-finite input");
  double r2 = 0.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double u = (a[d] - b[d]) / params.length_scales[d];
    r2 += u * u;
  }
  return params.signal_variance * std::exp(-0.5 * r2);
}

GpModel GpModel::fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, KernelParams params) {
  const Eigen::Index n = inputs.rows();
  if (n == 0) throw std::invalid_argument("gp_fit: empty dataset");
  if (targets.size() != n) throw std::invalid_argument("gp_fit: inputs and targets differ in length");
  if (!inputs.allFinite() || !targets.allFinite()) throw std::invalid_argument("gp_fit: non-finite data");
  params.validate();
  if (params.length_scales.size() != inputs.cols()) {
    throw std::invalid_argument("gp_fit: length_scales dimension does not match inputs");
  }

  if (params.noise_variance == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (inputs.row(i) == inputs.row(j) && targets[i] != targets[j]) {
          std::ostringstream msg;
          msg << "gp_fit: observations " << i << " and " << j
              << " share an input but disagree on the target; the kernel matrix is singular with zero noise";
          throw NumericalError(msg.str());
        }
      }
    }
  }

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = params.signal_variance + params.noise_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel_eval(inputs.row(i).transpose(), inputs.row(j).transpose(), params);
      k(i, j) = v;
      k(j, i) = v;
    }
  }

  GpModel model;
  double jitter = kInitialJitter;
  bool ok = false;
  Eigen::LLT<Eigen::MatrixXd> llt;
  // 1e-10, 1e-9, ..., 1e-4
  for (int attempt = 0; attempt < 7; ++attempt, jitter *= 10.0) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    llt.compute(kj);
    if (llt.info() == Eigen::Success && llt.matrixLLT().allFinite()) {
      ok = true;
      break;
    }
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "gp_fit: kernel matrix of " << n << " observations is not positive definite even with jitter "
        << kMaxJitter << " (ill-conditioned or duplicated inputs)";
    throw NumericalError(msg.str());
  }

  model.target_mean_ = targets.mean();
  model.factor_ = llt.matrixL();
  model.alpha_ = llt.solve((targets.array() - model.target_mean_).matrix());
  model.jitter_ = jitter;
  model.inputs_ = std::move(inputs);
  model.targets_ = std::move(targets);
  model.params_ = std::move(params);
  return model;
}

GpModel GpModel::update(const Eigen::Ref<const Eigen::VectorXd>& point, double value) const {
  return update(point, value, params_);
}

GpModel GpModel::update(const Eigen::Ref<const Eigen::VectorXd>& point, double value, KernelParams params) const {
  require_fitted();
  if (point.size() != inputs_.cols()) throw std::invalid_argument("gp_update: dimension mismatch");
  if (!std::isfinite(value)) throw std::invalid_argument("gp_update: non-finite value");
  Eigen::MatrixXd x(inputs_.rows() + 1, inputs_.cols());
  x.topRows(inputs_.rows()) = inputs_;
  x.row(inputs_.rows()) = point.transpose();
  Eigen::VectorXd y(targets_.size() + 1);
  y.head(targets_.size()) = targets_;
  y[targets_.size()] = value;
  return fit(std::move(x), std::move(y), std::move(params));
}

void GpModel::require_fitted() const {
  if (!fitted()) throw StateError("gaussian process has not been fitted");
}

double GpModel::best_target() const {
  require_fitted();
  return targets_.maxCoeff();
}

Eigen::VectorXd GpModel::cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& query) const {
  Eigen::VectorXd ks(inputs_.rows());
  for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
    ks[i] = kernel_eval(inputs_.row(i).transpose(), query, params_);
  }
  return ks;
}

namespace {

double clamp_variance(double v, double signal_variance) {
  // Only roundoff can push the variance below zero.
  assert(v > -1e-10 * std::max(1.0, signal_variance));
  (void)signal_variance;
  return std::max(v, 0.0);
}

}  // namespace

Posterior GpModel::posterior(const Eigen::Ref<const Eigen::VectorXd>& query) const {
  require_fitted();
  if (query.size() != inputs_.cols()) throw std::invalid_argument("gp_posterior: dimension mismatch");
  const Eigen::VectorXd ks = cross_covariance(query);
  const Eigen::VectorXd v = factor_.triangularView<Eigen::Lower>().solve(ks);
  return {target_mean_ + ks.dot(alpha_), clamp_variance(params_.signal_variance - v.squaredNorm(),
                                                         params_.signal_variance)};
}

void GpModel::posterior_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries, Eigen::VectorXd& means,
                              Eigen::VectorXd& variances) const {
  require_fitted();
  if (queries.cols() != inputs_.cols()) throw std::invalid_argument("gp_posterior: dimension mismatch");
  const Eigen::Index n = inputs_.rows();
  const Eigen::Index c = queries.rows();
  Eigen::MatrixXd ks(n, c);
  for (Eigen::Index q = 0; q < c; ++q) {
    ks.col(q) = cross_covariance(queries.row(q).transpose());
  }
  means = (ks.transpose() * alpha_).array() + target_mean_;
  factor_.triangularView<Eigen::Lower>().solveInPlace(ks);
  variances.resize(c);
  for (Eigen::Index q = 0; q < c; ++q) {
    variances[q] = clamp_variance(params_.signal_variance - ks.col(q).squaredNorm(), params_.signal_variance);
  }
}

}  // namespace cbol
