// Core domain types shared by every module of the tuner.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbol {

inline constexpr int kLatentDim = 8;
inline constexpr int kModules = 48;
inline constexpr int kProjections = 15;
inline constexpr int kSettingsDim = 8;
/// 1-based index of the energy-phase projection whose intensity defines beam loss.
inline constexpr int kLossProjection = 11;

/// Factorization of the surrogate kernel matrix failed even at maximum jitter.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An object was used before it reached a usable state (e.g. an unfitted surrogate).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Asset or oracle file failed its schema-version or checksum verification.
class AssetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LatentPoint = Eigen::Matrix<double, kLatentDim, 1>;
using Settings = Eigen::Matrix<double, kSettingsDim, 1>;

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v, const char* what);

/// The forecast trajectory z_{1:48}; points[0] is the searched initial latent z_1.
struct LatentTrajectory {
  std::array<LatentPoint, kModules> points;

  const LatentPoint& module(int m) const { return points.at(static_cast<std::size_t>(m - 1)); }
  const LatentPoint& initial() const { return points.front(); }
};

/// Axis-aligned search box; lower_d < upper_d in every dimension.
struct BoundsBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  BoundsBox() = default;
  BoundsBox(Eigen::VectorXd lo, Eigen::VectorXd hi);

  static BoundsBox unit_box(int dim = kLatentDim);

  int dim() const { return static_cast<int>(lower.size()); }
  Eigen::VectorXd width() const { return upper - lower; }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd clip(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  void validate() const;
};

/// Non-negative per-module weights of the total beam loss; not all zero.
struct Weights {
  Eigen::VectorXd w;

  Weights() = default;
  explicit Weights(Eigen::VectorXd values);

  static Weights step();
  static Weights uniform();

  void validate() const;
};

/// Per-module beam losses, each in [0, 1].
using BeamLossVector = Eigen::VectorXd;

/// Intensity image (rows x cols) with values in [0, 1].
using Image = Eigen::MatrixXd;

/// Decoded beam at one module: 15 phase-space projections.
struct BeamState {
  int module = 0;
  std::array<Image, kProjections> projections;

  const Image& projection(int k) const { return projections.at(static_cast<std::size_t>(k - 1)); }
};

/// Classifier output: a module number in 1..48, or non-physical.
class ClassLabel {
 public:
  static ClassLabel non_physical() { return ClassLabel(0); }
  static ClassLabel of_module(int m);

  bool is_physical() const { return value_ != 0; }
  int module() const;
  int raw() const { return value_; }

  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;

 private:
  explicit ClassLabel(int v) : value_(v) {}
  int value_;
};

std::string to_string(const ClassLabel& label);

}  // namespace cbol
