#include "cbol/latent_system.hpp"

#include <cmath>
#include <string>

namespace cbol {

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

BoundsBox::BoundsBox(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  validate();
}

BoundsBox BoundsBox::unit_box(int dim) {
  return BoundsBox(Eigen::VectorXd::Constant(dim, -1.0), Eigen::VectorXd::Constant(dim, 1.0));
}

void BoundsBox::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("bounds: lower and upper must be non-empty and of equal dimension");
  }
  if (!lower.allFinite() || !upper.allFinite()) throw std::invalid_argument("bounds: non-finite entry");
  for (Eigen::Index d = 0; d < lower.size(); ++d) {
    if (!(lower[d] < upper[d])) throw std::invalid_argument("bounds: lower must be strictly below upper");
  }
}

bool BoundsBox::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Eigen::VectorXd BoundsBox::clip(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Weights::Weights(Eigen::VectorXd values) : w(std::move(values)) { validate(); }

Weights Weights::step() {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(kModules);
  w[kModules - 1] = 1.0;
  return Weights(std::move(w));
}

Weights Weights::uniform() { return Weights(Eigen::VectorXd::Constant(kModules, 1.0 / kModules)); }

void Weights::validate() const {
  if (w.size() != kModules) throw std::invalid_argument("weights: expected one weight per module (48)");
  if (!w.allFinite() || (w.array() < 0.0).any()) throw std::invalid_argument("weights: entries must be finite and >= 0");
  if ((w.array() == 0.0).all()) throw std::invalid_argument("weights: at least one weight must be positive");
}

ClassLabel ClassLabel::of_module(int m) {
  if (m < 1 || m > kModules) throw std::out_of_range("class label: module must be in 1..48");
  return ClassLabel(m);
}

int ClassLabel::module() const {
  if (!is_physical()) throw StateError("class label is NonPhysical");
  return value_;
}

std::string to_string(const ClassLabel& label) {
  return label.is_physical() ? std::to_string(label.module()) : std::string("NonPhysical");
}

std::vector<BeamState> Decoder::decode(const LatentTrajectory& trajectory) const {
  std::vector<BeamState> states;
  states.reserve(kModules);
  for (int m = 1; m <= kModules; ++m) states.push_back(decode_module(trajectory, m));
  return states;
}

bool trajectory_passes(const Classifier& classifier, std::span<const BeamState> states) {
  if (states.size() != static_cast<std::size_t>(kModules)) {
    throw std::invalid_argument("trajectory_passes: expected 48 states");
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    const ClassLabel label = classifier.classify(states[i]);
    if (!label.is_physical() || label.module() != static_cast<int>(i) + 1) return false;
  }
  return true;
}

}  // namespace cbol
