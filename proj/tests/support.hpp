// Shared fixtures for the test binaries.
#pragma once

#include <memory>

#include "cbol/synthetic_assets.hpp"
#include "cbol/synthetic_system.hpp"

namespace cbol::testing {

inline std::shared_ptr<const SyntheticSystem> committed_system() {
  static const std::shared_ptr<const SyntheticSystem> sys = load_synthetic_system(default_system_asset());
  return sys;
}

inline const LatentSystem& committed_latent_system() {
  static const LatentSystem ls = make_latent_system(committed_system());
  return ls;
}

}  // namespace cbol::testing
