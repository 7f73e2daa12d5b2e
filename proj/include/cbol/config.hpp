// TOML run configuration.
//
//   [bounds]    lower = [8 numbers], upper = [8 numbers]
//   [tuner]     iterations, runs, xi, seed, candidate_count, refine_steps,
//               initial_design, step_size, fd_epsilon, adam_beta1,
//               adam_beta2, adam_eps
//   [system]    asset_file = "path/to/synthetic_system.json"
//   [objective] weights = "step" | "uniform" | [48 numbers]
//
// Every section and key is optional; unknown sections or keys are errors.
#pragma once

#include <filesystem>
#include <string>

#include "cbol/baselines.hpp"
#include "cbol/tuner.hpp"

namespace cbol {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AppConfig {
  TunerConfig tuner;
  /// Gradient-search parameters; iterations, runs, bounds, weights and seed
  /// are taken from `tuner` by baseline().
  BaselineConfig gradient;
  /// Empty means the default asset.
  std::string asset_file;

  BaselineConfig baseline() const;
};

AppConfig parse_config(const std::string& toml_text, const std::string& source = "<string>");
AppConfig load_config(const std::filesystem::path& path);

}  // namespace cbol
