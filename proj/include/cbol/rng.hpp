// Seeded random streams and the per-run seed split.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "cbol/core_types.hpp"

namespace cbol {

/// SplitMix64 finalizer (Steele, Lea & Flood).
std::uint64_t splitmix64(std::uint64_t x);

/// Per-run seed derivation: splitmix64(seed ^ splitmix64(run_index)).
std::uint64_t hash64(std::uint64_t seed, std::uint64_t run_index);

/// mt19937_64 stream with a platform-independent mapping to doubles.
///
/// std::uniform_real_distribution is implementation defined, so draws go
/// through a fixed 53-bit mantissa mapping instead. Every number produced by
/// the tuner is therefore identical across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  Eigen::VectorXd uniform_in(const BoundsBox& box);
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cbol
