#include "cbol/rng.hpp"

#include <algorithm>

namespace cbol {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash64(std::uint64_t seed, std::uint64_t run_index) {
  return splitmix64(seed ^ splitmix64(run_index));
}

Eigen::VectorXd SeededRng::uniform_in(const BoundsBox& box) {
  Eigen::VectorXd x(box.dim());
  for (int d = 0; d < box.dim(); ++d) {
    // Clamp covers the degenerate lower == upper - tiny case where rounding could step past upper.
    x[d] = std::min(box.upper[d], uniform(box.lower[d], box.upper[d]));
  }
  return x;
}

}  // namespace cbol
