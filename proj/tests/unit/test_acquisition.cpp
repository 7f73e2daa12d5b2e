#include <cmath>
#include <numbers>
#include <random>

#include "cbol/acquisition.hpp"
#include "doctest.h"

using namespace cbol;

namespace {

// Composite Simpson integral of the density from -12 to x.
double simpson_cdf(double x) {
  const double lo = -12.0;
  const int n = 200000;
  const double h = (x - lo) / n;
  double s = std::exp(-0.5 * lo * lo) + std::exp(-0.5 * x * x);
  for (int i = 1; i < n; ++i) {
    const double t = lo + i * h;
    s += (i % 2 ? 4.0 : 2.0) * std::exp(-0.5 * t * t);
  }
  return s * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
}

struct McEstimate {
  double mean;
  double stderr_;
};

McEstimate mc_improvement(double mean, double std, double best, double xi, long samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(mean, std);
  long double s = 0, s2 = 0;
  for (long i = 0; i < samples; ++i) {
    const double v = std::max(normal(gen) - best - xi, 0.0);
    s += v;
    s2 += static_cast<long double>(v) * v;
  }
  const long double m = s / samples;
  const long double var = (s2 / samples - m * m) * samples / (samples - 1);
  return {static_cast<double>(m), static_cast<double>(std::sqrt(var / samples))};
}

GpModel two_point_1d() {
  Eigen::MatrixXd x(2, 1);
  x << -0.5, 0.4;
  Eigen::VectorXd y(2);
  y << 0.2, 0.5;
  KernelParams p;
  p.signal_variance = 1.0;
  p.length_scales = Eigen::VectorXd::Constant(1, 0.3);
  p.noise_variance = 1e-8;
  return GpModel::fit(x, y, p);
}

}  // namespace

TEST_CASE("standard normal pdf") {
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
  CHECK(std_normal_pdf(1.0) == doctest::Approx(0.2419707245).epsilon(1e-10));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-8, 8);
  for (int i = 0; i < 100; ++i) {
    const double x = u(gen);
    CHECK(std_normal_pdf(x) == std_normal_pdf(-x));
  }
}

TEST_CASE("standard normal cdf") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std::abs(std_normal_cdf(1.959964) - 0.975) <= 1e-6);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-8, 8);
  for (int i = 0; i < 40; ++i) {
    const double x = u(gen);
    CHECK(std::abs(std_normal_cdf(x) - simpson_cdf(x)) <= 1e-7);
    CHECK(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-12);
  }
}

TEST_CASE("expected improvement closed forms") {
  CHECK(expected_improvement(3.0, 0.0, 1.0, 0.1) == 0.0);
  CHECK(expected_improvement(-3.0, 0.0, 1.0, 0.0) == 0.0);
  for (double s : {0.1, 1.0, 2.5}) {
    CHECK(expected_improvement(1.1, s, 1.0, 0.1) == doctest::Approx(0.3989422804 * s).epsilon(1e-9));
  }
  CHECK_THROWS_AS(expected_improvement(0.0, -1e-12, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(expected_improvement(std::nan(""), 1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("expected improvement matches Monte Carlo (spec tuple)") {
  const McEstimate mc = mc_improvement(1.0, 0.5, 0.7, 0.1, 2000000, 7);
  CHECK(std::abs(expected_improvement(1.0, 0.5, 0.7, 0.1) - mc.mean) <= 3.0 * mc.stderr_);
}

TEST_CASE("expected improvement properties") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double best = u(gen);
    const double xi = 0.5 * pos(gen);
    const double mean = u(gen);
    const double s1 = pos(gen) + 1e-6;
    const double s2 = s1 + pos(gen);
    CHECK(expected_improvement(mean, s1, best, xi) >= 0.0);
    // Non-decreasing in std whenever the plain gain is non-negative.
    const double m_up = best + xi + std::abs(mean);
    CHECK(expected_improvement(m_up, s2, best, xi) >= expected_improvement(m_up, s1, best, xi) - 1e-15);
    // Larger xi never helps.
    CHECK(expected_improvement(mean, s1, best, xi + pos(gen)) <= expected_improvement(mean, s1, best, xi) + 1e-15);
    // std -> 0+ recovers the plain gain.
    CHECK(std::abs(expected_improvement(mean, 1e-9, best, xi) - std::max(mean - best - xi, 0.0)) <= 1e-6);
  }
}

TEST_CASE("propose_next with one candidate returns that candidate") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 8);
  KernelParams p;
  p.length_scales = Eigen::VectorXd::Constant(8, 0.5);
  const GpModel m = GpModel::fit(x, Eigen::VectorXd::Constant(1, 1.0), p);
  AcquisitionConfig cfg;
  cfg.candidate_count = 1;
  cfg.refine_steps = 0;
  SeededRng a(99), b(99);
  const Eigen::VectorXd proposed = propose_next(m, BoundsBox::unit_box(), cfg, a);
  CHECK(proposed == b.uniform_in(BoundsBox::unit_box()));
}

TEST_CASE("propose_next is deterministic and stays in bounds") {
  SeededRng data(5);
  const int n = 10;
  Eigen::MatrixXd x(n, 8);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x.row(i) = data.uniform_in(BoundsBox::unit_box()).transpose();
    y[i] = -x.row(i).squaredNorm();
  }
  const GpModel m = GpModel::fit(x, y, KernelParams::heuristic(BoundsBox::unit_box(), y));
  BoundsBox box(Eigen::VectorXd::Constant(8, -0.2), Eigen::VectorXd::Constant(8, 0.7));
  AcquisitionConfig cfg;
  cfg.candidate_count = 256;
  cfg.refine_steps = 64;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SeededRng r1(seed), r2(seed);
    const Eigen::VectorXd a = propose_next(m, box, cfg, r1);
    const Eigen::VectorXd b = propose_next(m, box, cfg, r2);
    CHECK(a == b);
    CHECK(box.contains(a));
  }
}

TEST_CASE("propose_next reaches the dense-grid EI maximum in 1-D") {
  const GpModel m = two_point_1d();
  const BoundsBox box = BoundsBox::unit_box(1);
  AcquisitionConfig cfg;
  cfg.candidate_count = 4096;
  for (double xi : {0.0, 0.1}) {
    cfg.xi = xi;
    SeededRng rng(17);
    const Eigen::VectorXd z = propose_next(m, box, cfg, rng);
    const auto ei_at = [&](double t) {
      const Posterior post = m.posterior(Eigen::VectorXd::Constant(1, t));
      return expected_improvement(post.mean, std::sqrt(post.variance), m.best_target(), xi);
    };
    double grid_max = 0.0;
    for (int i = 0; i < 100000; ++i) grid_max = std::max(grid_max, ei_at(-1.0 + 2.0 * i / 99999.0));
    CHECK(ei_at(z[0]) >= grid_max - 1e-4);
  }
}

TEST_CASE("acquisition config validation") {
  AcquisitionConfig cfg;
  cfg.xi = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.candidate_count = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
