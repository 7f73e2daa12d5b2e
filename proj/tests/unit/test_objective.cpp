#include <cmath>

#include "cbol/objective.hpp"
#include "cbol/reporting.hpp"
#include "cbol/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbol;
using cbol::testing::committed_latent_system;
using cbol::testing::committed_system;

namespace {

BeamState blank_state(int module) {
  BeamState s;
  s.module = module;
  for (auto& p : s.projections) p = Image::Zero(32, 32);
  return s;
}

}  // namespace

TEST_CASE("module_beam_loss endpoints and clamping") {
  BeamState s = blank_state(48);
  CHECK(module_beam_loss(s, 2.0) == 1.0);
  s.projections[10](10, 10) = 0.5;
  s.projections[10](12, 20) = 1.5;
  CHECK(module_beam_loss(s, 2.0) == 0.0);
  CHECK(module_beam_loss(s, 1.0) == 0.0);  // more than the reference clamps at 0
  s.projections[0].setConstant(1.0);       // other projections do not count
  CHECK(module_beam_loss(s, 4.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(module_beam_loss(s, 0.0), std::invalid_argument);
}

TEST_CASE("module_beam_loss matches a direct pixel sum of an analytic blob") {
  BeamState s = blank_state(1);
  double direct = 0.0;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      const double v = 0.9 * std::exp(-((i - 14.3) * (i - 14.3) / 8.0 + (j - 17.9) * (j - 17.9) / 18.0));
      s.projections[10](i, j) = v;
      direct += v;
    }
  }
  const double ref = 40.0;
  CHECK(std::abs(module_beam_loss(s, ref) - (1.0 - direct / ref)) <= 1e-12);
}

TEST_CASE("total_beam_loss") {
  BeamLossVector l = BeamLossVector::Zero(48);
  l[47] = 0.3;
  CHECK(total_beam_loss(l, step_weights()) == 0.3);
  CHECK(total_beam_loss(BeamLossVector::Constant(48, 0.5), Weights::uniform()) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(total_beam_loss(BeamLossVector::Zero(47), step_weights()), std::invalid_argument);

  SeededRng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    BeamLossVector a(48), b(48);
    Eigen::VectorXd w(48), v(48);
    for (int i = 0; i < 48; ++i) {
      a[i] = rng.uniform01();
      b[i] = rng.uniform01();
      w[i] = rng.uniform01();
      v[i] = rng.uniform01();
    }
    double naive = 0.0;
    for (int i = 0; i < 48; ++i) naive += w[i] * a[i];
    CHECK(std::abs(total_beam_loss(a, Weights(w)) - naive) <= 1e-15 * 48);
    // Linear in the losses and in the weights.
    const double s = rng.uniform(0.1, 2.0);
    CHECK(total_beam_loss(a + s * b, Weights(w)) ==
          doctest::Approx(total_beam_loss(a, Weights(w)) + s * total_beam_loss(b, Weights(w))).epsilon(1e-13));
    CHECK(total_beam_loss(a, Weights(w + s * v)) ==
          doctest::Approx(total_beam_loss(a, Weights(w)) + s * total_beam_loss(a, Weights(v))).epsilon(1e-13));
  }
}

TEST_CASE("step weights") {
  const Weights w = step_weights();
  REQUIRE(w.w.size() == 48);
  CHECK(w.w[47] == 1.0);
  CHECK(w.w.head(47).isZero(0.0));
  CHECK(w.w.sum() == 1.0);
  CHECK_THROWS_AS(Weights(Eigen::VectorXd::Zero(48)).validate(), std::invalid_argument);
  Eigen::VectorXd neg = Eigen::VectorXd::Ones(48);
  neg[3] = -0.1;
  CHECK_THROWS_AS(Weights(neg).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Weights(Eigen::VectorXd::Ones(47)).validate(), std::invalid_argument);
}

TEST_CASE("objective_eval composes the pipeline") {
  const LatentSystem& sys = committed_latent_system();
  SeededRng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const LatentPoint z = rng.uniform_in(BoundsBox::unit_box());
    const ObjectiveResult r = objective_eval(z, sys, step_weights());
    CHECK(r.total_loss >= 0.0);
    CHECK(r.total_loss <= 1.0);
    CHECK(r.trajectory.points[0] == z);
    REQUIRE(r.states.size() == 48);
    REQUIRE(r.losses.size() == 48);
    CHECK(r.losses.minCoeff() >= 0.0);
    CHECK(r.losses.maxCoeff() <= 1.0);
    CHECK(r.total_loss == r.losses[47]);
    CHECK(objective_eval(z, sys, step_weights()).total_loss == r.total_loss);
    CHECK(objective_loss(z, sys, step_weights()) == r.total_loss);
    CHECK(objective_loss(z, sys, Weights::uniform()) == doctest::Approx(objective_eval(z, sys, Weights::uniform()).total_loss).epsilon(1e-15));
  }
}

TEST_CASE("with step weights only module 48 projection 11 matters") {
  const LatentSystem& sys = committed_latent_system();
  const ObjectiveResult r = objective_eval(LatentPoint::Constant(-0.2), sys, step_weights());
  std::vector<BeamState> states = r.states;
  for (int m = 0; m < 47; ++m)
    for (auto& p : states[m].projections) p.setConstant(0.37);
  for (int k = 0; k < 15; ++k)
    if (k != 10) states[47].projections[k].setZero();
  BeamLossVector losses(48);
  for (int m = 0; m < 48; ++m) losses[m] = module_beam_loss(states[m], sys.reference_intensity);
  CHECK(total_beam_loss(losses, step_weights()) == r.total_loss);
}

TEST_CASE("the committed oracle optimum reproduces L*") {
  const OracleResult o = load_oracle(default_oracle_asset());
  const auto& c = committed_system()->constants();
  CHECK(o.resolution == 10000);
  CHECK(committed_system()->in_manifold(o.z_star));
  const double l = objective_eval(o.z_star, committed_latent_system(), step_weights()).total_loss;
  CHECK(l == o.l_star);
  CHECK(l >= 0.0);
  // Loss is 1 - exp(sum of per-coordinate log transmissions) on the loss projection.
  CHECK(std::abs(l - (1.0 - std::exp(committed_system()->log_transmission(o.z_star)))) <= 1e-12);
  // The unconstrained optimum is outside the manifold and strictly better.
  LatentPoint free_opt;
  for (int d = 0; d < 8; ++d) free_opt[d] = c.transmission[d].center;
  CHECK_FALSE(committed_system()->in_manifold(free_opt));
  CHECK(objective_loss(free_opt, committed_latent_system(), step_weights()) < o.l_star);
}
