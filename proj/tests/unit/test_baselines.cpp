#include <cmath>

#include "cbol/baselines.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbol;
using cbol::testing::committed_latent_system;

namespace {

// Quadratic bowl with a seeded minimizer, bypassing the latent system.
struct Quadratic {
  LatentPoint minimizer;
  LatentPoint curvature;

  Evaluator evaluator() const {
    return [q = *this](const LatentPoint& z) {
      Evaluation e;
      e.trajectory.points.fill(z);
      e.losses = BeamLossVector::Zero(kModules);
      e.total_loss = (q.curvature.array() * (z - q.minimizer).array().square()).sum();
      e.losses[kModules - 1] = e.total_loss;
      e.passed_classifier = true;
      return e;
    };
  }
};

Evaluator flat_evaluator() {
  return [](const LatentPoint& z) {
    Evaluation e;
    e.trajectory.points.fill(z);
    e.losses = BeamLossVector::Constant(kModules, 0.4);
    e.total_loss = 0.4;
    e.passed_classifier = false;
    return e;
  };
}

}  // namespace

TEST_CASE("random search: single entry, determinism, schema") {
  BaselineConfig cfg;
  cfg.iterations = 1;
  const Evaluator eval = make_evaluator(committed_latent_system(), cfg.weights);
  const RunResult one = random_search(cfg, 0, eval);
  CHECK(one.all_entries.size() == 1);
  CHECK(one.surrogate_observations == 0);

  cfg.iterations = 25;
  const RunResult a = random_search(cfg, 4, eval);
  const RunResult b = random_search(cfg, 4, eval);
  REQUIRE(a.all_entries.size() == 25);
  for (int i = 0; i < 25; ++i) {
    CHECK(a.all_entries[i].z1 == b.all_entries[i].z1);
    CHECK(a.all_entries[i].total_loss == b.all_entries[i].total_loss);
    CHECK(cfg.bounds.contains(a.all_entries[i].z1));
  }
  CHECK(a.pruned_indices == b.pruned_indices);
  CHECK(a.seed == run_seed(cfg.seed, 4));
}

TEST_CASE("random and BO runs with the same index start from the same point") {
  TunerConfig t;
  t.iterations = 9;
  t.candidate_count = 32;
  const Evaluator eval = make_evaluator(committed_latent_system(), t.weights);
  const RunResult bo = cbol_tune(t, 3, eval);
  const RunResult rs = random_search(BaselineConfig::from(t), 3, eval);
  CHECK(bo.all_entries[0].z1 == rs.all_entries[0].z1);
}

TEST_CASE("gradient search spends exactly the budget") {
  Quadratic q{LatentPoint::Constant(0.1), LatentPoint::Ones()};
  for (int n : {1, 2, 16, 17, 18, 34, 35, 100, 203}) {
    BaselineConfig cfg;
    cfg.iterations = n;
    const RunResult r = gradient_search(cfg, 0, q.evaluator());
    CHECK(r.all_entries.size() == static_cast<std::size_t>(n));
    for (const auto& e : r.all_entries) CHECK(cfg.bounds.contains(e.z1));
  }
}

TEST_CASE("gradient search leaves the iterate alone on a flat region") {
  BaselineConfig cfg;
  cfg.iterations = 17 * 5;
  cfg.initial_point = LatentPoint::Constant(0.25);
  const RunResult r = gradient_search(cfg, 0, flat_evaluator());
  for (int step = 0; step < 5; ++step) CHECK(r.all_entries[17 * step].z1 == *cfg.initial_point);
}

TEST_CASE("gradient search converges on a seeded quadratic") {
  // 500 evaluations are 29 Adam steps. With beta1 = 0.9 the iterate is still
  // swinging by a sizeable fraction of the step after 29 steps, so this uses
  // lighter momentum and starts 1 to 5 step lengths from the minimizer in
  // every coordinate.
  SeededRng rng(12);
  const BoundsBox inner(Eigen::VectorXd::Constant(8, -0.5), Eigen::VectorXd::Constant(8, 0.5));
  for (int trial = 0; trial < 20; ++trial) {
    Quadratic q{rng.uniform_in(inner), LatentPoint::Zero()};
    LatentPoint start;
    for (int d = 0; d < 8; ++d) {
      q.curvature[d] = rng.uniform(0.5, 2.0);
      start[d] = q.minimizer[d] + (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 0.5);
    }
    BaselineConfig cfg;
    cfg.iterations = 500;
    cfg.step_size = 0.1;
    cfg.adam_beta1 = 0.5;
    cfg.initial_point = start;
    const RunResult r = gradient_search(cfg, 0, q.evaluator());
    REQUIRE(r.all_entries.size() == 500);
    // Last full iterate (entries 17k are iterates).
    const LatentPoint last = r.all_entries[17 * ((500 - 1) / 17)].z1;
    CHECK((last - q.minimizer).cwiseAbs().maxCoeff() <= 1e-3);
  }
}

TEST_CASE("gradient search from far outside the manifold stays outside") {
  const auto sys = cbol::testing::committed_system();
  const auto& c = sys->constants();
  BaselineConfig cfg;
  cfg.iterations = 17 * 12;
  cfg.initial_point = LatentPoint::Constant(0.95);
  REQUIRE((*cfg.initial_point - c.manifold_center).cwiseAbs().maxCoeff() >= 2 * c.manifold_radius);
  const RunResult r = gradient_search(cfg, 0, make_evaluator(committed_latent_system(), cfg.weights));
  for (const auto& e : r.all_entries) CHECK_FALSE(sys->in_manifold(e.z1));
  CHECK(r.pruned_indices.empty());
}

TEST_CASE("baseline config validation") {
  BaselineConfig cfg;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.fd_epsilon = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.adam_beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.initial_point = LatentPoint::Constant(2.0);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
