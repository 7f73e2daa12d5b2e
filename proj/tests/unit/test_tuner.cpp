#include <algorithm>
#include <cmath>
#include <set>

#include "cbol/objective.hpp"
#include "cbol/tuner.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbol;
using cbol::testing::committed_latent_system;

namespace {

// Cheap deterministic stand-in: quadratic loss, passes when z[0] <= 0.
Evaluator toy_evaluator(int* calls = nullptr) {
  return [calls](const LatentPoint& z) {
    if (calls) ++*calls;
    Evaluation e;
    e.trajectory.points.fill(z);
    e.losses = BeamLossVector::Zero(kModules);
    e.losses[kModules - 1] = std::min(1.0, 0.1 * (z.array() - 0.3).square().sum());
    e.total_loss = e.losses[kModules - 1];
    e.passed_classifier = z[0] <= 0.0;
    return e;
  };
}

bool same_run(const RunResult& a, const RunResult& b) {
  if (a.all_entries.size() != b.all_entries.size() || a.pruned_indices != b.pruned_indices ||
      a.best_index != b.best_index || a.seed != b.seed)
    return false;
  for (std::size_t i = 0; i < a.all_entries.size(); ++i) {
    const auto& x = a.all_entries[i];
    const auto& y = b.all_entries[i];
    if (x.z1 != y.z1 || x.total_loss != y.total_loss || x.passed_classifier != y.passed_classifier ||
        x.settings != y.settings || x.losses != y.losses)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sample_initial: containment, moments, determinism") {
  Eigen::VectorXd hi = Eigen::VectorXd::LinSpaced(8, 0.1, 0.8);
  Eigen::VectorXd lo = hi.array() - 1e-12;
  SeededRng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(BoundsBox(lo, hi).contains(sample_initial(BoundsBox(lo, hi), rng)));

  const BoundsBox box(Eigen::VectorXd::LinSpaced(8, -1.0, 0.0), Eigen::VectorXd::LinSpaced(8, 0.5, 2.0));
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(8);
  for (int i = 0; i < n; ++i) sum += sample_initial(box, rng);
  for (int d = 0; d < 8; ++d) {
    const double w = box.upper[d] - box.lower[d];
    const double sigma = w / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum[d] / n - 0.5 * (box.lower[d] + box.upper[d])) <= 3 * sigma);
  }
  SeededRng a(9), b(9);
  CHECK(sample_initial(box, a) == sample_initial(box, b));
}

TEST_CASE("run seeds follow hash64") {
  CHECK(run_seed(1, 0) == hash64(1, 0));
  CHECK(run_seed(1, 3) != run_seed(1, 4));
  CHECK(run_seed(1, 3) != run_seed(2, 3));
}

TEST_CASE("one-evaluation run") {
  TunerConfig cfg;
  cfg.iterations = 1;
  cfg.initial_design = 1;
  const RunResult r = cbol_tune(cfg, 0, make_evaluator(committed_latent_system(), cfg.weights));
  REQUIRE(r.all_entries.size() == 1);
  CHECK(r.surrogate_observations == 1);
  if (r.all_entries[0].passed_classifier) {
    REQUIRE(r.best() != nullptr);
    CHECK(r.best_index == std::optional<std::size_t>(0));
  } else {
    CHECK(r.best() == nullptr);
    CHECK(r.pruned_indices.empty());
  }
}

TEST_CASE("tuner run invariants on the synthetic system") {
  TunerConfig cfg;
  cfg.iterations = 40;
  cfg.candidate_count = 256;
  const Evaluator eval = make_evaluator(committed_latent_system(), cfg.weights);
  const RunResult r = cbol_tune(cfg, 2, eval);
  REQUIRE(r.all_entries.size() == 40);
  CHECK(r.surrogate_observations == 40);
  CHECK(r.seed == run_seed(cfg.seed, 2));

  std::vector<std::size_t> expected_s;
  double best = INFINITY;
  std::optional<std::size_t> best_idx;
  double running = INFINITY;
  for (std::size_t i = 0; i < r.all_entries.size(); ++i) {
    const HistoryEntry& e = r.all_entries[i];
    CHECK(e.iteration == static_cast<int>(i));
    CHECK(cfg.bounds.contains(e.z1));
    CHECK(e.trajectory.points[0] == e.z1);
    CHECK(e.total_loss == total_beam_loss(e.losses, cfg.weights));
    if (e.passed_classifier) {
      expected_s.push_back(i);
      if (e.total_loss < best) {
        best = e.total_loss;
        best_idx = i;
      }
      CHECK(std::min(running, e.total_loss) <= running);
      running = std::min(running, e.total_loss);
    }
  }
  CHECK(r.pruned_indices == expected_s);
  CHECK(r.best_index == best_idx);
  CHECK(r.pruned_history().size() == expected_s.size());
}

TEST_CASE("fixed seed gives identical runs") {
  TunerConfig cfg;
  cfg.iterations = 30;
  cfg.candidate_count = 128;
  const Evaluator eval = make_evaluator(committed_latent_system(), cfg.weights);
  CHECK(same_run(cbol_tune(cfg, 0, eval), cbol_tune(cfg, 0, eval)));
}

TEST_CASE("the surrogate sees pruned points too") {
  TunerConfig cfg;
  cfg.iterations = 60;
  cfg.candidate_count = 128;
  int calls = 0;
  const RunResult r = cbol_tune(cfg, 0, toy_evaluator(&calls));
  CHECK(calls == 60);
  CHECK(r.surrogate_observations == 60);
  CHECK(r.pruned_indices.size() < r.all_entries.size());
}

TEST_CASE("multi_run: derived seeds, order independence, distinct starts") {
  TunerConfig cfg;
  cfg.iterations = 12;
  cfg.runs = 10;
  cfg.candidate_count = 64;
  const Evaluator eval = toy_evaluator();
  const auto runs = multi_run(cfg, eval);
  REQUIRE(runs.size() == 10);
  std::set<std::vector<double>> starts;
  for (int r = 0; r < 10; ++r) {
    CHECK(runs[r].run_index == r);
    const LatentPoint& z = runs[r].all_entries[0].z1;
    starts.insert(std::vector<double>(z.data(), z.data() + 8));
  }
  CHECK(starts.size() == 10);
  for (int r : {7, 3, 0, 9}) CHECK(same_run(cbol_tune(cfg, r, eval), runs[r]));

  TunerConfig one = cfg;
  one.runs = 1;
  CHECK(same_run(multi_run(one, eval)[0], cbol_tune(cfg, 0, eval)));
}

TEST_CASE("record keeps S and S* consistent") {
  RunResult r;
  const Evaluator eval = toy_evaluator();
  LatentPoint a = LatentPoint::Constant(-0.5);
  LatentPoint b = LatentPoint::Constant(0.3);  // fails (z0 > 0), lowest loss
  LatentPoint c = LatentPoint::Constant(-0.5);  // ties with a; earliest wins
  r.record(a, eval(a));
  r.record(b, eval(b));
  r.record(c, eval(c));
  CHECK(r.pruned_indices == std::vector<std::size_t>{0, 2});
  CHECK(r.best_index == std::optional<std::size_t>(0));
}

TEST_CASE("tuner config validation") {
  TunerConfig cfg;
  cfg.initial_design = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.iterations = 5;
  cfg.initial_design = 6;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.runs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.xi = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.bounds = BoundsBox::unit_box(3);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
