#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cbol/acquisition.hpp"
#include "cbol/baselines.hpp"
#include "cbol/config.hpp"
#include "cbol/gp_surrogate.hpp"
#include "cbol/objective.hpp"
#include "cbol/reporting.hpp"
#include "cbol/rng.hpp"
#include "cbol/synthetic_assets.hpp"
#include "cbol/tuner.hpp"

namespace py = pybind11;
using namespace cbol;

namespace {

// The synthetic testbed together with its LatentSystem view.
struct System {
  std::shared_ptr<const SyntheticSystem> synthetic;
  LatentSystem latent;

  explicit System(const std::filesystem::path& path)
      : synthetic(load_synthetic_system(path)), latent(make_latent_system(synthetic)) {}
};

Weights weights_from(const py::object& w) {
  if (w.is_none()) return Weights::step();
  if (py::isinstance<py::str>(w)) {
    const std::string name = w.cast<std::string>();
    if (name == "step") return Weights::step();
    if (name == "uniform") return Weights::uniform();
    throw py::value_error("weights must be 'step', 'uniform' or a sequence of 48 numbers");
  }
  return Weights(w.cast<Eigen::VectorXd>());
}

Eigen::MatrixXd trajectory_array(const LatentTrajectory& t) {
  Eigen::MatrixXd out(kModules, kLatentDim);
  for (int m = 0; m < kModules; ++m) out.row(m) = t.points[static_cast<std::size_t>(m)].transpose();
  return out;
}

// Evaluator around a Python callable z -> (loss, passed). The latent
// trajectory is the constant z1 and the loss sits on the last module.
Evaluator python_evaluator(py::function fn) {
  return [fn = std::move(fn)](const LatentPoint& z) {
    py::gil_scoped_acquire gil;
    const py::tuple r = fn(Eigen::VectorXd(z));
    if (r.size() != 2) throw py::value_error("objective must return (loss, passed)");
    Evaluation e;
    e.trajectory.points.fill(z);
    e.losses = BeamLossVector::Zero(kModules);
    e.total_loss = r[0].cast<double>();
    e.losses[kModules - 1] = e.total_loss;
    e.passed_classifier = r[1].cast<bool>();
    return e;
  };
}

Evaluator system_evaluator(const System& s, const Weights& w) { return make_evaluator(s.latent, w); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Classifier-pruned Bayesian optimization on a synthetic latent linac";

  py::register_exception<AssetError>(m, "AssetError");
  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<ConfigError>(m, "ConfigError");

  m.attr("LATENT_DIM") = kLatentDim;
  m.attr("MODULES") = kModules;

  m.def("splitmix64", &splitmix64);
  m.def("hash64", &hash64, py::arg("seed"), py::arg("run_index"));
  m.def("run_seed", &run_seed, py::arg("base_seed"), py::arg("run_index"));

  py::class_<BoundsBox>(m, "BoundsBox")
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("lower"), py::arg("upper"))
      .def_static("unit_box", &BoundsBox::unit_box, py::arg("dim") = kLatentDim)
      .def_readonly("lower", &BoundsBox::lower)
      .def_readonly("upper", &BoundsBox::upper)
      .def("contains", &BoundsBox::contains)
      .def("clip", &BoundsBox::clip);

  // Surrogate and acquisition.
  py::class_<KernelParams>(m, "KernelParams")
      .def(py::init([](double signal_variance, Eigen::VectorXd length_scales, double noise_variance) {
             KernelParams p{signal_variance, std::move(length_scales), noise_variance};
             p.validate();
             return p;
           }),
           py::arg("signal_variance"), py::arg("length_scales"), py::arg("noise_variance") = 0.0)
      .def_readonly("signal_variance", &KernelParams::signal_variance)
      .def_readonly("length_scales", &KernelParams::length_scales)
      .def_readonly("noise_variance", &KernelParams::noise_variance)
      .def_static("heuristic", &KernelParams::heuristic, py::arg("bounds"), py::arg("targets"));

  m.def("kernel_eval", &kernel_eval, py::arg("a"), py::arg("b"), py::arg("params"));

  py::class_<GpModel>(m, "GpModel")
      .def_static("fit", &GpModel::fit, py::arg("inputs"), py::arg("targets"), py::arg("params"))
      .def("update", py::overload_cast<const Eigen::Ref<const Eigen::VectorXd>&, double>(&GpModel::update, py::const_),
           py::arg("point"), py::arg("value"))
      .def("posterior",
           [](const GpModel& g, const Eigen::VectorXd& q) {
             const Posterior p = g.posterior(q);
             return py::make_tuple(p.mean, p.variance);
           })
      .def("posterior_batch",
           [](const GpModel& g, const Eigen::MatrixXd& q) {
             Eigen::VectorXd mean, var;
             g.posterior_batch(q, mean, var);
             return py::make_tuple(mean, var);
           })
      .def_property_readonly("size", &GpModel::size)
      .def_property_readonly("jitter", &GpModel::jitter)
      .def_property_readonly("best_target", &GpModel::best_target);

  m.def("expected_improvement", &expected_improvement, py::arg("mean"), py::arg("std"), py::arg("best"),
        py::arg("xi"));
  m.def("std_normal_pdf", &std_normal_pdf);
  m.def("std_normal_cdf", &std_normal_cdf);

  // Synthetic system and objective.
  py::class_<System>(m, "System")
      .def(py::init([](const py::object& path) {
             return System(path.is_none() ? default_system_asset() : path.cast<std::filesystem::path>());
           }),
           py::arg("path") = py::none())
      .def_property_readonly("manifold_center", [](const System& s) { return Eigen::VectorXd(s.synthetic->constants().manifold_center); })
      .def_property_readonly("manifold_radius", [](const System& s) { return s.synthetic->constants().manifold_radius; })
      .def_property_readonly("tau", [](const System& s) { return s.synthetic->constants().tau; })
      .def_property_readonly("bounds", [](const System& s) { return s.synthetic->constants().bounds; })
      .def("in_manifold", [](const System& s, const LatentPoint& z) { return s.synthetic->in_manifold(z); })
      .def("forecast", [](const System& s, const LatentPoint& z) { return trajectory_array(s.synthetic->forecast(z)); })
      .def("passes",
           [](const System& s, const LatentPoint& z) {
             return trajectory_passes(*s.latent.classifier, s.latent.decoder->decode(s.latent.forecaster->forecast(z)));
           })
      .def(
          "objective",
          [](const System& s, const LatentPoint& z, const py::object& weights) {
            const ObjectiveResult r = objective_eval(z, s.latent, weights_from(weights));
            py::dict d;
            d["total_loss"] = r.total_loss;
            d["losses"] = Eigen::VectorXd(r.losses);
            d["settings"] = Eigen::VectorXd(r.settings);
            d["trajectory"] = trajectory_array(r.trajectory);
            return d;
          },
          py::arg("z"), py::arg("weights") = py::none())
      .def("oracle",
           [](const System& s, int resolution, const py::object& weights) {
             const auto& c = s.synthetic->constants();
             const OracleResult o =
                 run_oracle(s.latent, c.bounds, c.manifold_center, c.manifold_radius, weights_from(weights), resolution);
             return py::make_tuple(Eigen::VectorXd(o.z_star), o.l_star);
           },
           py::arg("resolution") = 10000, py::arg("weights") = py::none());

  // Runs.
  py::class_<HistoryEntry>(m, "HistoryEntry")
      .def_readonly("iteration", &HistoryEntry::iteration)
      .def_property_readonly("z1", [](const HistoryEntry& e) { return Eigen::VectorXd(e.z1); })
      .def_property_readonly("trajectory", [](const HistoryEntry& e) { return trajectory_array(e.trajectory); })
      .def_property_readonly("settings", [](const HistoryEntry& e) { return Eigen::VectorXd(e.settings); })
      .def_readonly("losses", &HistoryEntry::losses)
      .def_readonly("total_loss", &HistoryEntry::total_loss)
      .def_readonly("passed_classifier", &HistoryEntry::passed_classifier);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("run_index", &RunResult::run_index)
      .def_readonly("seed", &RunResult::seed)
      .def_readonly("all_entries", &RunResult::all_entries)
      .def_readonly("pruned_indices", &RunResult::pruned_indices)
      .def_readonly("best_index", &RunResult::best_index)
      .def_readonly("surrogate_observations", &RunResult::surrogate_observations)
      .def("best", [](const RunResult& r) -> py::object {
        return r.best() ? py::cast(*r.best()) : py::none();
      })
      .def("write_jsonl", [](const RunResult& r, const std::filesystem::path& p) { write_history_jsonl(r, p); });

  m.def("read_history_jsonl", &read_history_jsonl, py::arg("path"), py::arg("run_index") = 0);

  py::class_<TunerConfig>(m, "TunerConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &TunerConfig::iterations)
      .def_readwrite("runs", &TunerConfig::runs)
      .def_readwrite("xi", &TunerConfig::xi)
      .def_readwrite("bounds", &TunerConfig::bounds)
      .def_readwrite("candidate_count", &TunerConfig::candidate_count)
      .def_readwrite("refine_steps", &TunerConfig::refine_steps)
      .def_readwrite("seed", &TunerConfig::seed)
      .def_readwrite("initial_design", &TunerConfig::initial_design)
      .def_property(
          "weights", [](const TunerConfig& c) { return c.weights.w; },
          [](TunerConfig& c, const py::object& w) { c.weights = weights_from(w); })
      .def("validate", &TunerConfig::validate);

  py::class_<BaselineConfig>(m, "BaselineConfig")
      .def(py::init<>())
      .def_static("from_tuner", &BaselineConfig::from)
      .def_readwrite("iterations", &BaselineConfig::iterations)
      .def_readwrite("runs", &BaselineConfig::runs)
      .def_readwrite("bounds", &BaselineConfig::bounds)
      .def_readwrite("seed", &BaselineConfig::seed)
      .def_readwrite("step_size", &BaselineConfig::step_size)
      .def_readwrite("fd_epsilon", &BaselineConfig::fd_epsilon)
      .def_readwrite("adam_beta1", &BaselineConfig::adam_beta1)
      .def_readwrite("adam_beta2", &BaselineConfig::adam_beta2)
      .def_readwrite("adam_eps", &BaselineConfig::adam_eps)
      .def_readwrite("initial_point", &BaselineConfig::initial_point)
      .def_property(
          "weights", [](const BaselineConfig& c) { return c.weights.w; },
          [](BaselineConfig& c, const py::object& w) { c.weights = weights_from(w); })
      .def("validate", &BaselineConfig::validate);

  // Runs on the synthetic system release the GIL; runs on a Python
  // objective take it back for every evaluation.
  m.def(
      "tune",
      [](const TunerConfig& cfg, int run_index, const System& s) {
        return cbol_tune(cfg, run_index, system_evaluator(s, cfg.weights));
      },
      py::arg("config"), py::arg("run_index"), py::arg("system"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "multi_run",
      [](const TunerConfig& cfg, const System& s) { return multi_run(cfg, system_evaluator(s, cfg.weights)); },
      py::arg("config"), py::arg("system"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "random_search",
      [](const BaselineConfig& cfg, int run_index, const System& s) {
        return random_search(cfg, run_index, system_evaluator(s, cfg.weights));
      },
      py::arg("config"), py::arg("run_index"), py::arg("system"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "gradient_search",
      [](const BaselineConfig& cfg, int run_index, const System& s) {
        return gradient_search(cfg, run_index, system_evaluator(s, cfg.weights));
      },
      py::arg("config"), py::arg("run_index"), py::arg("system"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "tune_function",
      [](const TunerConfig& cfg, int run_index, py::function fn) {
        const Evaluator eval = python_evaluator(std::move(fn));
        py::gil_scoped_release release;
        return cbol_tune(cfg, run_index, eval);
      },
      py::arg("config"), py::arg("run_index"), py::arg("objective"),
      "Run the tuner on objective(z) -> (loss, passed).");

  // Statistics and files.
  py::class_<SummaryStats>(m, "SummaryStats")
      .def_readonly("method", &SummaryStats::method)
      .def_readonly("runs", &SummaryStats::runs)
      .def_readonly("iterations", &SummaryStats::iterations)
      .def_readonly("per_run_best", &SummaryStats::per_run_best)
      .def_readonly("median", &SummaryStats::median)
      .def_readonly("mean", &SummaryStats::mean)
      .def_readonly("std", &SummaryStats::std)
      .def_readonly("min", &SummaryStats::min)
      .def_readonly("max", &SummaryStats::max)
      .def_readonly("pruned_fraction", &SummaryStats::pruned_fraction)
      .def_readonly("empty_runs", &SummaryStats::empty_runs)
      .def("csv_row", &summary_csv_row);

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("bo", &ComparisonReport::bo)
      .def_readonly("rs", &ComparisonReport::rs)
      .def_readonly("grad", &ComparisonReport::grad)
      .def_readonly("delta_median", &ComparisonReport::delta_median)
      .def_readonly("delta_mean", &ComparisonReport::delta_mean)
      .def_readonly("delta_std", &ComparisonReport::delta_std)
      .def_readonly("seed_protocol", &ComparisonReport::seed_protocol)
      .def("table", &comparison_table);

  m.def("summarize", &summarize, py::arg("results"), py::arg("method"));
  m.def("compare", &compare, py::arg("bo"), py::arg("rs"), py::arg("grad") = std::nullopt,
        py::arg("seed_protocol") = "");
  m.def("summary_csv_header", &summary_csv_header);

  py::class_<AppConfig>(m, "AppConfig")
      .def_readonly("tuner", &AppConfig::tuner)
      .def_readonly("asset_file", &AppConfig::asset_file)
      .def("baseline", &AppConfig::baseline);
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("source") = "<string>");
  m.def("load_config", &load_config, py::arg("path"));

  m.def("default_asset_dir", &default_asset_dir);
}
