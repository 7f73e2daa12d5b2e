// cbol: classifier-pruned Bayesian optimization of the synthetic latent linac.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>

#include "CLI11.hpp"
#include "cbol/baselines.hpp"
#include "cbol/config.hpp"
#include "cbol/reporting.hpp"
#include "cbol/synthetic_assets.hpp"
#include "cbol/synthetic_system.hpp"
#include "cbol/tuner.hpp"

namespace fs = std::filesystem;
using namespace cbol;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<int> runs;
  std::optional<double> xi;
  std::string out;

  void attach(CLI::App* app, const std::string& out_help) {
    app->add_option("--config", config, "TOML configuration file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "base seed; run r uses hash64(seed, r)");
    app->add_option("--iterations,-N", iterations, "evaluations per run");
    app->add_option("--runs", runs, "independent runs");
    app->add_option("--xi", xi, "EI exploration parameter");
    app->add_option("--out", out, out_help)->required();
  }

  AppConfig resolve() const {
    AppConfig cfg = config.empty() ? AppConfig{} : load_config(config);
    if (seed) cfg.tuner.seed = *seed;
    if (iterations) cfg.tuner.iterations = *iterations;
    if (runs) cfg.tuner.runs = *runs;
    if (xi) cfg.tuner.xi = *xi;
    cfg.tuner.validate();
    cfg.baseline().validate();
    return cfg;
  }
};

std::shared_ptr<const SyntheticSystem> load_system(const AppConfig& cfg) {
  return load_synthetic_system(cfg.asset_file.empty() ? default_system_asset() : fs::path(cfg.asset_file));
}

std::string run_file_name(int run_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%03d.jsonl", run_index);
  return buf;
}

void write_runs(const std::vector<RunResult>& runs, const SummaryStats& stats, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& r : runs) write_history_jsonl(r, dir / run_file_name(r.run_index));
  write_summary_csv({stats}, dir / "summary.csv");
}

SummaryStats run_method(const std::string& method, const AppConfig& cfg, const Evaluator& eval, const fs::path& dir) {
  std::vector<RunResult> runs;
  if (method == "bo") runs = multi_run(cfg.tuner, eval);
  else if (method == "rs") runs = multi_run_random_search(cfg.baseline(), eval);
  else runs = multi_run_gradient_search(cfg.baseline(), eval);
  SummaryStats stats = summarize(runs, method);
  write_runs(runs, stats, dir);
  return stats;
}

void print_summary(const SummaryStats& s) {
  std::cout << summary_csv_header() << "\n" << summary_csv_row(s) << "\n";
}

std::vector<RunResult> read_method_dir(const fs::path& dir) {
  static const std::regex pattern(R"(run_(\d+)\.jsonl)");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && std::regex_match(e.path().filename().string(), pattern)) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunResult> runs;
  for (const auto& f : files) {
    std::smatch m;
    const std::string name = f.filename().string();
    std::regex_match(name, m, pattern);
    runs.push_back(read_history_jsonl(f, std::stoi(m[1].str())));
  }
  return runs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classifier-pruned Bayesian optimization on a synthetic latent linac"};
  app.require_subcommand(1);

  CommonFlags tune_flags, rs_flags, grad_flags, cmp_flags, oracle_flags;
  auto* tune = app.add_subcommand("tune", "classifier-pruned Bayesian optimization");
  tune_flags.attach(tune, "output directory");
  auto* rs = app.add_subcommand("rs", "classifier-pruned random search");
  rs_flags.attach(rs, "output directory");
  auto* grad = app.add_subcommand("grad", "finite-difference Adam search");
  grad_flags.attach(grad, "output directory");
  auto* cmp = app.add_subcommand("compare", "run BO, RS and gradient search with paired seeds");
  cmp_flags.attach(cmp, "output directory");
  bool cmp_no_grad = false;
  cmp->add_flag("--no-grad", cmp_no_grad, "skip gradient search");

  auto* oracle = app.add_subcommand("oracle", "per-coordinate grid oracle for L*");
  oracle_flags.attach(oracle, "oracle file to write");
  int resolution = 10000;
  oracle->add_option("--resolution", resolution, "grid points per coordinate")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "rebuild summaries from saved run histories");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "directory holding bo/, rs/ and optionally grad/")
      ->required()
      ->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "output directory")->required();
  std::uint64_t report_seed = 1;
  report->add_option("--seed", report_seed, "base seed recorded in the report header");

  auto* assets = app.add_subcommand("assets", "regenerate the calibrated synthetic system and its oracle");
  std::uint64_t asset_seed = 42;
  std::string asset_out = default_asset_dir().string();
  int asset_resolution = 10000;
  assets->add_option("--seed", asset_seed, "seed of the synthetic constants");
  assets->add_option("--out", asset_out, "asset directory");
  assets->add_option("--resolution", asset_resolution, "oracle grid points per coordinate");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto single = [&](const std::string& method, const CommonFlags& flags) {
      const AppConfig cfg = flags.resolve();
      const auto sys = load_system(cfg);
      const Evaluator eval = make_evaluator(make_latent_system(sys), cfg.tuner.weights);
      print_summary(run_method(method, cfg, eval, flags.out));
    };
    if (*tune) single("bo", tune_flags);
    if (*rs) single("rs", rs_flags);
    if (*grad) single("grad", grad_flags);

    if (*cmp) {
      const AppConfig cfg = cmp_flags.resolve();
      const auto sys = load_system(cfg);
      const Evaluator eval = make_evaluator(make_latent_system(sys), cfg.tuner.weights);
      const fs::path out = cmp_flags.out;
      const SummaryStats bo = run_method("bo", cfg, eval, out / "bo");
      const SummaryStats r = run_method("rs", cfg, eval, out / "rs");
      std::optional<SummaryStats> g;
      if (!cmp_no_grad) g = run_method("grad", cfg, eval, out / "grad");
      const ComparisonReport rep =
          compare(bo, r, g, paired_seed_protocol(cfg.tuner.seed, cfg.tuner.runs, cfg.tuner.iterations));
      std::vector<SummaryStats> all{bo, r};
      if (g) all.push_back(*g);
      write_summary_csv(all, out / "summary.csv");
      write_comparison_csv(rep, out / "comparison.csv");
      const std::string table = comparison_table(rep);
      std::ofstream(out / "report.txt", std::ios::binary) << table;
      std::cout << table;
    }

    if (*oracle) {
      const AppConfig cfg = oracle_flags.resolve();
      const auto sys = load_system(cfg);
      const auto& c = sys->constants();
      const OracleResult o = run_oracle(make_latent_system(sys), cfg.tuner.bounds, c.manifold_center,
                                        c.manifold_radius, cfg.tuner.weights, resolution);
      save_oracle(o, oracle_flags.out);
      std::cout << "L* = " << format_number(o.l_star) << " at resolution " << o.resolution << "\nz* =";
      for (int d = 0; d < kLatentDim; ++d) std::cout << ' ' << format_number(o.z_star[d]);
      std::cout << "\n";
    }

    if (*report) {
      const fs::path in = report_in;
      const fs::path out = report_out;
      std::optional<SummaryStats> bo, r, g;
      if (fs::is_directory(in / "bo")) bo = summarize(read_method_dir(in / "bo"), "bo");
      if (fs::is_directory(in / "rs")) r = summarize(read_method_dir(in / "rs"), "rs");
      if (fs::is_directory(in / "grad")) g = summarize(read_method_dir(in / "grad"), "grad");
      if (!bo || !r) throw std::runtime_error("report: " + in.string() + " must contain bo/ and rs/ run histories");
      const ComparisonReport rep = compare(*bo, *r, g, paired_seed_protocol(report_seed, bo->runs, bo->iterations));
      std::vector<SummaryStats> all{*bo, *r};
      if (g) all.push_back(*g);
      write_summary_csv(all, out / "summary.csv");
      write_comparison_csv(rep, out / "comparison.csv");
      const std::string table = comparison_table(rep);
      std::ofstream(out / "report.txt", std::ios::binary) << table;
      std::cout << table;
    }

    if (*assets) {
      const fs::path dir = asset_out;
      SyntheticConstants c = generate_synthetic_constants(asset_seed);
      const CalibrationReport cal = calibrate(c);
      fs::create_directories(dir);
      save_synthetic_constants(c, dir / "synthetic_system.json");
      std::cout << "tau = " << format_number(cal.tau) << ", calibration agreement = " << format_number(cal.agreement)
                << " over " << cal.samples << " samples\n";
      auto sys = std::make_shared<const SyntheticSystem>(c);
      const LatentSystem ls = make_latent_system(sys);
      const OracleResult o =
          run_oracle(ls, c.bounds, c.manifold_center, c.manifold_radius, Weights::step(), asset_resolution);
      const OracleResult o2 =
          run_oracle(ls, c.bounds, c.manifold_center, c.manifold_radius, Weights::step(), 2 * asset_resolution);
      save_oracle(o, dir / "oracle.json");
      std::cout << "L* = " << format_number(o.l_star) << " (resolution " << o.resolution << "), "
                << format_number(o2.l_star) << " (resolution " << o2.resolution << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "cbol: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
