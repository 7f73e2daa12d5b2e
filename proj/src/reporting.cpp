#include "cbol/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cbol/objective.hpp"
#include "cbol/synthetic_assets.hpp"
#include "json.hpp"

namespace cbol {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> opt_delta(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

ordered_json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <typename Vec>
Vec json_vec(const json& a, Eigen::Index n, const char* what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n) {
    throw std::runtime_error(std::string("field '") + what + "' has the wrong length");
  }
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

SummaryStats summarize(const std::vector<RunResult>& results, const std::string& method) {
  if (results.empty()) throw std::invalid_argument("summarize: no runs");
  std::vector<const RunResult*> ordered;
  for (const auto& r : results) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const RunResult* a, const RunResult* b) { return a->run_index < b->run_index; });

  SummaryStats s;
  s.method = method;
  s.runs = static_cast<int>(results.size());
  s.iterations = static_cast<int>(ordered.front()->all_entries.size());
  std::size_t total = 0;
  std::size_t failed = 0;
  for (const RunResult* r : ordered) {
    total += r->all_entries.size();
    failed += r->all_entries.size() - r->pruned_indices.size();
    if (const HistoryEntry* best = r->best()) {
      s.per_run_best.push_back(best->total_loss);
    } else {
      ++s.empty_runs;
    }
  }
  s.pruned_fraction = total > 0 ? static_cast<double>(failed) / static_cast<double>(total) : 0.0;
  if (s.per_run_best.empty()) return s;

  std::vector<double> sorted = s.per_run_best;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = sorted[(n - 1) / 2];
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  s.mean = mean;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  s.std = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return s;
}

ComparisonReport compare(const SummaryStats& bo, const SummaryStats& rs, const std::optional<SummaryStats>& grad,
                         const std::string& seed_protocol) {
  const auto same_budget = [](const SummaryStats& a, const SummaryStats& b) {
    return a.runs == b.runs && a.iterations == b.iterations;
  };
  if (!same_budget(bo, rs) || (grad && !same_budget(bo, *grad))) {
    throw std::invalid_argument("compare: methods were run with different run counts or iteration budgets");
  }
  ComparisonReport r;
  r.bo = bo;
  r.rs = rs;
  r.grad = grad;
  r.delta_median = opt_delta(bo.median, rs.median);
  r.delta_mean = opt_delta(bo.mean, rs.mean);
  r.delta_std = opt_delta(bo.std, rs.std);
  r.seed_protocol = seed_protocol;
  return r;
}

std::string paired_seed_protocol(std::uint64_t base_seed, int runs, int iterations) {
  std::ostringstream os;
  os << "paired seeds: base_seed=" << base_seed << " runs=" << runs << " N=" << iterations
     << "; run r of every method uses seed hash64(base_seed, r)";
  return os.str();
}

OracleResult run_oracle(const LatentSystem& system, const BoundsBox& bounds, const LatentPoint& manifold_center,
                        double manifold_radius, const Weights& weights, int resolution) {
  bounds.validate();
  if (bounds.dim() != kLatentDim) throw std::invalid_argument("run_oracle: bounds must be 8-dimensional");
  if (resolution < 1) throw std::invalid_argument("run_oracle: resolution must be >= 1");
  const LatentPoint lo = (manifold_center.array() - manifold_radius).matrix().cwiseMax(bounds.lower);
  const LatentPoint hi = (manifold_center.array() + manifold_radius).matrix().cwiseMin(bounds.upper);
  if ((lo.array() > hi.array()).any()) throw std::invalid_argument("run_oracle: manifold does not meet the bounds");

  const LatentPoint base = manifold_center.cwiseMax(lo).cwiseMin(hi);
  OracleResult out;
  out.resolution = resolution;
  out.z_star = base;
  for (int d = 0; d < kLatentDim; ++d) {
    LatentPoint z = base;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < resolution; ++i) {
      if (resolution == 1) z[d] = 0.5 * (lo[d] + hi[d]);
      else if (i == resolution - 1) z[d] = hi[d];
      else z[d] = std::min(hi[d], lo[d] + (hi[d] - lo[d]) * i / (resolution - 1));
      const double loss = objective_loss(z, system, weights);
      if (loss < best) {
        best = loss;
        out.z_star[d] = z[d];
      }
    }
  }
  out.l_star = objective_loss(out.z_star, system, weights);
  return out;
}

void save_oracle(const OracleResult& oracle, const std::filesystem::path& path) {
  json p;
  json z = json::array();
  for (int d = 0; d < kLatentDim; ++d) z.push_back(oracle.z_star[d]);
  p["z_star"] = z;
  p["l_star"] = oracle.l_star;
  p["resolution"] = oracle.resolution;
  write_versioned_json(path, kOracleAssetKind, p.dump());
}

OracleResult load_oracle(const std::filesystem::path& path) {
  const json p = json::parse(read_versioned_json(path, kOracleAssetKind));
  OracleResult o;
  try {
    o.z_star = json_vec<LatentPoint>(p.at("z_star"), kLatentDim, "z_star");
    o.l_star = p.at("l_star").get<double>();
    o.resolution = p.at("resolution").get<int>();
  } catch (const AssetError&) {
    throw;
  } catch (const std::exception& e) {
    throw AssetError("oracle file " + path.string() + " does not match the schema: " + e.what());
  }
  return o;
}

void write_history_jsonl(const RunResult& run, const std::filesystem::path& path) {
  std::string text;
  for (const HistoryEntry& e : run.all_entries) {
    ordered_json j;
    j["iteration"] = e.iteration;
    j["z1"] = vec_json(e.z1);
    ordered_json traj = ordered_json::array();
    for (const auto& p : e.trajectory.points) traj.push_back(vec_json(p));
    j["trajectory"] = traj;
    j["settings"] = vec_json(e.settings);
    j["losses"] = vec_json(e.losses);
    j["total_loss"] = e.total_loss;
    j["passed_classifier"] = e.passed_classifier;
    text += j.dump();
    text += '\n';
  }
  write_text(path, text);
}

RunResult read_history_jsonl(const std::filesystem::path& path, int run_index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  RunResult run;
  run.run_index = run_index;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      Evaluation e;
      const LatentPoint z1 = json_vec<LatentPoint>(j.at("z1"), kLatentDim, "z1");
      const json& traj = j.at("trajectory");
      if (!traj.is_array() || traj.size() != static_cast<std::size_t>(kModules)) {
        throw std::runtime_error("trajectory must hold 48 points");
      }
      for (std::size_t m = 0; m < traj.size(); ++m) e.trajectory.points[m] = json_vec<LatentPoint>(traj[m], kLatentDim, "trajectory");
      e.settings = json_vec<Settings>(j.at("settings"), kSettingsDim, "settings");
      e.losses = json_vec<Eigen::VectorXd>(j.at("losses"), kModules, "losses");
      e.total_loss = j.at("total_loss").get<double>();
      e.passed_classifier = j.at("passed_classifier").get<bool>();
      run.record(z1, std::move(e));
      if (j.at("iteration").get<int>() != run.all_entries.back().iteration) {
        throw std::runtime_error("iteration numbers are not consecutive from 0");
      }
    } catch (const std::exception& ex) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return run;
}

std::string summary_csv_header() { return "method,runs,N,median,mean,std,min,max,pruned_fraction,empty_runs"; }

std::string summary_csv_row(const SummaryStats& s) {
  std::ostringstream os;
  os << s.method << ',' << s.runs << ',' << s.iterations << ',' << opt_number(s.median) << ',' << opt_number(s.mean)
     << ',' << opt_number(s.std) << ',' << opt_number(s.min) << ',' << opt_number(s.max) << ','
     << format_number(s.pruned_fraction) << ',' << s.empty_runs;
  return os.str();
}

void write_summary_csv(const std::vector<SummaryStats>& stats, const std::filesystem::path& path) {
  std::string text = summary_csv_header() + "\n";
  for (const auto& s : stats) text += summary_csv_row(s) + "\n";
  write_text(path, text);
}

void write_comparison_csv(const ComparisonReport& r, const std::filesystem::path& path) {
  std::string text = "# " + r.seed_protocol + "\n" + summary_csv_header() + "\n";
  text += summary_csv_row(r.bo) + "\n" + summary_csv_row(r.rs) + "\n";
  if (r.grad) text += summary_csv_row(*r.grad) + "\n";
  text += "\ndelta,bo_minus_rs\n";
  text += "median," + opt_number(r.delta_median) + "\n";
  text += "mean," + opt_number(r.delta_mean) + "\n";
  text += "std," + opt_number(r.delta_std) + "\n";
  write_text(path, text);
}

std::string comparison_table(const ComparisonReport& r) {
  std::vector<const SummaryStats*> rows{&r.bo, &r.rs};
  if (r.grad) rows.push_back(&*r.grad);
  const auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("-"); };
  std::ostringstream os;
  os << r.seed_protocol << "\n\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s %5s %6s %14s %14s %14s %14s %14s %8s %6s\n", "method", "runs", "N",
                "median", "mean", "std", "min", "max", "pruned", "empty");
  os << line;
  for (const SummaryStats* s : rows) {
    std::snprintf(line, sizeof(line), "%-8s %5d %6d %14s %14s %14s %14s %14s %8.4f %6d\n", s->method.c_str(), s->runs,
                  s->iterations, cell(s->median).c_str(), cell(s->mean).c_str(), cell(s->std).c_str(),
                  cell(s->min).c_str(), cell(s->max).c_str(), s->pruned_fraction, s->empty_runs);
    os << line;
  }
  os << "\nBO - RS: median " << cell(r.delta_median) << ", mean " << cell(r.delta_mean) << ", std "
     << cell(r.delta_std) << "\n";
  return os.str();
}

}  // namespace cbol
