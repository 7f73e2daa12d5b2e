#include "cbol/synthetic_system.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cbol/rng.hpp"

namespace cbol {

namespace {

constexpr double kScaleFloor = 1e-3;
constexpr int kEnclosureGrid = 41;
constexpr double kLaterModuleSlack = 1.05;
constexpr double kBarcodeOn = 0.8;
constexpr double kBarcodeOff = 0.05;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double signed_uniform(SeededRng& rng, double lo, double hi) {
  const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  return sign * rng.uniform(lo, hi);
}

// Pixel regions: 0 interior, 1..4 border segments, 5..10 barcode blocks.
int region_of(int row, int col, int grid, int frame) {
  const int far = grid - frame;
  if (row >= frame && row < far && col >= frame && col < far) return 0;
  if (row < far) {
    if (col < frame) return 1;
    if (col >= far) return 3;
    return 2;
  }
  if (col < frame + 1 || col >= far - 1) return 4;
  const int block = (grid - 2 * frame - 2) / kBarcodeBits;
  return 5 + (col - frame - 1) / block;
}

double pattern_value(const SyntheticConstants& c, int module, int row, int col) {
  const double phase = c.pattern(module - 1, 0);
  const double freq = c.pattern(module - 1, 1);
  return 0.8 + 0.2 * std::cos(phase + freq * (row + 2.0 * col) * 2.0 * std::numbers::pi / c.grid);
}

}  // namespace

double TransmissionProfile::operator()(double x) const {
  const double u = x - center;
  double q = -curvature * u * u - offset;
  if (bump_height != 0.0) {
    const double v = (x - bump_center) / bump_width;
    q += bump_height * std::exp(-0.5 * v * v);
  }
  return q;
}

SyntheticConstants generate_synthetic_constants(std::uint64_t seed) {
  SyntheticConstants c;
  c.seed = seed;
  SeededRng rng(seed);

  LatentMatrix a;
  for (int i = 0; i < kLatentDim; ++i) {
    for (int j = 0; j < kLatentDim; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  }
  const double radius = Eigen::EigenSolver<LatentMatrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
  c.transition = a * (0.9 / radius);
  for (int i = 0; i < kLatentDim; ++i) c.bias[i] = rng.uniform(-0.1, 0.1);
  for (int i = 0; i < kLatentDim; ++i) {
    for (int j = 0; j < kLatentDim; ++j) c.estimator_map(i, j) = rng.uniform(-0.3, 0.3);
  }

  const double mid = 0.5 * (c.grid - 1);
  c.blob_maps.resize(static_cast<std::size_t>(kModules * kProjections));
  for (auto& b : c.blob_maps) {
    b.center_x0 = mid + rng.uniform(-1.0, 1.0);
    b.center_x_gain = signed_uniform(rng, 2.5, 3.5);
    b.center_y0 = mid + rng.uniform(-1.0, 1.0);
    b.center_y_gain = signed_uniform(rng, 2.5, 3.5);
    b.log_width_x0 = std::log(1.7) + rng.uniform(-0.05, 0.05);
    b.log_width_x_gain = signed_uniform(rng, 0.2, 0.3);
    b.log_width_y0 = std::log(1.7) + rng.uniform(-0.05, 0.05);
    b.log_width_y_gain = signed_uniform(rng, 0.2, 0.3);
  }
  for (auto& m : c.projection_mass) m = 5.0 * rng.uniform(0.6, 1.0);
  c.frame_gain.resize(kModules, kFrameSegments);
  for (int m = 0; m < kModules; ++m) {
    for (int s = 0; s < kFrameSegments; ++s) c.frame_gain(m, s) = signed_uniform(rng, 2.0, 3.0);
  }
  c.pattern.resize(kModules, 2);
  for (int m = 0; m < kModules; ++m) {
    c.pattern(m, 0) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    c.pattern(m, 1) = rng.uniform(1.0, 3.0);
  }

  // Hand-placed landscape. Coordinate 0 peaks outside the manifold (upper
  // manifold edge is 0.3); every other coordinate peaks inside it and has a
  // narrow secondary bump at 0.75 that traps local search from above. Bump
  // tops stay below the main peak so the offsets come from the centers.
  const std::array<double, kLatentDim> centers{0.45, -0.45, -0.3, -0.55, -0.3, -0.25, -0.6, -0.35};
  const std::array<double, kLatentDim> curvatures{0.3, 0.24, 0.21, 0.27, 0.18, 0.24, 0.21, 0.27};
  for (int d = 0; d < kLatentDim; ++d) {
    auto& t = c.transmission[static_cast<std::size_t>(d)];
    t.center = centers[static_cast<std::size_t>(d)];
    t.curvature = curvatures[static_cast<std::size_t>(d)];
    t.bump_center = 0.75;
    t.bump_width = 0.1;
    const double drop = t.curvature * (t.bump_center - t.center) * (t.bump_center - t.center);
    t.bump_height = d == 0 ? 0.0 : 0.6 * drop;
  }
  return c;
}

SyntheticSystem::SyntheticSystem(SyntheticConstants constants) : constants_(std::move(constants)) {
  const auto& c = constants_;
  if (c.grid < 2 * c.frame + 2 + kBarcodeBits || (c.grid - 2 * c.frame - 2) % kBarcodeBits != 0) {
    throw std::invalid_argument("synthetic system: grid size incompatible with border and barcode layout");
  }
  if (c.blob_maps.size() != static_cast<std::size_t>(kModules * kProjections)) {
    throw std::invalid_argument("synthetic system: expected one blob map per module and projection");
  }
  if (c.frame_gain.rows() != kModules || c.frame_gain.cols() != kFrameSegments || c.pattern.rows() != kModules ||
      c.pattern.cols() != 2) {
    throw std::invalid_argument("synthetic system: background tables have the wrong shape");
  }
  c.bounds.validate();
  if (!(c.manifold_radius > 0.0)) throw std::invalid_argument("synthetic system: manifold radius must be positive");
}

LatentTrajectory SyntheticSystem::forecast(const LatentPoint& z1) const {
  require_finite(z1, "forecast input");
  LatentTrajectory traj;
  traj.points[0] = z1;
  for (std::size_t t = 1; t < traj.points.size(); ++t) {
    traj.points[t] = (constants_.transition * traj.points[t - 1] + constants_.bias).array().tanh().matrix();
  }
  return traj;
}

double SyntheticSystem::log_transmission(const LatentPoint& z1) const {
  double q = 0.0;
  for (int d = 0; d < kLatentDim; ++d) q += constants_.transmission[static_cast<std::size_t>(d)](z1[d]);
  return q;
}

double SyntheticSystem::beam_intensity(const LatentPoint& z1, int module, int projection) const {
  const double rho = static_cast<double>(module - 1) / (kModules - 1);
  return constants_.projection_mass.at(static_cast<std::size_t>(projection - 1)) * std::exp(rho * log_transmission(z1));
}

BeamState SyntheticSystem::decode_module(const LatentTrajectory& trajectory, int module) const {
  if (module < 1 || module > kModules) throw std::out_of_range("decode_module: module out of range");
  const auto& c = constants_;
  const int grid = c.grid;
  const int lo = c.frame;
  const int hi = grid - c.frame;
  const LatentPoint& z = trajectory.module(module);
  const double transmission_exponent = static_cast<double>(module - 1) / (kModules - 1) *
                                       log_transmission(trajectory.initial());

  std::array<double, kFrameSegments> level{};
  for (int s = 0; s < kFrameSegments; ++s) level[static_cast<std::size_t>(s)] =
      0.1 + 0.7 * sigmoid(c.frame_gain(module - 1, s) * z[4 + s]);

  Image background = Image::Zero(grid, grid);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const int r = region_of(i, j, grid, c.frame);
      if (r >= 1 && r <= 4) {
        background(i, j) = level[static_cast<std::size_t>(r - 1)] * pattern_value(c, module, i, j);
      } else if (r >= 5) {
        background(i, j) = ((module >> (r - 5)) & 1) ? kBarcodeOn : kBarcodeOff;
      }
    }
  }

  BeamState state;
  state.module = module;
  Eigen::VectorXd gx(grid);
  Eigen::VectorXd gy(grid);
  for (int k = 1; k <= kProjections; ++k) {
    const BlobMap& b = c.blob(module, k);
    const double cx = b.center_x0 + b.center_x_gain * z[0];
    const double cy = b.center_y0 + b.center_y_gain * z[1];
    const double sx = std::exp(b.log_width_x0 + b.log_width_x_gain * z[2]);
    const double sy = std::exp(b.log_width_y0 + b.log_width_y_gain * z[3]);
    gx.setZero();
    gy.setZero();
    for (int p = lo; p < hi; ++p) {
      const double u = (p - cx) / sx;
      const double v = (p - cy) / sy;
      gx[p] = std::exp(-0.5 * u * u);
      gy[p] = std::exp(-0.5 * v * v);
    }
    const double mass = c.projection_mass[static_cast<std::size_t>(k - 1)] * std::exp(transmission_exponent);
    const double norm = gx.sum() * gy.sum();
    Image img = k == kLossProjection ? Image::Zero(grid, grid) : background;
    if (norm > 0.0) {
      const double scale = mass / norm;
      for (int i = lo; i < hi; ++i) {
        for (int j = lo; j < hi; ++j) img(i, j) = std::min(1.0, scale * gy[i] * gx[j]);
      }
    }
    state.projections[static_cast<std::size_t>(k - 1)] = std::move(img);
  }
  return state;
}

Settings SyntheticSystem::estimate(const LatentTrajectory& trajectory) const {
  return (constants_.estimator_map * trajectory.initial()).cwiseMax(-0.5).cwiseMin(0.5);
}

Eigen::VectorXd SyntheticSystem::features(const BeamState& state) const {
  const int grid = constants_.grid;
  const int frame = constants_.frame;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(kFeatureCount);
  for (int k = 0; k < kProjections; ++k) {
    const Image& img = state.projections[static_cast<std::size_t>(k)];
    if (img.rows() != grid || img.cols() != grid) throw std::invalid_argument("classify: unexpected image size");
    std::array<double, 5 + kBarcodeBits> sums{};
    std::array<int, 5 + kBarcodeBits> counts{};
    double m0 = 0, mx = 0, my = 0, mxx = 0, myy = 0;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const double p = img(i, j);
        const int r = region_of(i, j, grid, frame);
        sums[static_cast<std::size_t>(r)] += p;
        counts[static_cast<std::size_t>(r)] += 1;
        if (r == 0) {
          m0 += p;
          mx += p * j;
          my += p * i;
          mxx += p * j * j;
          myy += p * i * i;
        }
      }
    }
    const int base = k * kFeaturesPerProjection;
    if (m0 > 1e-12) {
      const double cx = mx / m0;
      const double cy = my / m0;
      f[base + 0] = cx;
      f[base + 1] = cy;
      f[base + 2] = std::sqrt(std::max(mxx / m0 - cx * cx, 0.0));
      f[base + 3] = std::sqrt(std::max(myy / m0 - cy * cy, 0.0));
    }
    for (std::size_t r = 1; r < sums.size(); ++r) {
      f[base + 3 + static_cast<int>(r)] = counts[r] > 0 ? sums[r] / counts[r] : 0.0;
    }
  }
  return f;
}

double SyntheticSystem::prototype_distance(const Eigen::VectorXd& features, int module) const {
  const auto center = constants_.prototype_center.row(module - 1);
  const auto scale = constants_.prototype_scale.row(module - 1);
  double d = 0.0;
  for (int f = 0; f < kFeatureCount; ++f) d = std::max(d, std::abs(features[f] - center[f]) / scale[f]);
  return d;
}

ClassLabel SyntheticSystem::classify(const BeamState& state) const {
  if (constants_.prototype_center.rows() != kModules) throw StateError("synthetic classifier is not calibrated");
  const Eigen::VectorXd f = features(state);
  int best_module = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= kModules; ++m) {
    const double d = prototype_distance(f, m);
    if (d < best) {
      best = d;
      best_module = m;
    }
  }
  return best <= constants_.tau ? ClassLabel::of_module(best_module) : ClassLabel::non_physical();
}

bool SyntheticSystem::in_manifold(const LatentPoint& z1) const {
  return constants_.bounds.contains(z1) &&
         (z1 - constants_.manifold_center).cwiseAbs().maxCoeff() <= constants_.manifold_radius;
}

LatentSystem make_latent_system(std::shared_ptr<const SyntheticSystem> system) {
  LatentSystem ls;
  ls.forecaster = system;
  ls.decoder = system;
  ls.estimator = system;
  ls.classifier = system;
  ls.reference_intensity = system->constants().reference_intensity;
  return ls;
}

namespace {

// Largest own-module prototype distance along the decoded trajectory, or
// +inf when some module's nearest prototype is another module.
double trajectory_score(const SyntheticSystem& sys, const LatentPoint& z1) {
  const LatentTrajectory traj = sys.forecast(z1);
  double score = 0.0;
  for (int m = 1; m <= kModules; ++m) {
    const Eigen::VectorXd f = sys.features(sys.decode_module(traj, m));
    const double own = sys.prototype_distance(f, m);
    for (int other = 1; other <= kModules; ++other) {
      if (other != m && sys.prototype_distance(f, other) <= own) return std::numeric_limits<double>::infinity();
    }
    score = std::max(score, own);
  }
  return score;
}

}  // namespace

CalibrationReport calibrate(SyntheticConstants& c, int samples_per_class) {
  // Per-coordinate maxima of the transmission profiles over the bounds.
  constexpr int kGrid = 200001;
  for (int d = 0; d < kLatentDim; ++d) {
    auto& t = c.transmission[static_cast<std::size_t>(d)];
    t.offset = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
      const double x = c.bounds.lower[d] + (c.bounds.upper[d] - c.bounds.lower[d]) * i / (kGrid - 1);
      best = std::max(best, t(x));
    }
    t.offset = best;
  }
  c.reference_intensity = c.projection_mass[kLossProjection - 1];

  // Prototype boxes from the 2^8 manifold vertices.
  c.prototype_center.resize(0, 0);
  SyntheticSystem probe(c);
  Eigen::MatrixXd lo = Eigen::MatrixXd::Constant(kModules, kFeatureCount, std::numeric_limits<double>::infinity());
  Eigen::MatrixXd hi = -lo;
  const int vertices = 1 << kLatentDim;
  for (int v = 0; v < vertices; ++v) {
    LatentPoint z;
    for (int d = 0; d < kLatentDim; ++d)
      z[d] = c.manifold_center[d] + ((v >> d) & 1 ? c.manifold_radius : -c.manifold_radius);
    const Eigen::VectorXd f = probe.features(probe.decode_module(probe.forecast(z), 1));
    lo.row(0) = lo.row(0).cwiseMin(f.transpose());
    hi.row(0) = hi.row(0).cwiseMax(f.transpose());
  }
  // Later modules: interval enclosure of the forecaster image of M, then a
  // grid over it. Centroid and spread of x depend on (z0, z2), of y on
  // (z1, z3), and segment means are monotone in z4..z7, so one lockstep 2-D
  // grid covers every feature.
  LatentPoint zl = (c.manifold_center.array() - c.manifold_radius).matrix();
  LatentPoint zu = (c.manifold_center.array() + c.manifold_radius).matrix();
  LatentTrajectory probe_traj;
  probe_traj.points.fill(c.manifold_center);
  for (int m = 2; m <= kModules; ++m) {
    LatentPoint nl;
    LatentPoint nu;
    for (int i = 0; i < kLatentDim; ++i) {
      double sl = c.bias[i];
      double su = c.bias[i];
      for (int j = 0; j < kLatentDim; ++j) {
        const double a = c.transition(i, j) * zl[j];
        const double b = c.transition(i, j) * zu[j];
        sl += std::min(a, b);
        su += std::max(a, b);
      }
      nl[i] = std::tanh(sl);
      nu[i] = std::tanh(su);
    }
    zl = nl;
    zu = nu;
    for (int a = 0; a < kEnclosureGrid; ++a) {
      for (int b = 0; b < kEnclosureGrid; ++b) {
        const double s = static_cast<double>(a) / (kEnclosureGrid - 1);
        const double t = static_cast<double>(b) / (kEnclosureGrid - 1);
        LatentPoint z;
        for (int d : {0, 1, 4, 5, 6, 7}) z[d] = zl[d] + s * (zu[d] - zl[d]);
        for (int d : {2, 3}) z[d] = zl[d] + t * (zu[d] - zl[d]);
        probe_traj.points[static_cast<std::size_t>(m - 1)] = z;
        const Eigen::VectorXd f = probe.features(probe.decode_module(probe_traj, m));
        lo.row(m - 1) = lo.row(m - 1).cwiseMin(f.transpose());
        hi.row(m - 1) = hi.row(m - 1).cwiseMax(f.transpose());
      }
    }
  }
  c.prototype_center = 0.5 * (lo + hi);
  // The relative pad keeps boundary points of M (distance exactly 1) from
  // failing on rounding.
  c.prototype_scale = (0.5 * (hi - lo) * (1.0 + 1e-9)).cwiseMax(kScaleFloor);
  // Slack on the later boxes covers spread extremes that fall between grid
  // nodes.
  c.prototype_scale.bottomRows(kModules - 1) *= kLaterModuleSlack;

  // Threshold sweep on a calibration set drawn from its own stream.
  const SyntheticSystem sys(c);
  SeededRng rng(hash64(c.seed, 0xCA11B8A7ULL));
  const BoundsBox manifold_box(
      (c.manifold_center.array() - c.manifold_radius).matrix().cwiseMax(c.bounds.lower),
      (c.manifold_center.array() + c.manifold_radius).matrix().cwiseMin(c.bounds.upper));
  std::vector<double> inside;
  std::vector<double> outside;
  while (static_cast<int>(inside.size()) < samples_per_class) {
    const LatentPoint z = rng.uniform_in(manifold_box);
    inside.push_back(trajectory_score(sys, z));
  }
  while (static_cast<int>(outside.size()) < samples_per_class) {
    const LatentPoint z = rng.uniform_in(c.bounds);
    if (sys.in_manifold(z)) continue;
    outside.push_back(trajectory_score(sys, z));
  }

  CalibrationReport report;
  report.samples = 2 * samples_per_class;
  for (int step = 0; step <= 2000; ++step) {
    const double tau = 1.0 + 0.0005 * step;
    const auto accepted_inside = std::count_if(inside.begin(), inside.end(), [&](double s) { return s <= tau; });
    const auto rejected_outside = std::count_if(outside.begin(), outside.end(), [&](double s) { return s > tau; });
    const double agreement = static_cast<double>(accepted_inside + rejected_outside) / report.samples;
    if (agreement > report.agreement) {
      report.agreement = agreement;
      report.tau = tau;
    }
  }
  c.tau = report.tau;
  return report;
}

}  // namespace cbol
