#include "leastgrad/suites.hpp"

#include <algorithm>
#include <cmath>

#include "leastgrad/io.hpp"
#include "leastgrad/rng.hpp"

namespace lg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string fmt(double v) { return format_double(v); }

ScalarField random_field(Rng& rng, const GridPtr& grid, double lo = -1.0, double hi = 1.0) {
  ScalarField f(grid);
  for (int c = 0; c < grid->cell_count(); ++c)
    if (grid->mask[c]) f[c] = rng.uniform(lo, hi);
  return f;
}

VectorField random_vector(Rng& rng, const GridPtr& grid) {
  VectorField p(grid);
  const Grid& g = *grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      if (g.interior(i + 1, j)) p.x[c] = rng.uniform(-1.0, 1.0);
      if (g.interior(i, j + 1)) p.y[c] = rng.uniform(-1.0, 1.0);
    }
  return p;
}

/// Piecewise-constant field with axis-aligned level boundaries: a staircase
/// along a random axis with up to `levels` random plateau values.
ScalarField random_staircase(Rng& rng, const GridPtr& grid, int levels) {
  const Grid& g = *grid;
  const bool along_x = rng.uniform() < 0.5;
  const int extent = along_x ? g.nx : g.ny;
  const int k = std::max(2, rng.uniform_int(2, levels));
  std::vector<int> breaks;  // strictly increasing interior break positions
  for (int t = 0; t < k - 1; ++t) breaks.push_back(rng.uniform_int(1, extent - 1));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> vals;
  for (std::size_t t = 0; t <= breaks.size(); ++t) vals.push_back(rng.uniform(-2.0, 2.0));

  ScalarField f(grid);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      const int pos = along_x ? i : j;
      std::size_t seg = 0;
      while (seg < breaks.size() && pos >= breaks[seg]) ++seg;
      f[c] = vals[seg];
    }
  return f;
}

FinslerMetric random_isotropic_metric(Rng& rng, const GridPtr& grid) {
  ScalarField a(grid, 1.0);
  double amin = 1e300;
  for (int c = 0; c < grid->cell_count(); ++c) {
    if (!grid->mask[c]) continue;
    a[c] = rng.uniform(0.2, 2.0);
    amin = std::min(amin, a[c]);
  }
  return make_isotropic_metric(std::move(a), amin);
}

FinslerMetric random_riemannian_metric(Rng& rng, const GridPtr& grid) {
  const auto n = static_cast<std::size_t>(grid->cell_count());
  ScalarField a(grid, 1.0);
  std::vector<double> s11(n, 1.0), s12(n, 0.0), s22(n, 1.0);
  double amin = 1e300;
  for (int c = 0; c < grid->cell_count(); ++c) {
    if (!grid->mask[c]) continue;
    a[c] = rng.uniform(0.2, 2.0);
    amin = std::min(amin, a[c]);
    const double ang = rng.uniform(0.0, kTwoPi);
    const double l1 = rng.uniform(0.5, 2.0);
    const double l2 = rng.uniform(0.5, 2.0);
    const double co = std::cos(ang), si = std::sin(ang);
    s11[c] = co * co * l1 + si * si * l2;
    s22[c] = si * si * l1 + co * co * l2;
    s12[c] = co * si * (l1 - l2);
  }
  return make_riemannian_metric(std::move(a), std::move(s11), std::move(s12), std::move(s22),
                                amin);
}

CellSet random_cellset(Rng& rng, const GridPtr& grid) {
  CellSet s(grid);
  // Union of a few random rectangles plus salt for irregular boundaries.
  const Grid& g = *grid;
  const int rects = rng.uniform_int(1, 3);
  for (int t = 0; t < rects; ++t) {
    int i0 = rng.uniform_int(0, g.nx - 1), i1 = rng.uniform_int(0, g.nx - 1);
    int j0 = rng.uniform_int(0, g.ny - 1), j1 = rng.uniform_int(0, g.ny - 1);
    if (i0 > i1) std::swap(i0, i1);
    if (j0 > j1) std::swap(j0, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (g.mask[g.idx(i, j)]) s.in[g.idx(i, j)] = 1;
  }
  for (int t = 0; t < g.cell_count() / 16; ++t) {
    const int c = rng.uniform_int(0, g.cell_count() - 1);
    if (g.mask[c]) s.in[c] ^= 1;
  }
  return s;
}

}  // namespace

GridPtr make_disk_grid(int n, double radius) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  const double h = 1.0 / n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) * h - 0.5;
      const double y = (j + 0.5) * h - 0.5;
      if (x * x + y * y <= radius * radius) mask[static_cast<std::size_t>(j) * n + i] = 1;
    }
  return make_grid(n, n, h, {0.0, 0.0}, std::move(mask));
}

FinslerMetric make_sine_weight_metric(const GridPtr& grid) {
  ScalarField a(grid, 1.0);
  double amin = 1e300;
  const Grid& g = *grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      a[c] = 1.0 + 0.5 * std::sin(kTwoPi * g.cx(i)) * std::sin(kTwoPi * g.cy(j));
      amin = std::min(amin, a[c]);
    }
  return make_isotropic_metric(std::move(a), amin);
}

OrderedTracePair random_ordered_pair(Rng& rng, const GridPtr& grid) {
  const auto faces = boundary_faces(*grid);
  double c0 = rng.uniform(-0.5, 0.5);
  double ak[3], bk[3], pk[3], qk[3];
  for (int k = 0; k < 3; ++k) {
    ak[k] = rng.uniform(-0.3, 0.3) / (k + 1);
    bk[k] = rng.uniform(-0.3, 0.3) / (k + 1);
    pk[k] = rng.uniform(-0.4, 0.4);
    qk[k] = rng.uniform(-0.4, 0.4);
  }
  OrderedTracePair pair;
  pair.g1.grid = grid;
  pair.g2.grid = grid;
  pair.g1.g.resize(faces.size());
  pair.g2.g.resize(faces.size());
  const Grid& g = *grid;
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto p = faces[k].center(g);
    const double th = std::atan2(p[1] - 0.5, p[0] - 0.5);
    double v = c0, s = 0.0;
    for (int m = 0; m < 3; ++m) {
      v += ak[m] * std::cos((m + 1) * th) + bk[m] * std::sin((m + 1) * th);
      s += pk[m] * std::cos((m + 1) * th) + qk[m] * std::sin((m + 1) * th);
    }
    const double delta = 0.02 + s * s;
    pair.g1.g[k] = v;
    pair.g2.g[k] = v + delta;
    pair.sup_gap = std::max(pair.sup_gap, delta);
  }
  return pair;
}

SolverConfig suite_solver_config() {
  SolverConfig cfg;
  cfg.tol = 1e-6;
  cfg.max_iters = 12000;
  cfg.check_every = 25;
  return cfg;
}

ComparisonStudy run_comparison_study(std::uint64_t seed, int pairs, int n,
                                     const SolverConfig& cfg) {
  Rng rng(seed);
  GridPtr grid = make_disk_grid(n);
  FinslerMetric m = make_sine_weight_metric(grid);
  ComparisonStudy study;
  study.worst_violation = -1e300;
  study.worst_stability = -1e300;
  for (int t = 0; t < pairs; ++t) {
    const OrderedTracePair pair = random_ordered_pair(rng, grid);
    const ComparisonResult res = comparison_probe(m, pair.g1, pair.g2, cfg);
    study.violations.push_back(res.comparison_violation);
    study.stability_margins.push_back(res.stability_margin);
    study.worst_violation = std::max(study.worst_violation, res.comparison_violation);
    study.worst_stability = std::max(study.worst_stability, res.stability_margin);
  }

  // Constant-shift pair: identical problem translated by 0.3.
  Rng rng2(seed);
  const OrderedTracePair base = random_ordered_pair(rng2, grid);
  BoundaryData shifted;
  shifted.grid = grid;
  shifted.g = base.g1.g;
  for (double& v : shifted.g) v += 0.3;
  auto [u1, r1] = solve_least_gradient(m, base.g1, cfg);
  auto [u2, r2] = solve_least_gradient(m, shifted, cfg);
  double err = 0.0;
  for (int c = 0; c < grid->cell_count(); ++c)
    if (grid->mask[c]) err = std::max(err, std::abs(u2[c] - u1[c] - 0.3));
  study.shift_error = err;
  return study;
}

CalibrationStudy run_calibration_study(double theta, const std::vector<int>& sizes, double lens_h,
                                       bool run_solver, const SolverConfig& cfg) {
  CalibrationStudy study;
  study.sizes = sizes;
  Counterexample ce(theta);
  for (int n : sizes) {
    GridPtr grid = counterexample_grid_square(n);
    auto [a, J] = counterexample_fields(ce, grid);
    ScalarField u = counterexample_family(ce, 0.5, grid);
    study.residuals.push_back(calibration_residual(a, J, u));
  }

  GridPtr lens = counterexample_grid_lens(lens_h);
  const std::vector<double> sigmas{0.0, 0.5, 1.0};
  if (run_solver) {
    study.table = nonuniqueness_demo(ce, lens, sigmas, cfg);
  } else {
    // Objective table without the solve (the demo's evaluation half).
    auto [a, J] = counterexample_fields(ce, lens);
    (void)J;
    const auto faces = boundary_faces(*lens);
    BoundaryData bd;
    bd.grid = lens;
    bd.g.resize(faces.size());
    for (std::size_t k = 0; k < faces.size(); ++k) {
      const auto p = faces[k].center(*lens);
      bd.g[k] = ce.family_value(0.0, p[0], p[1]);
    }
    double amin = 1e300;
    for (int c = 0; c < lens->cell_count(); ++c) amin = std::min(amin, a[c]);
    FinslerMetric m = make_isotropic_metric(a, amin);
    study.table.sigmas = sigmas;
    for (double s : sigmas) {
      ScalarField u = counterexample_family(ce, s, lens);
      study.table.objectives.push_back(relaxed_energy(m, u, bd));
    }
    const auto [mn, mx] =
        std::minmax_element(study.table.objectives.begin(), study.table.objectives.end());
    study.table.max_pairwise_gap = *mx - *mn;
  }

  double mean = 0.0;
  for (double o : study.table.objectives) mean += o;
  mean /= static_cast<double>(study.table.objectives.size());
  study.equality_tolerance = 1e-3 * mean;

  // Negative control: +10% weight inside the lens.
  {
    auto [a, J] = counterexample_fields(ce, lens);
    (void)J;
    ScalarField ap = lens_perturbed_weight(ce, a, 1.1);
    const auto faces = boundary_faces(*lens);
    BoundaryData bd;
    bd.grid = lens;
    bd.g.resize(faces.size());
    for (std::size_t k = 0; k < faces.size(); ++k) {
      const auto p = faces[k].center(*lens);
      bd.g[k] = ce.family_value(0.0, p[0], p[1]);
    }
    double amin = 1e300;
    for (int c = 0; c < lens->cell_count(); ++c) amin = std::min(amin, ap[c]);
    FinslerMetric mp = make_isotropic_metric(std::move(ap), amin);
    double lo = 1e300, hi = -1e300;
    for (double s : {0.0, 0.5, 1.0}) {
      ScalarField u = counterexample_family(ce, s, lens);
      const double obj = relaxed_energy(mp, u, bd);
      lo = std::min(lo, obj);
      hi = std::max(hi, obj);
    }
    study.perturbed_gap = hi - lo;
  }
  return study;
}

bool SuiteReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string SuiteReport::render() const {
  std::string out = "suite: " + suite + "\nseed: " + std::to_string(seed) + "\n";
  for (const auto& c : checks)
    out += std::string(c.pass ? "[PASS] " : "[FAIL] ") + c.label + " (" + c.detail + ")\n";
  out += std::string("result: ") + (pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

std::vector<std::string> suite_names() {
  return {"adjointness", "coarea", "submodularity", "comparison", "stability", "calibration"};
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = name;
  rep.seed = seed;
  Rng rng(seed);

  if (name == "adjointness") {
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      GridPtr grid = (t % 4 == 3) ? make_disk_grid(64) : make_full_grid(64, 64, 1.0 / 64);
      ScalarField u = random_field(rng, grid);
      VectorField p = random_vector(rng, grid);
      const VectorField gu = gradient(u);
      const ScalarField dp = divergence(p);
      const double mismatch = std::abs(dot(gu, p) + dot(u, dp));
      const double scale = std::sqrt(dot(u, u)) * std::sqrt(dot(p, p));
      worst = std::max(worst, mismatch / (scale > 0.0 ? scale : 1.0));
    }
    rep.checks.push_back({"adjointness <= 1e-12 relative on 100 random 64^2 field pairs",
                          worst <= 1e-12, "worst = " + fmt(worst)});
    return rep;
  }

  if (name == "coarea") {
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      GridPtr grid = make_full_grid(64, 64, 1.0 / 64);
      const FinslerMetric m =
          (t % 2 == 0) ? random_isotropic_metric(rng, grid) : random_riemannian_metric(rng, grid);
      ScalarField u = random_staircase(rng, grid, 16);
      worst = std::max(worst, coarea_residual(m, u));
    }
    rep.checks.push_back(
        {"coarea residual <= 1e-12 on 100 random staircase fields (<= 16 levels), both metric "
         "families",
         worst <= 1e-12, "worst = " + fmt(worst)});
    return rep;
  }

  if (name == "submodularity") {
    double worst = 1e300;
    for (int t = 0; t < 1000; ++t) {
      GridPtr grid = make_full_grid(32, 32, 1.0 / 32);
      const FinslerMetric m = random_isotropic_metric(rng, grid);
      const CellSet e1 = random_cellset(rng, grid);
      const CellSet e2 = random_cellset(rng, grid);
      worst = std::min(worst, submodularity_margin(m, e1, e2));
    }
    rep.checks.push_back(
        {"submodularity margin >= -1e-12 on 1000 random cell-set pairs, random positive weights",
         worst >= -1e-12, "worst = " + fmt(worst)});
    return rep;
  }

  if (name == "comparison") {
    const ComparisonStudy study = run_comparison_study(seed, 20, 64, suite_solver_config());
    rep.checks.push_back(
        {"comparison violation max(u1 - u2) <= 5e-3 on 20 ordered pairs (64^2 disk)",
         study.worst_violation <= 5e-3, "worst = " + fmt(study.worst_violation)});
    rep.checks.push_back({"constant-shift case exact to 1e-6", study.shift_error <= 1e-6,
                          "sup error = " + fmt(study.shift_error)});
    return rep;
  }

  if (name == "stability") {
    const ComparisonStudy study = run_comparison_study(seed, 20, 64, suite_solver_config());
    rep.checks.push_back(
        {"stability margin sup|u1-u2| - sup|g1-g2| <= 5e-3 on 20 ordered pairs (64^2 disk)",
         study.worst_stability <= 5e-3, "worst = " + fmt(study.worst_stability)});
    return rep;
  }

  if (name == "calibration") {
    const CalibrationStudy study =
        run_calibration_study(0.75, {256, 512}, 1.5e-4, false, suite_solver_config());
    const double r0 = study.residuals[0], r1 = study.residuals[1];
    rep.checks.push_back(
        {"calibration residual <= 0.05 on the 256^2 window of D", r1 <= 0.05, "residual = " + fmt(r1)});
    rep.checks.push_back({"residual halving ratio >= 1.4 (256^2 -> 512^2)", r0 / r1 >= 1.4,
                          "ratio = " + fmt(r0 / r1)});
    rep.checks.push_back({"objectives of u_0, u_1/2, u_1 pairwise within 1e-3 of scale",
                          study.table.max_pairwise_gap <= study.equality_tolerance,
                          "gap = " + fmt(study.table.max_pairwise_gap) +
                              ", tol = " + fmt(study.equality_tolerance)});
    rep.checks.push_back({"+10% lens weight breaks equality by > 5x tolerance",
                          study.perturbed_gap > 5.0 * study.equality_tolerance,
                          "gap = " + fmt(study.perturbed_gap)});
    return rep;
  }

  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace lg
