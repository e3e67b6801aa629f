#include "leastgrad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

inline double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double smoothstep5_prime(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Counterexample::Counterexample(double theta) : theta_(theta) {
  if (!(theta > 0.5 && theta < 1.0))
    throw std::invalid_argument("counterexample: theta must lie in (1/2, 1)");
}

double Counterexample::bump(double r) const {
  if (r <= 1.0 / 3.0) return 0.0;
  if (r < 0.5) return smoothstep5((r - 1.0 / 3.0) * 6.0);
  if (r <= 1.0) return 1.0;
  if (r < 2.0) return 1.0 - 2.0 * smoothstep5(r - 1.0);
  return -1.0;
}

double Counterexample::bump_prime(double r) const {
  if (r > 1.0 / 3.0 && r < 0.5) return 6.0 * smoothstep5_prime((r - 1.0 / 3.0) * 6.0);
  if (r > 1.0 && r < 2.0) return -2.0 * smoothstep5_prime(r - 1.0);
  return 0.0;
}

double Counterexample::psi(double r, double z) const {
  return r - bump(r) * std::pow(std::abs(z), 1.0 + theta_) / (1.0 + theta_);
}

double Counterexample::psi_r(double r, double z) const {
  return 1.0 - bump_prime(r) * std::pow(std::abs(z), 1.0 + theta_) / (1.0 + theta_);
}

double Counterexample::psi_z(double r, double z) const {
  return -bump(r) * sgn(z) * std::pow(std::abs(z), theta_);
}

Vec2 Counterexample::current_at(double x, double z) const {
  const double r = std::abs(x);
  return {-sgn(x) * psi_z(r, z), psi_r(r, z)};
}

double Counterexample::weight_at(double x, double z) const {
  const double r = std::abs(x);
  const double pz = psi_z(r, z), pr = psi_r(r, z);
  return std::sqrt(pz * pz + pr * pr);
}

double Counterexample::zeta2(double r) const {
  if (r <= 2.0) return 0.0;
  return std::pow((1.0 - theta_) * (r - 2.0), 1.0 / (1.0 - theta_));
}

double Counterexample::ode_rhs(double r, double z) const {
  if (z <= 0.0) return 0.0;
  return psi_z(r, z) / psi_r(r, z);
}

void Counterexample::ensure_table(double step) {
  if (!(step > 0.0)) throw std::invalid_argument("counterexample: table step must be positive");
  if (table_step_ == step && !table_.empty()) return;
  const int n = static_cast<int>(std::ceil(0.5 / step)) + 1;
  table_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  double z = std::pow((1.0 - theta_) * 0.5, 1.0 / (1.0 - theta_));  // zeta1(1/2)
  table_[0] = z;
  double r = 0.5;
  for (int k = 1; k <= n; ++k) {
    const double dt = -std::min(step, r);  // last partial step lands on r = 0
    const double k1 = ode_rhs(r, z);
    const double k2 = ode_rhs(r + 0.5 * dt, z + 0.5 * dt * k1);
    const double k3 = ode_rhs(r + 0.5 * dt, z + 0.5 * dt * k2);
    const double k4 = ode_rhs(r + dt, z + dt * k3);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    r += dt;
    table_[static_cast<std::size_t>(k)] = z;
    if (r <= 0.0) {
      table_.resize(static_cast<std::size_t>(k) + 1);
      break;
    }
  }
  table_step_ = step;
}

double Counterexample::zeta1(double r) const {
  if (r >= 1.0) return 0.0;
  if (r >= 0.5) return std::pow((1.0 - theta_) * (1.0 - r), 1.0 / (1.0 - theta_));
  if (table_.empty())
    throw std::logic_error("counterexample: zeta1 below r=1/2 needs ensure_table()");
  const double t = (0.5 - std::max(r, 0.0)) / table_step_;
  const auto k = static_cast<std::size_t>(t);
  if (k + 1 >= table_.size()) return table_.back();
  const double frac = t - static_cast<double>(k);
  return table_[k] * (1.0 - frac) + table_[k + 1] * frac;
}

double Counterexample::zeta1_max() const {
  double m = std::pow((1.0 - theta_) * 0.5, 1.0 / (1.0 - theta_));
  for (double v : table_) m = std::max(m, v);
  return m;
}

double Counterexample::table_refinement_error(double step) const {
  Counterexample coarse(theta_), fine(theta_);
  coarse.ensure_table(step);
  fine.ensure_table(0.5 * step);
  double err = 0.0;
  for (double r = 0.0; r < 0.5; r += step)
    err = std::max(err, std::abs(coarse.zeta1(r) - fine.zeta1(r)));
  return err;
}

double Counterexample::family_value(double sigma, double x, double z) const {
  const double r = std::abs(x);
  if (z <= 0.0) return 0.0;
  if (r <= 1.0) {
    const double z1 = zeta1(r);
    return z > z1 ? 1.0 : sigma;
  }
  if (r < 2.0) return 1.0;
  const double z2 = zeta2(r);
  if (z >= z2) return 1.0;
  return std::pow(z, 1.0 - theta_) / (1.0 - theta_) - r + 3.0;
}

namespace {

void check_counterexample_grid(const Grid& g) {
  if (g.h > 1.0 / 24.0 + 1e-12)
    throw std::invalid_argument(
        "counterexample: grid too coarse to resolve the bump transitions (need h <= 1/24)");
  const double xlo = g.origin[0];
  const double xhi = g.origin[0] + g.nx * g.h;
  if (xlo < -3.0 - 1e-12 || xhi > 3.0 + 1e-12)
    throw std::invalid_argument("counterexample: grid must stay inside D = {|x| < 3}");
}

}  // namespace

std::pair<ScalarField, VectorField> counterexample_fields(Counterexample& ce,
                                                          const GridPtr& grid) {
  check_counterexample_grid(*grid);
  ce.ensure_table(grid->h / 4.0);
  const Grid& g = *grid;
  ScalarField a(grid);
  VectorField J(grid);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      a[c] = ce.weight_at(g.cx(i), g.cy(j));
      if (!(a[c] > 0.0))
        throw std::runtime_error("counterexample: weight vanished on the grid");
      if (g.interior(i + 1, j)) J.x[c] = ce.current_at(g.cx(i) + 0.5 * g.h, g.cy(j))[0];
      if (g.interior(i, j + 1)) J.y[c] = ce.current_at(g.cx(i), g.cy(j) + 0.5 * g.h)[1];
    }
  return {std::move(a), std::move(J)};
}

ScalarField counterexample_family(Counterexample& ce, double sigma, const GridPtr& grid) {
  if (!(sigma >= 0.0 && sigma <= 1.0))
    throw std::invalid_argument("counterexample: sigma must lie in [0, 1]");
  check_counterexample_grid(*grid);
  ce.ensure_table(grid->h / 4.0);
  const Grid& g = *grid;
  ScalarField u(grid);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (g.mask[c]) u[c] = ce.family_value(sigma, g.cx(i), g.cy(j));
    }
  return u;
}

double calibration_residual(const ScalarField& a, const VectorField& J, const ScalarField& u) {
  require_same_grid(a.grid, J.grid, "calibration_residual");
  require_same_grid(a.grid, u.grid, "calibration_residual");
  const Grid& g = *u.grid;
  const double inv_h = 1.0 / g.h;
  double lhs = 0.0, rhs = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      double gx = 0.0, gy = 0.0;
      if (g.interior(i + 1, j)) gx = (u[g.idx(i + 1, j)] - u[c]) * inv_h;
      if (g.interior(i, j + 1)) gy = (u[g.idx(i, j + 1)] - u[c]) * inv_h;
      lhs += J.x[c] * gx + J.y[c] * gy;
      rhs += a[c] * std::sqrt(gx * gx + gy * gy);
    }
  if (rhs == 0.0) return 0.0;
  return std::abs(lhs - rhs) / rhs;
}

ScalarField lens_perturbed_weight(const Counterexample& ce, const ScalarField& a, double factor) {
  ScalarField out = a;
  const Grid& g = *a.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      const double r = std::abs(g.cx(i));
      const double z = g.cy(j);
      if (r < 1.0 && z > 0.0 && z < ce.zeta1(r)) out[c] *= factor;
    }
  return out;
}

NonuniquenessTable nonuniqueness_demo(Counterexample& ce, const GridPtr& grid,
                                      const std::vector<double>& sigmas, const SolverConfig& cfg,
                                      double tolerance_constant) {
  if (sigmas.size() < 2)
    throw std::invalid_argument("nonuniqueness_demo: need at least two sigma values");
  auto [a, J] = counterexample_fields(ce, grid);
  (void)J;
  const Grid& g = *grid;

  // Common trace, sampled at face centers; must be sigma-independent.
  const auto faces = boundary_faces(g);
  BoundaryData bd;
  bd.grid = grid;
  bd.g.resize(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto p = faces[k].center(g);
    bd.g[k] = ce.family_value(sigmas[0], p[0], p[1]);
  }
  for (double s : sigmas)
    for (std::size_t k = 0; k < faces.size(); ++k) {
      const auto p = faces[k].center(g);
      if (ce.family_value(s, p[0], p[1]) != bd.g[k])
        throw std::invalid_argument(
            "nonuniqueness_demo: boundary trace depends on sigma; Omega must contain the jump sets");
    }

  double amin = std::numeric_limits<double>::infinity();
  for (int c = 0; c < g.cell_count(); ++c)
    if (g.mask[c]) amin = std::min(amin, a[c]);
  FinslerMetric m = make_isotropic_metric(a, amin);

  NonuniquenessTable table;
  table.sigmas = sigmas;
  for (double s : sigmas) {
    ScalarField u = counterexample_family(ce, s, grid);
    table.objectives.push_back(relaxed_energy(m, u, bd));
  }
  double scale = 0.0;
  for (double o : table.objectives) scale += o;
  scale /= static_cast<double>(table.objectives.size());
  const double exp_min = std::min(ce.theta(), 1.0 - ce.theta());
  table.tolerance = tolerance_constant * std::pow(g.h, exp_min) * scale;
  const auto [mn, mx] = std::minmax_element(table.objectives.begin(), table.objectives.end());
  table.max_pairwise_gap = *mx - *mn;

  auto [u_solve, rep] = solve_least_gradient(m, bd, cfg);
  (void)u_solve;
  table.solver_objective = rep.objective;
  table.solve_report = std::move(rep);
  return table;
}

GridPtr counterexample_grid_square(int n) {
  return make_full_grid(n, n, 6.0 / n, {-3.0, -3.0});
}

GridPtr counterexample_grid_margin(int nx) {
  const double h = 6.0 / nx;
  const int ny = static_cast<int>(std::ceil(0.205 / h));
  return make_full_grid(nx, ny, h, {-3.0, -0.1});
}

GridPtr counterexample_grid_lens(double h, double xmax, double half_height) {
  const int nx = static_cast<int>(std::round(2.0 * xmax / h));
  const int ny = static_cast<int>(std::round(2.0 * half_height / h));
  return make_full_grid(nx, ny, h, {-xmax, -half_height});
}

namespace {

struct PhiXi {
  const FinslerMetric* m;
  // phi_xi(x, xi): a * xi/|xi| or a * sigma0 xi / sqrt(xi^T sigma0 xi).
  Vec2 operator()(int cell, double gx, double gy) const {
    if (m->kind == FinslerMetric::Kind::WeightedIsotropic) {
      const double n = std::sqrt(gx * gx + gy * gy);
      if (n == 0.0) return {0.0, 0.0};
      const double f = m->a[cell] / n;
      return {f * gx, f * gy};
    }
    const double s11 = m->s11[cell], s12 = m->s12[cell], s22 = m->s22[cell];
    const double qx = s11 * gx + s12 * gy;
    const double qy = s12 * gx + s22 * gy;
    const double n = std::sqrt(std::max(gx * qx + gy * qy, 0.0));
    if (n == 0.0) return {0.0, 0.0};
    const double f = m->a[cell] / n;
    return {f * qx, f * qy};
  }
};

}  // namespace

BarrierResult barrier_indicator(const FinslerMetric& m, const ScalarField& level_set,
                                double band_width) {
  require_same_grid(m.grid(), level_set.grid, "barrier_indicator");
  const Grid& g = *level_set.grid;
  const double h = g.h;
  if (band_width < 2.0 * h - 1e-12)
    throw std::invalid_argument("barrier_indicator: band_width must be at least 2h");

  const int nx = g.nx, ny = g.ny;
  const auto& ls = level_set.v;
  auto at = [&](int i, int j) { return ls[g.idx(i, j)]; };

  // The indicator takes second differences of d, so the band values must be
  // smooth at cell scale; marched first-order values carry O(h) creases that
  // the 1/h^2 amplification would turn into O(1) noise. Inside the band the
  // smooth local estimate d = l / |grad l| is the high-order correction; the
  // first-order march only fills the far field beyond the evaluation
  // stencils.
  std::vector<std::uint8_t> frozen(static_cast<std::size_t>(g.cell_count()), 0);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(g.cell_count()), inf);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = g.idx(i, j);
      const double v = ls[c];
      bool iface = false;
      if (i + 1 < nx && v * at(i + 1, j) <= 0.0 && (v != 0.0 || at(i + 1, j) != 0.0)) iface = true;
      if (i > 0 && v * at(i - 1, j) <= 0.0 && (v != 0.0 || at(i - 1, j) != 0.0)) iface = true;
      if (j + 1 < ny && v * at(i, j + 1) <= 0.0 && (v != 0.0 || at(i, j + 1) != 0.0)) iface = true;
      if (j > 0 && v * at(i, j - 1) <= 0.0 && (v != 0.0 || at(i, j - 1) != 0.0)) iface = true;
      if (iface && (i < 3 || i >= nx - 3 || j < 3 || j >= ny - 3))
        throw std::invalid_argument("barrier_indicator: zero level set too close to the grid edge");
      if (i < 1 || i >= nx - 1 || j < 1 || j >= ny - 1) continue;

      const double gx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
      const double gy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
      const double gn = std::sqrt(gx * gx + gy * gy);
      if (iface && gn < 0.5)
        throw std::invalid_argument(
            "barrier_indicator: |grad level_set| < 0.5 near the zero set; distance ill-conditioned");
      if (gn < 0.5) continue;
      const double local = std::abs(v) / gn;
      if (local <= band_width + 3.0 * h) {
        frozen[c] = 1;
        dist[c] = local;
      }
    }
  bool any_frozen = false;
  for (auto f : frozen) any_frozen |= (f != 0);
  if (!any_frozen)
    throw std::invalid_argument("barrier_indicator: level set has no zero crossing on the grid");

  // First-order eikonal by damped Jacobi sweeps on the unsigned distance.
  // The per-cell update is symmetric in the two axis minima, so the result
  // commutes with grid rotations.
  std::vector<double> next = dist;
  const int max_pass = 2 * (nx + ny);
  for (int pass = 0; pass < max_pass; ++pass) {
    bool changed = false;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int c = g.idx(i, j);
        if (frozen[c]) continue;
        double tx = inf, ty = inf;
        if (i > 0) tx = std::min(tx, dist[g.idx(i - 1, j)]);
        if (i + 1 < nx) tx = std::min(tx, dist[g.idx(i + 1, j)]);
        if (j > 0) ty = std::min(ty, dist[g.idx(i, j - 1)]);
        if (j + 1 < ny) ty = std::min(ty, dist[g.idx(i, j + 1)]);
        double cand = inf;
        const double lo = std::min(tx, ty), hi2 = std::max(tx, ty);
        if (lo < inf) {
          if (hi2 - lo >= h || hi2 == inf) {
            cand = lo + h;
          } else {
            const double diff = tx - ty;
            cand = 0.5 * (tx + ty + std::sqrt(2.0 * h * h - diff * diff));
          }
        }
        if (cand < dist[c]) {
          next[c] = cand;
          changed = true;
        } else {
          next[c] = dist[c];
        }
      }
    dist.swap(next);
    if (!changed) break;
  }

  // Signed distance, positive inside (level set positive inside).
  ScalarField d(level_set.grid);
  for (int c = 0; c < g.cell_count(); ++c) d[c] = ls[c] >= 0.0 ? dist[c] : -dist[c];

  // phi_xi(x, Dd) with central differences, then its central divergence.
  PhiXi phix{&m};
  std::vector<double> fx(static_cast<std::size_t>(g.cell_count()), 0.0);
  std::vector<double> fy(static_cast<std::size_t>(g.cell_count()), 0.0);
  auto in_stencil = [&](int i, int j) { return i >= 1 && i < nx - 1 && j >= 1 && j < ny - 1; };
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i) {
      const int c = g.idx(i, j);
      if (std::abs(d[c]) > band_width + 2.5 * h) continue;
      const double gx = (d[g.idx(i + 1, j)] - d[g.idx(i - 1, j)]) / (2.0 * h);
      const double gy = (d[g.idx(i, j + 1)] - d[g.idx(i, j - 1)]) / (2.0 * h);
      const Vec2 f = phix(c, gx, gy);
      fx[c] = f[0];
      fy[c] = f[1];
    }

  BarrierResult res;
  res.indicator = ScalarField(level_set.grid);
  res.band.assign(static_cast<std::size_t>(g.cell_count()), 0);
  res.minimum = inf;
  for (int j = 2; j < ny - 2; ++j)
    for (int i = 2; i < nx - 2; ++i) {
      const int c = g.idx(i, j);
      if (std::abs(d[c]) > band_width) continue;
      if (!in_stencil(i - 1, j) || !in_stencil(i + 1, j) || !in_stencil(i, j - 1) ||
          !in_stencil(i, j + 1))
        continue;
      const double tx = fx[g.idx(i + 1, j)] - fx[g.idx(i - 1, j)];
      const double ty = fy[g.idx(i, j + 1)] - fy[g.idx(i, j - 1)];
      res.indicator[c] = -(tx + ty) / (2.0 * h);
      res.band[c] = 1;
      res.minimum = std::min(res.minimum, res.indicator[c]);
    }
  if (!std::isfinite(res.minimum))
    throw std::invalid_argument("barrier_indicator: no cells inside the requested band");
  return res;
}

AnnulusResult annulus_demo(const std::function<double(double)>& g1,
                           const std::function<double(double)>& g2, const GridPtr& base_grid) {
  const Grid& bg = *base_grid;

  auto check_profile = [](const std::function<double(double)>& gp, const char* name) {
    const int n = 2048;
    int dir = 0;
    double prev = gp(1.0);
    for (int k = 1; k <= n; ++k) {
      const double cur = gp(1.0 + k / static_cast<double>(n));
      const double d = cur - prev;
      if (d > 1e-13) {
        if (dir < 0) throw std::invalid_argument(std::string("annulus_demo: ") + name + " is not monotone");
        dir = 1;
      } else if (d < -1e-13) {
        if (dir > 0) throw std::invalid_argument(std::string("annulus_demo: ") + name + " is not monotone");
        dir = -1;
      }
      prev = cur;
    }
  };
  check_profile(g1, "g1");
  check_profile(g2, "g2");
  if (std::abs(g1(1.0) - g2(1.0)) > 1e-9 || std::abs(g1(2.0) - g2(2.0)) > 1e-9)
    throw std::invalid_argument("annulus_demo: profiles must share endpoint values");

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(bg.cell_count()), 0);
  for (int j = 0; j < bg.ny; ++j)
    for (int i = 0; i < bg.nx; ++i) {
      const double r = std::hypot(bg.cx(i), bg.cy(j));
      if (r >= 1.0 && r <= 2.0) mask[bg.idx(i, j)] = 1;
    }
  GridPtr grid = make_grid(bg.nx, bg.ny, bg.h, bg.origin, std::move(mask));
  const Grid& g = *grid;

  ScalarField a(grid, 1.0), u1(grid), u2(grid);
  double amin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      const double r = std::hypot(g.cx(i), g.cy(j));
      a[c] = 1.0 / r;
      amin = std::min(amin, a[c]);
      u1[c] = g1(r);
      u2[c] = g2(r);
    }
  FinslerMetric m = make_isotropic_metric(std::move(a), amin);

  AnnulusResult res;
  res.objective1 = total_variation(m, u1);
  res.objective2 = total_variation(m, u2);
  res.reference = 2.0 * kPi * std::abs(g1(2.0) - g1(1.0));
  return res;
}

}  // namespace lg
