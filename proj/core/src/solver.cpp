#include "leastgrad/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leastgrad/rng.hpp"

namespace lg {

namespace {

struct CellFace {
  double w;  // phi(x_b, nu_b)
  double g;  // trace value
};

struct Workspace {
  const Grid* g = nullptr;
  std::vector<int> cells;               // masked cell indices
  std::vector<int> east, west, north, south;  // neighbor cell index or -1
  // boundary faces grouped per cell (offsets into faces)
  std::vector<int> face_begin, face_end;
  std::vector<CellFace> faces;
  double lo = 0.0, hi = 0.0;  // trace bounds
};

Workspace build_workspace(const FinslerMetric& m, const BoundaryData& bd) {
  Workspace ws;
  const Grid& g = *m.grid();
  ws.g = &g;
  const int n = g.cell_count();
  ws.east.assign(n, -1);
  ws.west.assign(n, -1);
  ws.north.assign(n, -1);
  ws.south.assign(n, -1);
  ws.face_begin.assign(n, 0);
  ws.face_end.assign(n, 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      ws.cells.push_back(c);
      if (g.interior(i + 1, j)) ws.east[c] = g.idx(i + 1, j);
      if (g.interior(i - 1, j)) ws.west[c] = g.idx(i - 1, j);
      if (g.interior(i, j + 1)) ws.north[c] = g.idx(i, j + 1);
      if (g.interior(i, j - 1)) ws.south[c] = g.idx(i, j - 1);
    }

  const auto bfaces = boundary_faces(g);
  if (bd.g.size() != bfaces.size())
    throw std::invalid_argument("solver: boundary data does not match face count");
  ws.lo = std::numeric_limits<double>::infinity();
  ws.hi = -ws.lo;
  for (std::size_t k = 0; k < bfaces.size(); ++k) {
    if (!std::isfinite(bd.g[k]))
      throw std::invalid_argument("solver: boundary data must be finite");
    ws.lo = std::min(ws.lo, bd.g[k]);
    ws.hi = std::max(ws.hi, bd.g[k]);
  }
  // Group faces by owning cell; bfaces is already cell-major.
  ws.faces.resize(bfaces.size());
  std::size_t k = 0;
  while (k < bfaces.size()) {
    const int c = bfaces[k].cell;
    ws.face_begin[c] = static_cast<int>(k);
    while (k < bfaces.size() && bfaces[k].cell == c) {
      const BoundaryFace& f = bfaces[k];
      ws.faces[k] = {metric_eval(m, c, {double(f.nx_), double(f.ny_)}), bd.g[k]};
      ++k;
    }
    ws.face_end[c] = static_cast<int>(k);
  }
  return ws;
}

// Exact minimizer of  0.5 (t - v)^2 + lambda * sum_k w_k |t - g_k|  over R.
// At most four terms, so sort and scan the breakpoints.
double trace_prox(double v, double lambda, const CellFace* f, int nf) {
  double gs[4], wsum = 0.0;
  int idx[4];
  for (int k = 0; k < nf; ++k) {
    gs[k] = f[k].g;
    idx[k] = k;
    wsum += f[k].w;
  }
  std::sort(idx, idx + nf, [&](int a, int b) { return gs[a] < gs[b]; });

  // On the segment between sorted breakpoints the slope term is
  // lambda * (W_below - W_above); scan segments left to right.
  double below = 0.0;
  double above = wsum;
  for (int seg = 0; seg <= nf; ++seg) {
    const double cand = v - lambda * (below - above);
    const double left = (seg == 0) ? -std::numeric_limits<double>::infinity() : gs[idx[seg - 1]];
    const double right = (seg == nf) ? std::numeric_limits<double>::infinity() : gs[idx[seg]];
    if (cand >= left && cand <= right) return cand;
    if (cand < left) return left;  // minimum sits at the breakpoint on our left
    if (seg < nf) {
      below += f[idx[seg]].w;
      above -= f[idx[seg]].w;
    }
  }
  return gs[idx[nf - 1]];  // unreachable
}

// Dual value of the box-constrained problem:
//   D(Y) = sum_c min_{t in [lo,hi]} ( -h^2 divY_c t + sum_k w_k h |g_k - t| ).
// Piecewise linear per cell, so the minimum sits at lo, hi or a trace value.
double dual_value(const Workspace& ws, const std::vector<double>& divY, double h) {
  const double h2 = h * h;
  double acc = 0.0;
  for (int c : ws.cells) {
    const double slope = -h2 * divY[c];
    const int b = ws.face_begin[c], e = ws.face_end[c];
    auto eval = [&](double t) {
      double val = slope * t;
      for (int k = b; k < e; ++k) val += ws.faces[k].w * h * std::abs(ws.faces[k].g - t);
      return val;
    };
    double best = std::min(eval(ws.lo), eval(ws.hi));
    for (int k = b; k < e; ++k) {
      const double t = std::clamp(ws.faces[k].g, ws.lo, ws.hi);
      best = std::min(best, eval(t));
    }
    acc += best;
  }
  return acc;
}

double primal_objective(const Workspace& ws, const FinslerMetric& m,
                        const std::vector<double>& u, double h) {
  const double inv_h = 1.0 / h;
  double acc = 0.0;
  for (int c : ws.cells) {
    double gx = 0.0, gy = 0.0;
    if (ws.east[c] >= 0) gx = (u[ws.east[c]] - u[c]) * inv_h;
    if (ws.north[c] >= 0) gy = (u[ws.north[c]] - u[c]) * inv_h;
    acc += metric_eval(m, c, {gx, gy}) * h * h;
    for (int k = ws.face_begin[c]; k < ws.face_end[c]; ++k)
      acc += ws.faces[k].w * std::abs(ws.faces[k].g - u[c]) * h;
  }
  return acc;
}

}  // namespace

std::pair<ScalarField, SolveReport> solve_least_gradient(const FinslerMetric& m,
                                                         const BoundaryData& bd,
                                                         const SolverConfig& cfg) {
  require_same_grid(m.grid(), bd.grid, "solve_least_gradient");
  const Grid& g = *m.grid();
  const double h = g.h;

  const double tau = cfg.tau > 0.0 ? cfg.tau : h / std::sqrt(8.0);
  const double s = cfg.s > 0.0 ? cfg.s : h / std::sqrt(8.0);
  if (cfg.max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solver: tol must be positive");
  if (cfg.theta_relax < 0.0 || cfg.theta_relax > 1.0)
    throw std::invalid_argument("solver: theta_relax must lie in [0, 1]");
  if (cfg.check_every < 1) throw std::invalid_argument("solver: check_every must be >= 1");
  if (tau * s * 8.0 / (h * h) > 1.0 + 1e-12)
    throw std::invalid_argument("solver: step sizes violate tau*s*L^2 <= 1");

  Workspace ws = build_workspace(m, bd);
  const int n = g.cell_count();
  const double lambda = tau / h;  // trace prox threshold scale

  std::vector<double> u(n, 0.0), ubar(n, 0.0), uprev(n, 0.0);
  std::vector<double> yx(n, 0.0), yy(n, 0.0), divY(n, 0.0);

  // Initial iterate.
  switch (cfg.init) {
    case SolverConfig::Init::Zero:
      break;
    case SolverConfig::Init::Random: {
      Rng rng(cfg.seed);
      for (int c : ws.cells) u[c] = rng.uniform(ws.lo, ws.hi);
      break;
    }
    case SolverConfig::Init::GExtension: {
      double wsum = 0.0, wg = 0.0;
      for (const auto& f : ws.faces) {
        wsum += f.w;
        wg += f.w * f.g;
      }
      const double mean = wg / wsum;
      for (int c : ws.cells) {
        if (ws.face_end[c] > ws.face_begin[c]) {
          double cw = 0.0, cg = 0.0;
          for (int k = ws.face_begin[c]; k < ws.face_end[c]; ++k) {
            cw += ws.faces[k].w;
            cg += ws.faces[k].w * ws.faces[k].g;
          }
          u[c] = cg / cw;
        } else {
          u[c] = mean;
        }
      }
      break;
    }
  }
  for (int c : ws.cells) u[c] = std::clamp(u[c], ws.lo, ws.hi);
  ubar = u;

  SolveReport rep;
  std::vector<double> ubest = u;
  double fbest = primal_objective(ws, m, u, h);
  rep.objective_history.push_back(fbest);

  const double inv_h = 1.0 / h;
  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    // Dual ascent + projection onto the pointwise dual ball.
    if (m.kind == FinslerMetric::Kind::WeightedIsotropic) {
      for (int c : ws.cells) {
        double gx = 0.0, gy = 0.0;
        if (ws.east[c] >= 0) gx = (ubar[ws.east[c]] - ubar[c]) * inv_h;
        if (ws.north[c] >= 0) gy = (ubar[ws.north[c]] - ubar[c]) * inv_h;
        double px = yx[c] + s * gx;
        double py = yy[c] + s * gy;
        const double r = std::sqrt(px * px + py * py);
        const double a = m.a[c];
        if (r > a) {
          const double sc = a / r;
          px *= sc;
          py *= sc;
        }
        yx[c] = px;
        yy[c] = py;
      }
    } else {
      for (int c : ws.cells) {
        double gx = 0.0, gy = 0.0;
        if (ws.east[c] >= 0) gx = (ubar[ws.east[c]] - ubar[c]) * inv_h;
        if (ws.north[c] >= 0) gy = (ubar[ws.north[c]] - ubar[c]) * inv_h;
        const Vec2 q = project_dual_ball(m, c, {yx[c] + s * gx, yy[c] + s * gy});
        yx[c] = q[0];
        yy[c] = q[1];
      }
    }

    // Primal descent: u + tau div Y, trace prox, box clamp.
    std::swap(u, uprev);
    for (int c : ws.cells) {
      double acc = 0.0;
      if (ws.east[c] >= 0) acc += yx[c];
      if (ws.west[c] >= 0) acc -= yx[ws.west[c]];
      if (ws.north[c] >= 0) acc += yy[c];
      if (ws.south[c] >= 0) acc -= yy[ws.south[c]];
      divY[c] = acc * inv_h;
      double v = uprev[c] + tau * divY[c];
      const int nf = ws.face_end[c] - ws.face_begin[c];
      if (nf > 0) v = trace_prox(v, lambda, &ws.faces[ws.face_begin[c]], nf);
      u[c] = std::clamp(v, ws.lo, ws.hi);
    }

    // Over-relaxation.
    for (int c : ws.cells) ubar[c] = u[c] + cfg.theta_relax * (u[c] - uprev[c]);

    if (it % cfg.check_every == 0 || it == cfg.max_iters) {
      const double f = primal_objective(ws, m, u, h);
      if (f < fbest) {
        fbest = f;
        ubest = u;
      }
      rep.objective_history.push_back(fbest);
      const double d = dual_value(ws, divY, h);
      rep.relative_gap = (fbest - d) / (1.0 + std::abs(fbest));
      if (rep.relative_gap <= cfg.tol) {
        rep.converged = true;
        break;
      }
    }
  }
  rep.iterations = std::min(it, cfg.max_iters);
  rep.objective = fbest;

  ScalarField out(m.grid());
  out.v = std::move(ubest);
  double mismatch = 0.0;
  for (int c : ws.cells)
    for (int k = ws.face_begin[c]; k < ws.face_end[c]; ++k)
      mismatch = std::max(mismatch, std::abs(out[c] - ws.faces[k].g));
  rep.boundary_mismatch_sup = mismatch;
  return {std::move(out), rep};
}

ComparisonResult comparison_probe(const FinslerMetric& m, const BoundaryData& g1,
                                  const BoundaryData& g2, const SolverConfig& cfg) {
  auto [u1, r1] = solve_least_gradient(m, g1, cfg);
  auto [u2, r2] = solve_least_gradient(m, g2, cfg);
  const Grid& g = *m.grid();
  double violation = -std::numeric_limits<double>::infinity();
  double sup_u = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) {
    if (!g.mask[c]) continue;
    violation = std::max(violation, u1[c] - u2[c]);
    sup_u = std::max(sup_u, std::abs(u1[c] - u2[c]));
  }
  double sup_g = 0.0;
  for (std::size_t k = 0; k < g1.g.size(); ++k)
    sup_g = std::max(sup_g, std::abs(g1.g[k] - g2.g[k]));
  ComparisonResult res;
  res.comparison_violation = violation;
  res.stability_margin = sup_u - sup_g;
  res.report1 = std::move(r1);
  res.report2 = std::move(r2);
  return res;
}

MultistartResult multistart_uniqueness_probe(const FinslerMetric& m, const BoundaryData& g,
                                             const SolverConfig& cfg, int starts) {
  if (starts < 2) throw std::invalid_argument("multistart: need at least 2 starts");
  MultistartResult res;
  std::vector<ScalarField> sols;
  for (int k = 0; k < starts; ++k) {
    SolverConfig c = cfg;
    if (k == 0)
      c.init = SolverConfig::Init::Zero;
    else if (k == 1)
      c.init = SolverConfig::Init::GExtension;
    else {
      c.init = SolverConfig::Init::Random;
      c.seed = cfg.seed + static_cast<std::uint64_t>(k);
    }
    auto [u, rep] = solve_least_gradient(m, g, c);
    res.objectives.push_back(rep.objective);
    sols.push_back(std::move(u));
  }
  const Grid& grid = *m.grid();
  for (std::size_t a = 0; a < sols.size(); ++a)
    for (std::size_t b = a + 1; b < sols.size(); ++b) {
      double sup = 0.0;
      for (int c = 0; c < grid.cell_count(); ++c)
        if (grid.mask[c]) sup = std::max(sup, std::abs(sols[a][c] - sols[b][c]));
      res.max_pairwise_sup = std::max(res.max_pairwise_sup, sup);
    }
  const auto [mn, mx] = std::minmax_element(res.objectives.begin(), res.objectives.end());
  res.max_objective_spread = *mx - *mn;
  return res;
}

}  // namespace lg
