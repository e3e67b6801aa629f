#include "leastgrad/cdii.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lg {

namespace {

inline double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

struct Stencil {
  // Per masked cell: diagonal and (harmonic mean) face conductivities toward
  // interior neighbors; boundary faces fold into the diagonal and the rhs.
  std::vector<int> cells;
  std::vector<double> diag;
  std::vector<double> ke, kw, kn, ks;  // zero when the face is not interior
  std::vector<int> e, w, nn, ss;       // neighbor indices, -1 when absent
  std::vector<double> rhs;
  double lo = 0.0, hi = 0.0;
};

Stencil build_stencil(const ConductionProblem& p) {
  const Grid& g = *p.grid;
  const auto faces = boundary_faces(g);
  if (p.f.g.size() != faces.size())
    throw std::invalid_argument("forward_conduction: boundary data does not match face count");
  Stencil st;
  const int n = g.cell_count();
  st.diag.assign(n, 0.0);
  st.ke.assign(n, 0.0);
  st.kw.assign(n, 0.0);
  st.kn.assign(n, 0.0);
  st.ks.assign(n, 0.0);
  st.e.assign(n, -1);
  st.w.assign(n, -1);
  st.nn.assign(n, -1);
  st.ss.assign(n, -1);
  st.rhs.assign(n, 0.0);

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      st.cells.push_back(c);
      if (!(std::isfinite(p.sigma[c]) && p.sigma[c] > 0.0))
        throw std::invalid_argument("forward_conduction: conductivity must be positive");
      auto add = [&](int ii, int jj, std::vector<double>& kf, std::vector<int>& nb) {
        if (g.interior(ii, jj)) {
          const int cn = g.idx(ii, jj);
          const double k = harmonic(p.sigma[c], p.sigma[cn]);
          kf[c] = k;
          nb[c] = cn;
          st.diag[c] += k;
        }
      };
      add(i + 1, j, st.ke, st.e);
      add(i - 1, j, st.kw, st.w);
      add(i, j + 1, st.kn, st.nn);
      add(i, j - 1, st.ks, st.ss);
    }

  st.lo = std::numeric_limits<double>::infinity();
  st.hi = -st.lo;
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const BoundaryFace& f = faces[k];
    if (!std::isfinite(p.f.g[k]))
      throw std::invalid_argument("forward_conduction: boundary data must be finite");
    // Dirichlet value on the face, half a cell away: flux 2 sigma (u - g)/h.
    st.diag[f.cell] += 2.0 * p.sigma[f.cell];
    st.rhs[f.cell] += 2.0 * p.sigma[f.cell] * p.f.g[k];
    st.lo = std::min(st.lo, p.f.g[k]);
    st.hi = std::max(st.hi, p.f.g[k]);
  }
  return st;
}

void apply(const Stencil& st, const std::vector<double>& x, std::vector<double>& out) {
  for (int c : st.cells) {
    double acc = st.diag[c] * x[c];
    if (st.e[c] >= 0) acc -= st.ke[c] * x[st.e[c]];
    if (st.w[c] >= 0) acc -= st.kw[c] * x[st.w[c]];
    if (st.nn[c] >= 0) acc -= st.kn[c] * x[st.nn[c]];
    if (st.ss[c] >= 0) acc -= st.ks[c] * x[st.ss[c]];
    out[c] = acc;
  }
}

}  // namespace

ScalarField forward_conduction(const ConductionProblem& p, double cg_tol, int* cg_iterations) {
  if (!(cg_tol > 0.0)) throw std::invalid_argument("forward_conduction: cg_tol must be positive");
  require_same_grid(p.grid, p.sigma.grid, "forward_conduction");
  require_same_grid(p.grid, p.f.grid, "forward_conduction");
  const Grid& g = *p.grid;
  Stencil st = build_stencil(p);

  // Jacobi-preconditioned CG on the SPD stencil (scale-free: the common 1/h^2
  // factor cancels from the normal equations).
  const int n = g.cell_count();
  std::vector<double> x(n, 0.0), r(st.rhs), z(n, 0.0), d(n, 0.0), q(n, 0.0);
  double bnorm = 0.0;
  for (int c : st.cells) bnorm += st.rhs[c] * st.rhs[c];
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) bnorm = 1.0;

  auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
    for (int c : st.cells) zz[c] = rr[c] / st.diag[c];
  };
  precond(r, z);
  d = z;
  double rz = 0.0;
  for (int c : st.cells) rz += r[c] * z[c];

  const int max_iters = 4 * (g.nx + g.ny) + 2000;
  int it = 0;
  double res = 0.0;
  for (it = 0; it < max_iters; ++it) {
    res = 0.0;
    for (int c : st.cells) res += r[c] * r[c];
    res = std::sqrt(res);
    if (res <= cg_tol * bnorm) break;
    apply(st, d, q);
    double dq = 0.0;
    for (int c : st.cells) dq += d[c] * q[c];
    const double alpha = rz / dq;
    for (int c : st.cells) {
      x[c] += alpha * d[c];
      r[c] -= alpha * q[c];
    }
    precond(r, z);
    double rz_new = 0.0;
    for (int c : st.cells) rz_new += r[c] * z[c];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int c : st.cells) d[c] = z[c] + beta * d[c];
  }
  if (res > cg_tol * bnorm) {
    std::ostringstream msg;
    msg << "forward_conduction: CG did not converge, relative residual " << res / bnorm;
    throw std::runtime_error(msg.str());
  }
  if (cg_iterations) *cg_iterations = it;

  ScalarField u(p.grid);
  for (int c : st.cells) u[c] = std::clamp(x[c], st.lo, st.hi);
  return u;
}

VectorField current_density(const ScalarField& sigma, const ScalarField& u) {
  require_same_grid(sigma.grid, u.grid, "current_density");
  const Grid& g = *u.grid;
  VectorField J(u.grid);
  const double inv_h = 1.0 / g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      if (g.interior(i + 1, j)) {
        const int cn = g.idx(i + 1, j);
        J.x[c] = -harmonic(sigma[c], sigma[cn]) * (u[cn] - u[c]) * inv_h;
      }
      if (g.interior(i, j + 1)) {
        const int cn = g.idx(i, j + 1);
        J.y[c] = -harmonic(sigma[c], sigma[cn]) * (u[cn] - u[c]) * inv_h;
      }
    }
  return J;
}

WeightResult weight_from_current(const VectorField& J, double a_floor) {
  WeightResult res;
  res.a = ScalarField(J.grid);
  res.a_floor = a_floor;
  const Grid& g = *J.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      const auto v = cell_centered(J, i, j);
      res.a[c] = std::sqrt(v[0] * v[0] + v[1] * v[1]);
      if (res.a[c] < a_floor) ++res.low_cells;
    }
  return res;
}

WeightResult weight_from_current(const VectorField& J, const std::vector<double>& s11,
                                 const std::vector<double>& s12, const std::vector<double>& s22,
                                 double a_floor) {
  WeightResult res;
  res.a = ScalarField(J.grid);
  res.a_floor = a_floor;
  const Grid& g = *J.grid;
  const auto n = static_cast<std::size_t>(g.cell_count());
  if (s11.size() != n || s12.size() != n || s22.size() != n)
    throw std::invalid_argument("weight_from_current: sigma0 fields must match the grid");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      const double det = s11[c] * s22[c] - s12[c] * s12[c];
      if (!(s11[c] > 0.0) || !(det > 0.0))
        throw std::invalid_argument("weight_from_current: sigma0 must be positive definite");
      const auto v = cell_centered(J, i, j);
      const double q =
          (s22[c] * v[0] * v[0] - 2.0 * s12[c] * v[0] * v[1] + s11[c] * v[1] * v[1]) / det;
      res.a[c] = std::sqrt(std::max(q, 0.0));
      if (res.a[c] < a_floor) ++res.low_cells;
    }
  return res;
}

ConductivityResult recover_conductivity(const ScalarField& a, const ScalarField& u_rec,
                                        double grad_floor) {
  if (!(grad_floor > 0.0))
    throw std::invalid_argument("recover_conductivity: grad_floor must be positive");
  require_same_grid(a.grid, u_rec.grid, "recover_conductivity");
  const Grid& g = *a.grid;
  VectorField du = gradient(u_rec);
  ConductivityResult res;
  res.sigma = ScalarField(a.grid);
  int masked = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      ++masked;
      const auto v = cell_centered(du, i, j);
      const double mag = std::sqrt(v[0] * v[0] + v[1] * v[1]);
      if (mag < grad_floor) ++res.floor_activations;
      res.sigma[c] = a[c] / std::max(mag, grad_floor);
    }
  res.excessive_floor = res.floor_activations > masked / 10;
  return res;
}

double default_grad_floor(const BoundaryData& f) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : f.g) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  return 1e-8 * span / f.grid->h;
}

std::pair<ScalarField, RecoveryReport> cdii_pipeline(const ScalarField& sigma_true,
                                                     const BoundaryData& f,
                                                     const SolverConfig& solver_cfg,
                                                     double cg_tol, double grad_floor) {
  RecoveryReport rep;
  const Grid& g = *sigma_true.grid;

  auto staged = [](const char* stage, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("cdii[") + stage + "]: " + e.what());
    }
  };

  ConductionProblem prob{sigma_true.grid, sigma_true, f};
  ScalarField u_fwd = staged("forward", [&] {
    return forward_conduction(prob, cg_tol, &rep.cg_iterations);
  });
  VectorField J = staged("current", [&] { return current_density(sigma_true, u_fwd); });
  WeightResult w = staged("weight", [&] { return weight_from_current(J); });

  // The least gradient weight must sit above a positive alpha; the demo
  // boundary patterns keep |J| bounded away from zero.
  double amin = std::numeric_limits<double>::infinity();
  for (int c = 0; c < g.cell_count(); ++c)
    if (g.mask[c]) amin = std::min(amin, w.a[c]);
  if (!(amin > 0.0))
    throw std::runtime_error("cdii[weight]: |J| vanishes on some cell; weight not admissible");

  FinslerMetric metric = staged("metric", [&] { return make_isotropic_metric(w.a, amin); });
  auto solved = staged("least_gradient", [&] { return solve_least_gradient(metric, f, solver_cfg); });
  ScalarField& u_rec = solved.first;
  rep.solve_report = solved.second;

  const double floor = grad_floor > 0.0 ? grad_floor : default_grad_floor(f);
  ConductivityResult rec = staged("recover", [&] {
    return recover_conductivity(w.a, u_rec, floor);
  });
  rep.floor_activations = rec.floor_activations;
  rep.excessive_floor = rec.excessive_floor;

  double nu = 0.0, du = 0.0, ns = 0.0, ds = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) {
    if (!g.mask[c]) continue;
    nu += (u_rec[c] - u_fwd[c]) * (u_rec[c] - u_fwd[c]);
    du += u_fwd[c] * u_fwd[c];
    ns += (rec.sigma[c] - sigma_true[c]) * (rec.sigma[c] - sigma_true[c]);
    ds += sigma_true[c] * sigma_true[c];
  }
  rep.u_rel_l2 = std::sqrt(nu / (du > 0.0 ? du : 1.0));
  rep.sigma_rel_l2 = std::sqrt(ns / (ds > 0.0 ? ds : 1.0));
  return {std::move(rec.sigma), rep};
}

}  // namespace lg
