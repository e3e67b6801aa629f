#include "leastgrad/tv.hpp"

#include <algorithm>
#include <cmath>

namespace lg {

namespace {

// phi(cell, gradient of u at cell) for one cell; gradient by forward
// differences on interior faces only.
inline double cell_tv_term(const FinslerMetric& m, const Grid& g, const std::vector<double>& u,
                           int i, int j) {
  const int c = g.idx(i, j);
  const double inv_h = 1.0 / g.h;
  double gx = 0.0, gy = 0.0;
  if (g.interior(i + 1, j)) gx = (u[g.idx(i + 1, j)] - u[c]) * inv_h;
  if (g.interior(i, j + 1)) gy = (u[g.idx(i, j + 1)] - u[c]) * inv_h;
  return metric_eval(m, c, {gx, gy});
}

}  // namespace

ScalarField indicator_field(const CellSet& E) {
  ScalarField f(E.grid);
  for (std::size_t c = 0; c < E.in.size(); ++c) f.v[c] = E.in[c] ? 1.0 : 0.0;
  return f;
}

double total_variation(const FinslerMetric& m, const ScalarField& u) {
  require_same_grid(m.grid(), u.grid, "total_variation");
  const Grid& g = *u.grid;
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.mask[g.idx(i, j)]) continue;
      acc += cell_tv_term(m, g, u.v, i, j);
    }
  return acc * g.h * g.h;
}

double perimeter(const FinslerMetric& m, const CellSet& E, const CellSet& A) {
  require_same_grid(m.grid(), E.grid, "perimeter");
  require_same_grid(E.grid, A.grid, "perimeter");
  const Grid& g = *E.grid;
  ScalarField chi = indicator_field(E);
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c] || !A.in[c]) continue;
      acc += cell_tv_term(m, g, chi.v, i, j);
    }
  return acc * g.h * g.h;
}

double perimeter(const FinslerMetric& m, const CellSet& E) {
  CellSet all(E.grid);
  for (std::size_t c = 0; c < all.in.size(); ++c) all.in[c] = E.grid->mask[c];
  return perimeter(m, E, all);
}

double relaxed_energy(const FinslerMetric& m, const ScalarField& u, const BoundaryData& bd) {
  require_same_grid(m.grid(), u.grid, "relaxed_energy");
  require_same_grid(u.grid, bd.grid, "relaxed_energy");
  const Grid& g = *u.grid;
  const auto faces = boundary_faces(g);
  if (bd.g.size() != faces.size())
    throw std::invalid_argument("relaxed_energy: boundary data does not match face count");
  double acc = total_variation(m, u);
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const BoundaryFace& f = faces[k];
    const double w = metric_eval(m, f.cell, {double(f.nx_), double(f.ny_)});
    acc += w * std::abs(bd.g[k] - u[f.cell]) * f.measure;
  }
  return acc;
}

double coarea_residual(const FinslerMetric& m, const ScalarField& u, int max_levels) {
  require_same_grid(m.grid(), u.grid, "coarea_residual");
  const Grid& g = *u.grid;
  std::vector<double> vals;
  for (int c = 0; c < g.cell_count(); ++c)
    if (g.mask[c]) vals.push_back(u[c]);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  if (static_cast<int>(vals.size()) > max_levels)
    throw std::invalid_argument("coarea_residual: field exceeds the quantization budget");

  const double tv = total_variation(m, u);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
    const double t = 0.5 * (vals[k] + vals[k + 1]);
    sum += (vals[k + 1] - vals[k]) * perimeter(m, threshold(u, t));
  }
  return std::abs(tv - sum);
}

double submodularity_margin(const FinslerMetric& m, const CellSet& e1, const CellSet& e2) {
  require_same_grid(e1.grid, e2.grid, "submodularity_margin");
  CellSet uni(e1.grid), inter(e1.grid);
  for (std::size_t c = 0; c < e1.in.size(); ++c) {
    uni.in[c] = (e1.in[c] || e2.in[c]) ? 1 : 0;
    inter.in[c] = (e1.in[c] && e2.in[c]) ? 1 : 0;
  }
  return perimeter(m, e1) + perimeter(m, e2) - perimeter(m, uni) - perimeter(m, inter);
}

CellSet threshold(const ScalarField& u, double lambda) {
  CellSet s(u.grid);
  const Grid& g = *u.grid;
  for (int c = 0; c < g.cell_count(); ++c) s.in[c] = (g.mask[c] && u[c] >= lambda) ? 1 : 0;
  return s;
}

namespace {

// Change of the perimeter under flipping `flips`, evaluated by recomputing
// only the affected owner cells (each flipped cell and its -x/-y neighbors).
// `chi` is flipped and restored in place.
double perimeter_delta(const FinslerMetric& m, const Grid& g, std::vector<double>& chi,
                       const std::vector<int>& flips) {
  std::vector<int> owners;
  for (int c : flips) {
    const int i = c % g.nx, j = c / g.nx;
    owners.push_back(c);
    if (g.interior(i - 1, j)) owners.push_back(g.idx(i - 1, j));
    if (g.interior(i, j - 1)) owners.push_back(g.idx(i, j - 1));
  }
  std::sort(owners.begin(), owners.end());
  owners.erase(std::unique(owners.begin(), owners.end()), owners.end());

  auto local = [&]() {
    double acc = 0.0;
    for (int c : owners) acc += cell_tv_term(m, g, chi, c % g.nx, c / g.nx);
    return acc * g.h * g.h;
  };
  const double before = local();
  for (int c : flips) chi[c] = 1.0 - chi[c];
  const double after = local();
  for (int c : flips) chi[c] = 1.0 - chi[c];
  return after - before;
}

}  // namespace

double flip_audit(const FinslerMetric& m, const CellSet& E, const CellSet& fixed, int k) {
  require_same_grid(m.grid(), E.grid, "flip_audit");
  require_same_grid(E.grid, fixed.grid, "flip_audit");
  if (k < 1) throw std::invalid_argument("flip_audit: k must be >= 1");
  const Grid& g = *E.grid;

  std::vector<int> flippable;
  for (int c = 0; c < g.cell_count(); ++c)
    if (g.mask[c] && !fixed.in[c]) flippable.push_back(c);
  if (k >= 2 && flippable.size() > 20)
    throw std::invalid_argument("flip_audit: enumeration budget exceeded (more than 20 flippable cells for k >= 2)");

  std::vector<double> chi(E.in.size());
  for (std::size_t c = 0; c < E.in.size(); ++c) chi[c] = E.in[c] ? 1.0 : 0.0;

  double best = 0.0;  // zero flips
  if (k == 1) {
    for (int c : flippable) best = std::min(best, perimeter_delta(m, g, chi, {c}));
    return best;
  }
  const int n = static_cast<int>(flippable.size());
  // Enumerate subsets of size 1..k (k small by the guard above).
  std::vector<int> pick;
  auto rec = [&](auto&& self, int start, int remaining) -> void {
    if (!pick.empty()) best = std::min(best, perimeter_delta(m, g, chi, pick));
    if (remaining == 0) return;
    for (int t = start; t < n; ++t) {
      pick.push_back(flippable[t]);
      self(self, t + 1, remaining - 1);
      pick.pop_back();
    }
  };
  rec(rec, 0, k);
  return best;
}

}  // namespace lg
