#include "leastgrad/grid.hpp"

#include <cmath>
#include <queue>

namespace lg {

int Grid::interior_count() const {
  int n = 0;
  for (auto m : mask) n += (m != 0);
  return n;
}

namespace {

void check_connected(const Grid& g) {
  const int n = g.cell_count();
  int start = -1;
  for (int c = 0; c < n; ++c)
    if (g.mask[c]) { start = c; break; }
  if (start < 0) throw std::invalid_argument("grid: mask has no interior cell");

  std::vector<std::uint8_t> seen(n, 0);
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  int reached = 0;
  while (!q.empty()) {
    const int c = q.front();
    q.pop();
    ++reached;
    const int i = c % g.nx, j = c / g.nx;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ii = i + di[k], jj = j + dj[k];
      if (!g.interior(ii, jj)) continue;
      const int cc = g.idx(ii, jj);
      if (!seen[cc]) {
        seen[cc] = 1;
        q.push(cc);
      }
    }
  }
  if (reached != g.interior_count())
    throw std::invalid_argument("grid: interior cells are not edge-connected");
}

}  // namespace

GridPtr make_grid(int nx, int ny, double h, std::array<double, 2> origin,
                  std::vector<std::uint8_t> mask) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid: nx and ny must be >= 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid: spacing must be positive");
  if (!std::isfinite(origin[0]) || !std::isfinite(origin[1]))
    throw std::invalid_argument("grid: origin must be finite");
  if (mask.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw std::invalid_argument("grid: mask size does not match nx*ny");
  auto g = std::make_shared<Grid>();
  g->nx = nx;
  g->ny = ny;
  g->h = h;
  g->origin = origin;
  g->mask = std::move(mask);
  check_connected(*g);
  return g;
}

GridPtr make_full_grid(int nx, int ny, double h, std::array<double, 2> origin) {
  return make_grid(nx, ny, h, origin,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 1));
}

std::vector<BoundaryFace> boundary_faces(const Grid& g) {
  if (g.interior_count() == 0) throw std::invalid_argument("grid: mask has no interior cell");
  std::vector<BoundaryFace> faces;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.mask[g.idx(i, j)]) continue;
      for (int k = 0; k < 4; ++k) {
        if (g.interior(i + di[k], j + dj[k])) continue;
        BoundaryFace f;
        f.cell = g.idx(i, j);
        f.i = i;
        f.j = j;
        f.nx_ = static_cast<std::int8_t>(di[k]);
        f.ny_ = static_cast<std::int8_t>(dj[k]);
        f.measure = g.h;
        faces.push_back(f);
      }
    }
  return faces;
}

BoundaryData make_boundary_data(const GridPtr& grid, double fill) {
  BoundaryData b;
  b.grid = grid;
  b.g.assign(boundary_faces(*grid).size(), fill);
  return b;
}

VectorField gradient(const ScalarField& u) {
  const Grid& g = *u.grid;
  VectorField p(u.grid);
  const double inv_h = 1.0 / g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      if (g.interior(i + 1, j)) p.x[c] = (u[g.idx(i + 1, j)] - u[c]) * inv_h;
      if (g.interior(i, j + 1)) p.y[c] = (u[g.idx(i, j + 1)] - u[c]) * inv_h;
    }
  return p;
}

ScalarField divergence(const VectorField& p) {
  const Grid& g = *p.grid;
  ScalarField d(p.grid);
  const double inv_h = 1.0 / g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      if (!g.mask[c]) continue;
      double acc = 0.0;
      if (g.interior(i + 1, j)) acc += p.x[c];
      if (g.interior(i - 1, j)) acc -= p.x[g.idx(i - 1, j)];
      if (g.interior(i, j + 1)) acc += p.y[c];
      if (g.interior(i, j - 1)) acc -= p.y[g.idx(i, j - 1)];
      d[c] = acc * inv_h;
    }
  return d;
}

double dot(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u.grid, v.grid, "dot");
  double acc = 0.0;
  for (std::size_t c = 0; c < u.v.size(); ++c) acc += u.v[c] * v.v[c];
  return acc * u.grid->h * u.grid->h;
}

double dot(const VectorField& p, const VectorField& q) {
  require_same_grid(p.grid, q.grid, "dot");
  double acc = 0.0;
  for (std::size_t c = 0; c < p.x.size(); ++c) acc += p.x[c] * q.x[c] + p.y[c] * q.y[c];
  return acc * p.grid->h * p.grid->h;
}

std::array<double, 2> cell_centered(const VectorField& p, int i, int j) {
  const Grid& g = *p.grid;
  const int c = g.idx(i, j);
  std::array<double, 2> out{0.0, 0.0};
  if (!g.mask[c]) return out;
  const bool xe = g.interior(i + 1, j), xw = g.interior(i - 1, j);
  const bool yn = g.interior(i, j + 1), ys = g.interior(i, j - 1);
  if (xe && xw)
    out[0] = 0.5 * (p.x[c] + p.x[g.idx(i - 1, j)]);
  else if (xe)
    out[0] = p.x[c];
  else if (xw)
    out[0] = p.x[g.idx(i - 1, j)];
  if (yn && ys)
    out[1] = 0.5 * (p.y[c] + p.y[g.idx(i, j - 1)]);
  else if (yn)
    out[1] = p.y[c];
  else if (ys)
    out[1] = p.y[g.idx(i, j - 1)];
  return out;
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what) {
  if (a == b) return;
  if (!a || !b) throw std::invalid_argument(std::string(what) + ": missing grid");
  if (a->nx != b->nx || a->ny != b->ny || a->h != b->h || a->origin != b->origin ||
      a->mask != b->mask)
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

}  // namespace lg
