// Generates the built-in demo bundles consumed by `leastgrad solve|cdii|barrier`.

#include <cmath>
#include <cstdio>
#include <cstring>

#include "leastgrad/bundle.hpp"

namespace {

using namespace lg;

BoundaryData trace_from(const GridPtr& grid, double (*f)(double, double)) {
  const auto faces = boundary_faces(*grid);
  BoundaryData bd;
  bd.grid = grid;
  bd.g.resize(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto p = faces[k].center(*grid);
    bd.g[k] = f(p[0], p[1]);
  }
  return bd;
}

void make_constant(const std::string& dir) {
  ProblemBundle b;
  b.grid = make_full_grid(16, 16, 1.0 / 16);
  b.metric = make_isotropic_metric(ScalarField(b.grid, 1.0), 1.0);
  b.boundary = trace_from(b.grid, [](double, double) { return 1.25; });
  write_problem_bundle(dir, b);
}

void make_annulus(const std::string& dir) {
  const double h = 1.0 / 64;
  const int n = 272;  // covers (-2.125, 2.125)
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = -2.125 + (i + 0.5) * h;
      const double y = -2.125 + (j + 0.5) * h;
      const double r = std::hypot(x, y);
      if (r >= 1.0 && r <= 2.0) mask[static_cast<std::size_t>(j) * n + i] = 1;
    }
  ProblemBundle b;
  b.grid = make_grid(n, n, h, {-2.125, -2.125}, std::move(mask));
  ScalarField a(b.grid, 1.0);
  double amin = 1e300;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int c = b.grid->idx(i, j);
      if (!b.grid->mask[c]) continue;
      a[c] = 1.0 / std::hypot(b.grid->cx(i), b.grid->cy(j));
      amin = std::min(amin, a[c]);
    }
  b.metric = make_isotropic_metric(std::move(a), amin);
  b.boundary = trace_from(b.grid, [](double x, double y) {
    return std::hypot(x, y) < 1.5 ? 0.0 : 1.0;
  });
  b.config.max_iters = 30000;
  b.config.tol = 1e-4;
  write_problem_bundle(dir, b);
}

void make_cdii_gaussian(const std::string& dir, int n) {
  CdiiBundle b;
  b.grid = make_full_grid(n, n, 1.0 / n);
  b.sigma_true = ScalarField(b.grid, 1.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double dx = b.grid->cx(i) - 0.5, dy = b.grid->cy(j) - 0.5;
      b.sigma_true[b.grid->idx(i, j)] = 1.0 + 0.5 * std::exp(-(dx * dx + dy * dy) / 0.02);
    }
  b.boundary = trace_from(b.grid, [](double x, double) { return x; });
  b.cg_tol = 1e-10;
  b.config.max_iters = 30000;
  b.config.tol = 1e-7;
  write_cdii_bundle(dir, b);
}

void make_barrier_disk(const std::string& dir) {
  const int n = 384;  // (-1.5, 1.5) at h = 1/128
  BarrierBundle b;
  b.grid = make_full_grid(n, n, 1.0 / 128, {-1.5, -1.5});
  b.metric = make_isotropic_metric(ScalarField(b.grid, 1.0), 1.0);
  b.level_set = ScalarField(b.grid);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      b.level_set[b.grid->idx(i, j)] = 1.0 - std::hypot(b.grid->cx(i), b.grid->cy(j));
  b.band_width = 0.02;
  write_barrier_bundle(dir, b);
}

void make_barrier_dumbbell(const std::string& dir) {
  const int n = 512;  // (-2, 2) at h = 1/128
  BarrierBundle b;
  b.grid = make_full_grid(n, n, 1.0 / 128, {-2.0, -2.0});
  b.metric = make_isotropic_metric(ScalarField(b.grid, 1.0), 1.0);
  b.level_set = ScalarField(b.grid);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = b.grid->cx(i), y = b.grid->cy(j);
      const double d1 = 0.7 - std::hypot(x + 1.0, y);
      const double d2 = 0.7 - std::hypot(x - 1.0, y);
      // Parabolic waist |y| <= 0.15 + 0.5 x^2, |x| <= 0.6: concave neck.
      const double neck = std::min(0.6 - std::abs(x), 0.15 + 0.5 * x * x - std::abs(y));
      b.level_set[b.grid->idx(i, j)] = std::max({d1, d2, neck});
    }
  b.band_width = 0.02;
  write_barrier_bundle(dir, b);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr,
                 "usage: leastgrad-mkbundle <name> <dir>\n"
                 "names: constant, annulus, cdii-gaussian, cdii-gaussian-128, barrier-disk, "
                 "barrier-dumbbell\n");
    return 1;
  }
  const std::string name = argv[1];
  const std::string dir = argv[2];
  try {
    if (name == "constant")
      make_constant(dir);
    else if (name == "annulus")
      make_annulus(dir);
    else if (name == "cdii-gaussian")
      make_cdii_gaussian(dir, 64);
    else if (name == "cdii-gaussian-128")
      make_cdii_gaussian(dir, 128);
    else if (name == "barrier-disk")
      make_barrier_disk(dir);
    else if (name == "barrier-dumbbell")
      make_barrier_dumbbell(dir);
    else {
      std::fprintf(stderr, "error: unknown bundle '%s'\n", name.c_str());
      return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::printf("wrote %s bundle to %s\n", name.c_str(), dir.c_str());
  return 0;
}
