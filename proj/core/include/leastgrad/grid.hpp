#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace lg {

/// Rectangular cell-centered lattice. The domain is the union of masked
/// cells; everything outside the mask (including out-of-range indices)
/// counts as exterior. Cells are stored row-major, index = j*nx + i.
struct Grid {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  std::array<double, 2> origin{0.0, 0.0};
  std::vector<std::uint8_t> mask;  // 1 = interior cell

  int cell_count() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  bool interior(int i, int j) const { return in_bounds(i, j) && mask[idx(i, j)] != 0; }
  double cx(int i) const { return origin[0] + (i + 0.5) * h; }
  double cy(int j) const { return origin[1] + (j + 0.5) * h; }
  int interior_count() const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates invariants (sizes, positive spacing, nonempty edge-connected
/// mask) and returns the shared grid handle used by fields.
GridPtr make_grid(int nx, int ny, double h, std::array<double, 2> origin,
                  std::vector<std::uint8_t> mask);

/// Convenience: all-interior mask.
GridPtr make_full_grid(int nx, int ny, double h, std::array<double, 2> origin = {0.0, 0.0});

struct ScalarField {
  GridPtr grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), v(static_cast<std::size_t>(grid->cell_count()), fill) {}
  double& operator[](int c) { return v[static_cast<std::size_t>(c)]; }
  double operator[](int c) const { return v[static_cast<std::size_t>(c)]; }
};

/// Face-staggered 2-vector field: x[c] lives on the face between cell c and
/// its +x neighbor, y[c] on the face between c and its +y neighbor.
/// Components on faces that leave the mask are kept at zero.
struct VectorField {
  GridPtr grid;
  std::vector<double> x, y;

  VectorField() = default;
  explicit VectorField(GridPtr g)
      : grid(std::move(g)),
        x(static_cast<std::size_t>(grid->cell_count()), 0.0),
        y(static_cast<std::size_t>(grid->cell_count()), 0.0) {}
};

/// One interior/exterior cell adjacency. The owning cell is interior and the
/// neighbor across the face (in direction (nx_, ny_)) is exterior.
struct BoundaryFace {
  int cell = 0;       // owning interior cell index
  int i = 0, j = 0;   // owning cell coordinates
  std::int8_t nx_ = 0, ny_ = 0;  // outward unit normal, axis-aligned
  double measure = 0.0;          // face length == grid spacing

  /// Face midpoint (lies on the boundary between the two cells).
  std::array<double, 2> center(const Grid& g) const {
    return {g.cx(i) + 0.5 * g.h * nx_, g.cy(j) + 0.5 * g.h * ny_};
  }
};

/// Deterministic enumeration: owning cells in row-major order, faces per cell
/// in direction order (+x, -x, +y, -y). Throws if the mask is empty.
std::vector<BoundaryFace> boundary_faces(const Grid& g);

/// Trace values attached face-by-face to boundary_faces(grid), same order.
struct BoundaryData {
  GridPtr grid;
  std::vector<double> g;  // one value per boundary face
};

BoundaryData make_boundary_data(const GridPtr& grid, double fill = 0.0);

/// Forward differences on interior faces, zero across the boundary; the
/// boundary itself is handled by the separate trace term of the relaxed
/// functional.
VectorField gradient(const ScalarField& u);

/// Exact negative adjoint of gradient under the inner products
/// <u,v> = h^2 sum(u v), <p,q> = h^2 sum(p.q).
ScalarField divergence(const VectorField& p);

/// h^2-weighted inner products.
double dot(const ScalarField& u, const ScalarField& v);
double dot(const VectorField& p, const VectorField& q);

/// Cell-centered components of a face-staggered field: per-axis average of
/// the adjacent interior-face values (a single available face passes
/// through, no face gives zero).
std::array<double, 2> cell_centered(const VectorField& p, int i, int j);

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what);

}  // namespace lg
