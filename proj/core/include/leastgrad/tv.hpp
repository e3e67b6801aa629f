#pragma once

#include "leastgrad/metric.hpp"

namespace lg {

/// A set of cells (subset of the masked region).
struct CellSet {
  GridPtr grid;
  std::vector<std::uint8_t> in;

  CellSet() = default;
  explicit CellSet(GridPtr g, bool fill = false)
      : grid(std::move(g)), in(static_cast<std::size_t>(grid->cell_count()), fill ? 1 : 0) {}
};

/// Discrete phi-total variation: sum over masked cells of
/// phi(x_cell, gradient(u)(cell)) * h^2.
double total_variation(const FinslerMetric& m, const ScalarField& u);

/// phi-perimeter of E relative to A: the total variation of the indicator of
/// E restricted to cells whose owning cell lies in A.
double perimeter(const FinslerMetric& m, const CellSet& E, const CellSet& A);

/// Perimeter relative to the whole masked region.
double perimeter(const FinslerMetric& m, const CellSet& E);

/// Relaxed boundary functional
///   I_phi(u) = TV_phi(u) + sum_faces phi(x_b, nu_b) |g_b - u_b| h
/// with u_b the owning cell's value.
double relaxed_energy(const FinslerMetric& m, const ScalarField& u, const BoundaryData& g);

/// | TV(u) - sum_k dt_k P(X_{t_k}) | with thresholds at midpoints between
/// the sorted distinct values of u. Zero (to rounding) whenever the level-set
/// boundaries of u are axis-aligned. Throws if u carries more than
/// `max_levels` distinct values.
double coarea_residual(const FinslerMetric& m, const ScalarField& u, int max_levels = 256);

/// P(E1) + P(E2) - P(E1 u E2) - P(E1 n E2); nonnegative up to rounding.
double submodularity_margin(const FinslerMetric& m, const CellSet& e1, const CellSet& e2);

/// Super-level set { u >= lambda } within the mask.
CellSet threshold(const ScalarField& u, double lambda);

/// Enumerates every modification of E obtained by flipping at most k cells
/// outside `fixed`, and returns min over modifications of P(E') - P(E)
/// (zero flips included, so the result is <= 0 for no change). For k >= 2 the
/// enumeration is guarded: at most 20 flippable cells.
double flip_audit(const FinslerMetric& m, const CellSet& E, const CellSet& fixed, int k);

ScalarField indicator_field(const CellSet& E);

}  // namespace lg
