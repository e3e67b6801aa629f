#pragma once

#include <string>

#include "leastgrad/analysis.hpp"
#include "leastgrad/rng.hpp"

namespace lg {

/// Seeded randomized property suites behind `check`. Reports render to a
/// deterministic text table so identical seeds give byte-identical output.
struct SuiteCheck {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<SuiteCheck> checks;
  bool pass() const;
  std::string render() const;
};

std::vector<std::string> suite_names();
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

/// Shared fixtures (also used by the acceptance tests).

/// n x n unit-square grid masked to the disk of the given radius about
/// (0.5, 0.5).
GridPtr make_disk_grid(int n, double radius = 0.45);

/// The weight 1 + 0.5 sin(2 pi x) sin(2 pi y) used by the comparison and
/// stability studies.
FinslerMetric make_sine_weight_metric(const GridPtr& grid);

/// Smooth random trace on the boundary faces (low-order Fourier in the face
/// angle) and an ordered partner g2 = g1 + (0.02 + smooth^2).
struct OrderedTracePair {
  BoundaryData g1, g2;
  double sup_gap = 0.0;  // max over faces of g2 - g1
};
OrderedTracePair random_ordered_pair(Rng& rng, const GridPtr& grid);

struct ComparisonStudy {
  std::vector<double> violations;        // max over cells of u1 - u2
  std::vector<double> stability_margins; // sup|u1-u2| - sup|g1-g2|
  double worst_violation = 0.0;
  double worst_stability = 0.0;
  double shift_error = 0.0;  // sup |u(g+0.3) - u(g) - 0.3|
};
ComparisonStudy run_comparison_study(std::uint64_t seed, int pairs, int n,
                                     const SolverConfig& cfg);

/// Calibration-identity data: residuals on square windows of D plus the
/// objective table on a lens-resolving rectangle (optionally with the
/// solver run and the perturbed-weight negative control).
struct CalibrationStudy {
  std::vector<int> sizes;
  std::vector<double> residuals;
  NonuniquenessTable table;
  double equality_tolerance = 0.0;   // 1e-3 * mean objective
  double perturbed_gap = 0.0;        // negative control pairwise gap
};
CalibrationStudy run_calibration_study(double theta, const std::vector<int>& sizes,
                                       double lens_h, bool run_solver, const SolverConfig& cfg);

SolverConfig suite_solver_config();

}  // namespace lg
