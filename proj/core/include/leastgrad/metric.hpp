#pragma once

#include <array>

#include "leastgrad/grid.hpp"

namespace lg {

using Vec2 = std::array<double, 2>;

/// The integrand phi(x, xi). Two families:
///   WeightedIsotropic:  phi = a(x) |xi|
///   Riemannian:         phi = a(x) (xi^T sigma0(x) xi)^(1/2)
/// with a >= alpha > 0 and sigma0 symmetric positive definite per cell.
struct FinslerMetric {
  enum class Kind { WeightedIsotropic, Riemannian };

  Kind kind = Kind::WeightedIsotropic;
  ScalarField a;
  // Riemannian coefficient field, empty for the isotropic family.
  std::vector<double> s11, s12, s22;
  double alpha = 0.0;

  const GridPtr& grid() const { return a.grid; }
};

FinslerMetric make_isotropic_metric(ScalarField a, double alpha);
FinslerMetric make_riemannian_metric(ScalarField a, std::vector<double> s11,
                                     std::vector<double> s12, std::vector<double> s22,
                                     double alpha);

/// phi(x_cell, xi).
double metric_eval(const FinslerMetric& m, int cell, const Vec2& xi);

/// Dual norm phi0(x_cell, p) = sup { p.xi : phi(x_cell, xi) <= 1 }.
/// Closed forms: |p|/a and (p^T sigma0^{-1} p)^{1/2} / a.
double metric_dual_eval(const FinslerMetric& m, int cell, const Vec2& p);

/// Euclidean-nearest point q with metric_dual_eval(q) <= 1. Radial scaling in
/// the isotropic case; ellipsoid projection via eigendecomposition plus a
/// safeguarded scalar root-find (tolerance 1e-12) in the Riemannian case.
Vec2 project_dual_ball(const FinslerMetric& m, int cell, const Vec2& p);

/// Sampled verification of conditions C1 (norm equivalence with the metric's
/// alpha), positive 1-homogeneity, the triangle inequality, and C3
/// (tangential convexity via second differences of phi on the unit sphere).
/// Reports worst margins; never throws on a violation.
struct ConditionReport {
  int samples = 0;
  // C1: min over samples of (phi - alpha|xi|) and (|xi|/alpha - phi); >= 0 passes.
  double c1_lower_margin = 0.0;
  double c1_upper_margin = 0.0;
  double homogeneity_residual = 0.0;  // max |phi(x,2 xi) - 2 phi(x,xi)|
  double triangle_violation = 0.0;    // max (phi(xi+eta) - phi(xi) - phi(eta)), clipped at 0
  double c3_min_curvature = 0.0;      // min tangential second difference on |xi| = 1
  bool c1_ok = false, homogeneity_ok = false, triangle_ok = false, c3_ok = false;
  bool all_ok() const { return c1_ok && homogeneity_ok && triangle_ok && c3_ok; }
};

ConditionReport check_conditions(const FinslerMetric& m, int sample_count,
                                 std::uint64_t seed = 1);

}  // namespace lg
