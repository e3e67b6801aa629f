#pragma once

#include <functional>

#include "leastgrad/solver.hpp"

namespace lg {

/// The planar (n = 2) calibration construction on D = {|x| < 3} x R:
///   psi(r, z) = r - g(r) |z|^(1+theta) / (1+theta),   r = |x|,
/// with a C^2 bump g that is 0 on [0,1/3], 1 on [1/2,1] and -1 on [2,3]
/// (quintic smoothstep transitions), the divergence-free field
///   J = (-sgn(x) psi_z, psi_r),
/// the weight a = |J|, and the one-parameter family u_sigma whose level
/// curves follow grad(psi). The lens interface zeta1 is closed-form on
/// [1/2, 1] and continued below r = 1/2 by a classical Runge-Kutta step on
/// dz/dr = psi_z / psi_r.
class Counterexample {
 public:
  explicit Counterexample(double theta = 0.75);

  double theta() const { return theta_; }

  double bump(double r) const;
  double bump_prime(double r) const;
  double psi(double r, double z) const;
  double psi_r(double r, double z) const;
  double psi_z(double r, double z) const;

  /// J at a point of the (x, z) plane.
  Vec2 current_at(double x, double z) const;
  /// |J| at a point; positive on all of D.
  double weight_at(double x, double z) const;

  /// Fan interface: [(1-theta)(r-2)]^(1/(1-theta)) for r >= 2, else 0.
  double zeta2(double r) const;
  /// Lens interface: [(1-theta)(1-r)]^(1/(1-theta)) on [1/2, 1], zero for
  /// r >= 1, tabulated ODE continuation for r < 1/2 (requires ensure_table).
  double zeta1(double r) const;
  double zeta1_max() const;

  /// u_sigma at a point; sigma in [0, 1].
  double family_value(double sigma, double x, double z) const;

  /// (Re)builds the zeta1 continuation table at the given step.
  void ensure_table(double step);
  /// Continuation table step-halving error, for the integrator order check.
  double table_refinement_error(double step) const;

 private:
  double ode_rhs(double r, double z) const;
  double theta_;
  double table_step_ = 0.0;
  std::vector<double> table_;  // zeta1 at r = 1/2 - k*step
};

/// Samples a = |J| at cell centers and J on the staggered faces. Throws if
/// the spacing cannot resolve the bump transitions (h > 1/24) or the grid
/// leaves D.
std::pair<ScalarField, VectorField> counterexample_fields(Counterexample& ce, const GridPtr& grid);

/// Samples u_sigma at cell centers; sigma outside [0, 1] is an error.
ScalarField counterexample_family(Counterexample& ce, double sigma, const GridPtr& grid);

/// |sum J.Du - sum |J||Du|| / sum |J||Du| with the discrete gradient
/// (defined as 0 when the denominator vanishes).
double calibration_residual(const ScalarField& a, const VectorField& J, const ScalarField& u);

/// Multiplies the weight by `factor` at cells inside the open lens
/// { r < 1, 0 < z < zeta1(r) } (the negative control for the demo).
ScalarField lens_perturbed_weight(const Counterexample& ce, const ScalarField& a, double factor);

struct NonuniquenessTable {
  std::vector<double> sigmas;
  std::vector<double> objectives;
  double max_pairwise_gap = 0.0;
  double tolerance = 0.0;  // c * h^min(theta, 1-theta) * scale
  double solver_objective = 0.0;
  SolveReport solve_report;
};

/// Evaluates the relaxed energy of each u_sigma under the common trace,
/// solves the same least gradient problem, and returns the objective table.
/// The grid must be an admissible Omega: it contains the jump sets and every
/// boundary face sees sigma-independent values (verified, else throws).
NonuniquenessTable nonuniqueness_demo(Counterexample& ce, const GridPtr& grid,
                                      const std::vector<double>& sigmas, const SolverConfig& cfg,
                                      double tolerance_constant = 1.0);

/// Grid helpers for the construction: a square window of D, the thin
/// rectangle with 0.1 z-margin around the jump sets, and a lens-resolving
/// rectangle (|x| < xmax, |z| < half_height) at spacing h.
GridPtr counterexample_grid_square(int n);
GridPtr counterexample_grid_margin(int nx);
GridPtr counterexample_grid_lens(double h, double xmax = 1.2, double half_height = 0.0016);

/// Barrier-condition indicator -sum_i d/dx_i [phi_{xi_i}(x, Dd)] evaluated by
/// central differences of the closed-form phi_xi on the signed distance d to
/// the zero level set (positive inside), restricted to |d| <= band_width.
struct BarrierResult {
  ScalarField indicator;               // defined on band cells, 0 elsewhere
  std::vector<std::uint8_t> band;      // 1 where the indicator is defined
  double minimum = 0.0;
};
BarrierResult barrier_indicator(const FinslerMetric& m, const ScalarField& level_set,
                                double band_width);

struct AnnulusResult {
  double objective1 = 0.0;
  double objective2 = 0.0;
  double reference = 0.0;  // 2 pi |g(2) - g(1)|
};

/// Omega = annulus 1 <= |x| <= 2 carved out of the given grid geometry,
/// a = 1/r, u_i = g_i(|x|); returns both phi-total variations. Profiles must
/// be monotone with matching endpoints.
AnnulusResult annulus_demo(const std::function<double(double)>& g1,
                           const std::function<double(double)>& g2, const GridPtr& base_grid);

}  // namespace lg
