#pragma once

#include "leastgrad/solver.hpp"

namespace lg {

struct ConductionProblem {
  GridPtr grid;
  ScalarField sigma;  // positive conductivity
  BoundaryData f;     // boundary voltage on boundary faces
};

/// Solves div(sigma grad u) = 0 with Dirichlet data f by the 5-point
/// finite-difference stencil with harmonic-mean face conductivities and
/// Jacobi-preconditioned conjugate gradient to relative residual cg_tol.
/// The result is clamped to [min f, max f] (which contains the exact
/// discrete solution by the M-matrix structure). Throws on non-convergence,
/// carrying the residual in the message.
ScalarField forward_conduction(const ConductionProblem& p, double cg_tol,
                               int* cg_iterations = nullptr);

/// J = -sigma grad(u) with harmonic-mean face conductivities (the same face
/// values the forward stencil uses).
VectorField current_density(const ScalarField& sigma, const ScalarField& u);

/// a(x) = |J(x)| per cell (or (J^T sigma0^{-1} J)^{1/2} when sigma0 is given),
/// with the staggered J reconstructed at cell centers by per-axis face
/// averaging. Cells with a < a_floor are counted, not modified.
struct WeightResult {
  ScalarField a;
  int low_cells = 0;
  double a_floor = 0.0;
};
WeightResult weight_from_current(const VectorField& J, double a_floor = 0.0);
WeightResult weight_from_current(const VectorField& J, const std::vector<double>& s11,
                                 const std::vector<double>& s12, const std::vector<double>& s22,
                                 double a_floor = 0.0);

/// sigma_rec = a / max(|grad u_rec|, grad_floor) with the same cell-centered
/// gradient magnitude the weight uses; floor activations counted and flagged
/// when they exceed 10% of the masked cells.
struct ConductivityResult {
  ScalarField sigma;
  int floor_activations = 0;
  bool excessive_floor = false;
};
ConductivityResult recover_conductivity(const ScalarField& a, const ScalarField& u_rec,
                                        double grad_floor);

/// Spacing-aware default: 1e-8 * (max f - min f) / h.
double default_grad_floor(const BoundaryData& f);

struct RecoveryReport {
  double u_rel_l2 = 0.0;      // vs the forward potential
  double sigma_rel_l2 = 0.0;  // vs sigma_true
  int cg_iterations = 0;
  int floor_activations = 0;
  bool excessive_floor = false;
  SolveReport solve_report;
};

/// forward_conduction -> current_density -> weight_from_current ->
/// solve_least_gradient (metric a|xi|, boundary f) -> recover_conductivity.
/// Stage failures are rethrown with a stage tag in the message.
std::pair<ScalarField, RecoveryReport> cdii_pipeline(const ScalarField& sigma_true,
                                                     const BoundaryData& f,
                                                     const SolverConfig& solver_cfg,
                                                     double cg_tol, double grad_floor = 0.0);

}  // namespace lg
