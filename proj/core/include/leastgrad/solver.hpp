#pragma once

#include "leastgrad/tv.hpp"

namespace lg {

struct SolverConfig {
  enum class Init { GExtension, Zero, Random };

  int max_iters = 20000;
  double tol = 1e-6;  // relative primal-dual gap target
  // Primal/dual step sizes; 0 means the default h/sqrt(8), which satisfies
  // tau*s*L^2 <= 1 with L = sqrt(8)/h the discrete gradient norm bound.
  double tau = 0.0;
  double s = 0.0;
  double theta_relax = 1.0;  // over-relaxation in [0, 1]
  int check_every = 25;      // gap-evaluation stride
  Init init = Init::GExtension;
  std::uint64_t seed = 0;  // used by Init::Random
};

struct SolveReport {
  int iterations = 0;
  double relative_gap = 0.0;
  double objective = 0.0;  // relaxed_energy of the returned iterate
  std::vector<double> objective_history;  // incumbent objective at checkpoints
  bool converged = false;
  double boundary_mismatch_sup = 0.0;  // sup over faces of |u_b - g_b|
};

/// Minimizes the relaxed functional I_phi(. ; Omega, g) by a first-order
/// primal-dual saddle-point iteration:
///   dual ascent   Y <- project_dual_ball(Y + s * gradient(ubar))
///   primal step   u <- prox of the trace term at (u + tau * divergence(Y)),
///                 then clamp to [min g, max g]
///   relaxation    ubar <- u + theta * (u - u_prev)
/// Terminates when the gap between the primal objective and the dual value
/// built from the feasible Y drops below tol * (1 + |objective|); otherwise
/// returns the best iterate with converged = false.
std::pair<ScalarField, SolveReport> solve_least_gradient(const FinslerMetric& m,
                                                         const BoundaryData& g,
                                                         const SolverConfig& cfg);

/// Solves the two problems with identical config and reports
///   first:  max over cells of (u1 - u2)          (comparison violation)
///   second: sup|u1 - u2| - sup|g1 - g2|          (stability margin)
struct ComparisonResult {
  double comparison_violation = 0.0;
  double stability_margin = 0.0;
  SolveReport report1, report2;
};
ComparisonResult comparison_probe(const FinslerMetric& m, const BoundaryData& g1,
                                  const BoundaryData& g2, const SolverConfig& cfg);

/// Runs the solver from `starts` distinct initializations (zero, g-extension,
/// then seeded random fills) and reports the objectives together with the
/// max pairwise sup-distance between the solutions.
struct MultistartResult {
  std::vector<double> objectives;
  double max_pairwise_sup = 0.0;
  double max_objective_spread = 0.0;
};
MultistartResult multistart_uniqueness_probe(const FinslerMetric& m, const BoundaryData& g,
                                             const SolverConfig& cfg, int starts);

}  // namespace lg
