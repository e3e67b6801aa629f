#pragma once

#include "leastgrad/cdii.hpp"
#include "leastgrad/io.hpp"

namespace lg {

/// A problem bundle is a JSON descriptor referencing the grid, metric,
/// boundary and config files (paths relative to the descriptor):
///   { "type": "solve", "grid": "grid.json", "metric": "metric.json",
///     "boundary": "boundary.csv", "config": "solver.json" }
///   { "type": "cdii", "grid", "sigma_true": <csv>, "boundary", "config",
///     "cg_tol", "grad_floor" (optional) }
///   { "type": "barrier", "grid", "metric", "level_set": <csv>, "band_width" }
struct ProblemBundle {
  GridPtr grid;
  FinslerMetric metric;
  BoundaryData boundary;
  SolverConfig config;
};

struct CdiiBundle {
  GridPtr grid;
  ScalarField sigma_true;
  BoundaryData boundary;
  SolverConfig config;
  double cg_tol = 1e-10;
  double grad_floor = 0.0;  // 0 -> spacing-aware default
};

struct BarrierBundle {
  GridPtr grid;
  FinslerMetric metric;
  ScalarField level_set;
  double band_width = 0.0;
};

ProblemBundle load_problem_bundle(const std::string& path);
CdiiBundle load_cdii_bundle(const std::string& path);
BarrierBundle load_barrier_bundle(const std::string& path);

void write_problem_bundle(const std::string& dir, const ProblemBundle& b);
void write_cdii_bundle(const std::string& dir, const CdiiBundle& b);
void write_barrier_bundle(const std::string& dir, const BarrierBundle& b);

}  // namespace lg
