#pragma once

#include <string>

#include "leastgrad/metric.hpp"
#include "leastgrad/solver.hpp"
#include "leastgrad/tv.hpp"

namespace lg {

/// File formats:
///   grid JSON      {"nx", "ny", "h", "origin": [x, y], "mask_rle": [[v, count], ...]}
///   scalar CSV     header "i,j,value", one row per cell, row-major
///   vector CSV     header "i,j,px,py"
///   boundary CSV   header "i,j,nx,ny,g", rows in boundary_faces order
///   cell set JSON  {"rle": [[v, count], ...]}  (+ CSV indicator dump)
///   metric JSON    {"kind", "alpha", "a": <csv>, "sigma0": <csv, riemannian only>}
///                  with sigma0 CSV "i,j,s11,s12,s21,s22"; file names resolve
///                  relative to the JSON's directory
/// All doubles are written with %.17g so outputs round-trip bit-exactly.

void write_grid_json(const std::string& path, const Grid& g);
GridPtr read_grid_json(const std::string& path);

void write_field_csv(const std::string& path, const ScalarField& f);
ScalarField read_field_csv(const std::string& path, const GridPtr& grid);

void write_vector_csv(const std::string& path, const VectorField& f);
VectorField read_vector_csv(const std::string& path, const GridPtr& grid);

void write_boundary_csv(const std::string& path, const BoundaryData& bd);
BoundaryData read_boundary_csv(const std::string& path, const GridPtr& grid);

void write_cellset_json(const std::string& path, const CellSet& s);
CellSet read_cellset_json(const std::string& path, const GridPtr& grid);
void write_cellset_csv(const std::string& path, const CellSet& s);

/// Writes <dir>/<name>.json plus the referenced CSV field files.
void write_metric(const std::string& dir, const std::string& name, const FinslerMetric& m);
FinslerMetric read_metric(const std::string& json_path, const GridPtr& grid);

void write_solver_config_json(const std::string& path, const SolverConfig& cfg);
SolverConfig read_solver_config_json(const std::string& path);

void write_solve_report_json(const std::string& path, const SolveReport& rep);

std::string format_double(double v);

}  // namespace lg
