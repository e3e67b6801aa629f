#include "leastgrad/bundle.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace lg {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load_descriptor(const std::string& path, const char* expected_type) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open bundle descriptor");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!j.contains("type") || j["type"].get<std::string>() != expected_type)
    throw std::runtime_error(path + ": bundle 'type' must be '" + std::string(expected_type) + "'");
  return j;
}

std::string resolved(const std::string& bundle_path, const json& j, const char* key) {
  if (!j.contains(key))
    throw std::runtime_error(bundle_path + ": missing field '" + std::string(key) + "'");
  return (fs::path(bundle_path).parent_path() / j.at(key).get<std::string>()).string();
}

SolverConfig maybe_config(const std::string& bundle_path, const json& j) {
  if (!j.contains("config")) return SolverConfig{};
  return read_solver_config_json(resolved(bundle_path, j, "config"));
}

void save_descriptor(const std::string& dir, const json& j) {
  const std::string path = (fs::path(dir) / "bundle.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

}  // namespace

ProblemBundle load_problem_bundle(const std::string& path) {
  const json j = load_descriptor(path, "solve");
  ProblemBundle b;
  b.grid = read_grid_json(resolved(path, j, "grid"));
  b.metric = read_metric(resolved(path, j, "metric"), b.grid);
  b.boundary = read_boundary_csv(resolved(path, j, "boundary"), b.grid);
  b.config = maybe_config(path, j);
  return b;
}

CdiiBundle load_cdii_bundle(const std::string& path) {
  const json j = load_descriptor(path, "cdii");
  CdiiBundle b;
  b.grid = read_grid_json(resolved(path, j, "grid"));
  b.sigma_true = read_field_csv(resolved(path, j, "sigma_true"), b.grid);
  b.boundary = read_boundary_csv(resolved(path, j, "boundary"), b.grid);
  b.config = maybe_config(path, j);
  if (j.contains("cg_tol")) b.cg_tol = j["cg_tol"].get<double>();
  if (!(b.cg_tol > 0.0)) throw std::runtime_error(path + ": cg_tol must be positive");
  if (j.contains("grad_floor")) b.grad_floor = j["grad_floor"].get<double>();
  return b;
}

BarrierBundle load_barrier_bundle(const std::string& path) {
  const json j = load_descriptor(path, "barrier");
  BarrierBundle b;
  b.grid = read_grid_json(resolved(path, j, "grid"));
  b.metric = read_metric(resolved(path, j, "metric"), b.grid);
  b.level_set = read_field_csv(resolved(path, j, "level_set"), b.grid);
  if (!j.contains("band_width")) throw std::runtime_error(path + ": missing field 'band_width'");
  b.band_width = j["band_width"].get<double>();
  return b;
}

void write_problem_bundle(const std::string& dir, const ProblemBundle& b) {
  fs::create_directories(dir);
  write_grid_json((fs::path(dir) / "grid.json").string(), *b.grid);
  write_metric(dir, "metric", b.metric);
  write_boundary_csv((fs::path(dir) / "boundary.csv").string(), b.boundary);
  write_solver_config_json((fs::path(dir) / "solver.json").string(), b.config);
  json j;
  j["type"] = "solve";
  j["grid"] = "grid.json";
  j["metric"] = "metric.json";
  j["boundary"] = "boundary.csv";
  j["config"] = "solver.json";
  save_descriptor(dir, j);
}

void write_cdii_bundle(const std::string& dir, const CdiiBundle& b) {
  fs::create_directories(dir);
  write_grid_json((fs::path(dir) / "grid.json").string(), *b.grid);
  write_field_csv((fs::path(dir) / "sigma_true.csv").string(), b.sigma_true);
  write_boundary_csv((fs::path(dir) / "boundary.csv").string(), b.boundary);
  write_solver_config_json((fs::path(dir) / "solver.json").string(), b.config);
  json j;
  j["type"] = "cdii";
  j["grid"] = "grid.json";
  j["sigma_true"] = "sigma_true.csv";
  j["boundary"] = "boundary.csv";
  j["config"] = "solver.json";
  j["cg_tol"] = b.cg_tol;
  j["grad_floor"] = b.grad_floor;
  save_descriptor(dir, j);
}

void write_barrier_bundle(const std::string& dir, const BarrierBundle& b) {
  fs::create_directories(dir);
  write_grid_json((fs::path(dir) / "grid.json").string(), *b.grid);
  write_metric(dir, "metric", b.metric);
  write_field_csv((fs::path(dir) / "level_set.csv").string(), b.level_set);
  json j;
  j["type"] = "barrier";
  j["grid"] = "grid.json";
  j["metric"] = "metric.json";
  j["level_set"] = "level_set.csv";
  j["band_width"] = b.band_width;
  save_descriptor(dir, j);
}

}  // namespace lg
