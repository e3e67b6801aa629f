#include "leastgrad/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lg {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

json require(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw std::runtime_error(path + ": missing field '" + key + "'");
  return j.at(key);
}

json mask_rle(const std::vector<std::uint8_t>& mask) {
  json rle = json::array();
  std::size_t k = 0;
  while (k < mask.size()) {
    std::size_t run = k;
    while (run < mask.size() && mask[run] == mask[k]) ++run;
    rle.push_back({int(mask[k]), run - k});
    k = run;
  }
  return rle;
}

std::vector<std::uint8_t> rle_mask(const json& rle, std::size_t expected, const std::string& path) {
  std::vector<std::uint8_t> mask;
  mask.reserve(expected);
  for (const auto& pair : rle) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::runtime_error(path + ": malformed mask_rle entry");
    const int v = pair[0].get<int>();
    const std::size_t count = pair[1].get<std::size_t>();
    if (v != 0 && v != 1) throw std::runtime_error(path + ": mask values must be 0 or 1");
    mask.insert(mask.end(), count, static_cast<std::uint8_t>(v));
  }
  if (mask.size() != expected)
    throw std::runtime_error(path + ": mask_rle does not cover nx*ny cells");
  return mask;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::runtime_error(path + ": malformed number '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_grid_json(const std::string& path, const Grid& g) {
  json j;
  j["nx"] = g.nx;
  j["ny"] = g.ny;
  j["h"] = g.h;
  j["origin"] = {g.origin[0], g.origin[1]};
  j["mask_rle"] = mask_rle(g.mask);
  save_text(path, j.dump(2) + "\n");
}

GridPtr read_grid_json(const std::string& path) {
  const json j = load_json(path);
  const int nx = require(j, "nx", path).get<int>();
  const int ny = require(j, "ny", path).get<int>();
  const double h = require(j, "h", path).get<double>();
  const auto orig = require(j, "origin", path);
  if (!orig.is_array() || orig.size() != 2)
    throw std::runtime_error(path + ": origin must be [x, y]");
  auto mask = rle_mask(require(j, "mask_rle", path),
                       static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), path);
  try {
    return make_grid(nx, ny, h, {orig[0].get<double>(), orig[1].get<double>()}, std::move(mask));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  const Grid& g = *f.grid;
  std::string out = "i,j,value\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out += std::to_string(i) + "," + std::to_string(j) + "," +
             format_double(f[g.idx(i, j)]) + "\n";
  save_text(path, out);
}

ScalarField read_field_csv(const std::string& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  ScalarField f(grid);
  std::vector<std::uint8_t> seen(f.v.size(), 0);
  std::string line;
  std::getline(in, line);  // header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != 3) throw std::runtime_error(path + ": expected 3 columns (i,j,value)");
    const int i = static_cast<int>(parse_double(tok[0], path));
    const int j = static_cast<int>(parse_double(tok[1], path));
    if (!grid->in_bounds(i, j)) throw std::runtime_error(path + ": cell index out of range");
    const double v = parse_double(tok[2], path);
    if (!std::isfinite(v)) throw std::runtime_error(path + ": field values must be finite");
    f[grid->idx(i, j)] = v;
    seen[static_cast<std::size_t>(grid->idx(i, j))] = 1;
    ++rows;
  }
  if (rows != f.v.size()) throw std::runtime_error(path + ": expected one row per cell");
  return f;
}

void write_vector_csv(const std::string& path, const VectorField& f) {
  const Grid& g = *f.grid;
  std::string out = "i,j,px,py\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(f.x[c]) + "," +
             format_double(f.y[c]) + "\n";
    }
  save_text(path, out);
}

VectorField read_vector_csv(const std::string& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  VectorField f(grid);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != 4) throw std::runtime_error(path + ": expected 4 columns (i,j,px,py)");
    const int i = static_cast<int>(parse_double(tok[0], path));
    const int j = static_cast<int>(parse_double(tok[1], path));
    if (!grid->in_bounds(i, j)) throw std::runtime_error(path + ": cell index out of range");
    const int c = grid->idx(i, j);
    f.x[c] = parse_double(tok[2], path);
    f.y[c] = parse_double(tok[3], path);
    if (!std::isfinite(f.x[c]) || !std::isfinite(f.y[c]))
      throw std::runtime_error(path + ": field values must be finite");
    ++rows;
  }
  if (rows != f.x.size()) throw std::runtime_error(path + ": expected one row per cell");
  // Enforce the staggering convention: faces leaving the mask carry zero.
  const Grid& g = *grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.idx(i, j);
      const bool fx_interior = g.mask[c] && g.interior(i + 1, j);
      const bool fy_interior = g.mask[c] && g.interior(i, j + 1);
      if ((!fx_interior && f.x[c] != 0.0) || (!fy_interior && f.y[c] != 0.0))
        throw std::runtime_error(path + ": nonzero component on a face leaving the mask");
    }
  return f;
}

void write_boundary_csv(const std::string& path, const BoundaryData& bd) {
  const auto faces = boundary_faces(*bd.grid);
  if (faces.size() != bd.g.size())
    throw std::runtime_error(path + ": boundary data does not match face count");
  std::string out = "i,j,nx,ny,g\n";
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    out += std::to_string(f.i) + "," + std::to_string(f.j) + "," + std::to_string(int(f.nx_)) +
           "," + std::to_string(int(f.ny_)) + "," + format_double(bd.g[k]) + "\n";
  }
  save_text(path, out);
}

BoundaryData read_boundary_csv(const std::string& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  const auto faces = boundary_faces(*grid);
  // Keyed lookup so row order in the file does not matter.
  auto key = [&](int i, int j, int nx, int ny) {
    return ((static_cast<std::int64_t>(j) * grid->nx + i) << 3) | ((nx + 1) << 1) |
           ((ny + 1) >> 1);
  };
  std::vector<std::pair<std::int64_t, std::size_t>> index;
  index.reserve(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k)
    index.emplace_back(key(faces[k].i, faces[k].j, faces[k].nx_, faces[k].ny_), k);
  std::sort(index.begin(), index.end());

  BoundaryData bd;
  bd.grid = grid;
  bd.g.assign(faces.size(), 0.0);
  std::vector<std::uint8_t> seen(faces.size(), 0);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != 5) throw std::runtime_error(path + ": expected 5 columns (i,j,nx,ny,g)");
    const int i = static_cast<int>(parse_double(tok[0], path));
    const int j = static_cast<int>(parse_double(tok[1], path));
    const int fnx = static_cast<int>(parse_double(tok[2], path));
    const int fny = static_cast<int>(parse_double(tok[3], path));
    if (std::abs(fnx) + std::abs(fny) != 1)
      throw std::runtime_error(path + ": face normal must be axis-aligned (+/-1, 0) or (0, +/-1)");
    const std::int64_t k = key(i, j, fnx, fny);
    auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(k, std::size_t(0)));
    if (it == index.end() || it->first != k)
      throw std::runtime_error(path + ": row does not correspond to a boundary face");
    const double v = parse_double(tok[4], path);
    if (!std::isfinite(v)) throw std::runtime_error(path + ": boundary values must be finite");
    bd.g[it->second] = v;
    seen[it->second] = 1;
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) throw std::runtime_error(path + ": missing boundary faces");
  return bd;
}

void write_cellset_json(const std::string& path, const CellSet& s) {
  json j;
  j["rle"] = mask_rle(s.in);
  save_text(path, j.dump(2) + "\n");
}

CellSet read_cellset_json(const std::string& path, const GridPtr& grid) {
  const json j = load_json(path);
  CellSet s(grid);
  s.in = rle_mask(require(j, "rle", path), s.in.size(), path);
  return s;
}

void write_cellset_csv(const std::string& path, const CellSet& s) {
  write_field_csv(path, indicator_field(s));
}

void write_metric(const std::string& dir, const std::string& name, const FinslerMetric& m) {
  namespace fs = std::filesystem;
  json j;
  j["alpha"] = m.alpha;
  j["a"] = name + "_a.csv";
  write_field_csv((fs::path(dir) / (name + "_a.csv")).string(), m.a);
  if (m.kind == FinslerMetric::Kind::WeightedIsotropic) {
    j["kind"] = "weighted_isotropic";
  } else {
    j["kind"] = "riemannian";
    j["sigma0"] = name + "_sigma0.csv";
    const Grid& g = *m.grid();
    std::string out = "i,j,s11,s12,s21,s22\n";
    for (int jj = 0; jj < g.ny; ++jj)
      for (int ii = 0; ii < g.nx; ++ii) {
        const int c = g.idx(ii, jj);
        out += std::to_string(ii) + "," + std::to_string(jj) + "," + format_double(m.s11[c]) +
               "," + format_double(m.s12[c]) + "," + format_double(m.s12[c]) + "," +
               format_double(m.s22[c]) + "\n";
      }
    save_text((fs::path(dir) / (name + "_sigma0.csv")).string(), out);
  }
  save_text((fs::path(dir) / (name + ".json")).string(), j.dump(2) + "\n");
}

FinslerMetric read_metric(const std::string& json_path, const GridPtr& grid) {
  namespace fs = std::filesystem;
  const json j = load_json(json_path);
  const fs::path base = fs::path(json_path).parent_path();
  const std::string kind = require(j, "kind", json_path).get<std::string>();
  const double alpha = require(j, "alpha", json_path).get<double>();
  ScalarField a =
      read_field_csv((base / require(j, "a", json_path).get<std::string>()).string(), grid);
  if (kind == "weighted_isotropic") {
    try {
      return make_isotropic_metric(std::move(a), alpha);
    } catch (const std::exception& e) {
      throw std::runtime_error(json_path + ": " + e.what());
    }
  }
  if (kind != "riemannian")
    throw std::runtime_error(json_path + ": unknown metric kind '" + kind + "'");

  const std::string spath =
      (base / require(j, "sigma0", json_path).get<std::string>()).string();
  std::ifstream in(spath);
  if (!in) throw std::runtime_error(spath + ": cannot open file");
  const Grid& g = *grid;
  const auto n = static_cast<std::size_t>(g.cell_count());
  std::vector<double> s11(n, 0.0), s12(n, 0.0), s22(n, 0.0);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != 6)
      throw std::runtime_error(spath + ": expected 6 columns (i,j,s11,s12,s21,s22)");
    const int i = static_cast<int>(parse_double(tok[0], spath));
    const int jj = static_cast<int>(parse_double(tok[1], spath));
    if (!grid->in_bounds(i, jj)) throw std::runtime_error(spath + ": cell index out of range");
    const int c = grid->idx(i, jj);
    s11[c] = parse_double(tok[2], spath);
    s12[c] = parse_double(tok[3], spath);
    const double s21 = parse_double(tok[4], spath);
    s22[c] = parse_double(tok[5], spath);
    if (s21 != s12[c]) throw std::runtime_error(spath + ": sigma0 must be symmetric (s12 == s21)");
    ++rows;
  }
  if (rows != n) throw std::runtime_error(spath + ": expected one row per cell");
  try {
    return make_riemannian_metric(std::move(a), std::move(s11), std::move(s12), std::move(s22),
                                  alpha);
  } catch (const std::exception& e) {
    throw std::runtime_error(json_path + ": " + e.what());
  }
}

void write_solver_config_json(const std::string& path, const SolverConfig& cfg) {
  json j;
  j["max_iters"] = cfg.max_iters;
  j["tol"] = cfg.tol;
  j["tau"] = cfg.tau;
  j["s"] = cfg.s;
  j["theta_relax"] = cfg.theta_relax;
  j["check_every"] = cfg.check_every;
  j["init"] = cfg.init == SolverConfig::Init::Zero
                  ? "zero"
                  : (cfg.init == SolverConfig::Init::Random ? "random" : "g_extension");
  j["seed"] = cfg.seed;
  save_text(path, j.dump(2) + "\n");
}

SolverConfig read_solver_config_json(const std::string& path) {
  const json j = load_json(path);
  SolverConfig cfg;
  if (j.contains("max_iters")) cfg.max_iters = j["max_iters"].get<int>();
  if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
  if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
  if (j.contains("s")) cfg.s = j["s"].get<double>();
  if (j.contains("theta_relax")) cfg.theta_relax = j["theta_relax"].get<double>();
  if (j.contains("check_every")) cfg.check_every = j["check_every"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("init")) {
    const std::string init = j["init"].get<std::string>();
    if (init == "zero")
      cfg.init = SolverConfig::Init::Zero;
    else if (init == "random")
      cfg.init = SolverConfig::Init::Random;
    else if (init == "g_extension")
      cfg.init = SolverConfig::Init::GExtension;
    else
      throw std::runtime_error(path + ": unknown init '" + init + "'");
  }
  return cfg;
}

void write_solve_report_json(const std::string& path, const SolveReport& rep) {
  json j;
  j["iterations"] = rep.iterations;
  j["relative_gap"] = rep.relative_gap;
  j["objective"] = rep.objective;
  j["converged"] = rep.converged;
  j["boundary_mismatch_sup"] = rep.boundary_mismatch_sup;
  j["objective_history"] = rep.objective_history;
  save_text(path, j.dump(2) + "\n");
}

}  // namespace lg
