#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leastgrad/bundle.hpp"
#include "leastgrad/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int cmd_solve(const std::string& bundle_path, const std::string& out_dir) {
  const lg::ProblemBundle b = lg::load_problem_bundle(bundle_path);
  auto [u, rep] = lg::solve_least_gradient(b.metric, b.boundary, b.config);
  fs::create_directories(out_dir);
  lg::write_field_csv((fs::path(out_dir) / "solution.csv").string(), u);
  lg::write_solve_report_json((fs::path(out_dir) / "report.json").string(), rep);
  std::printf("objective = %s, gap = %s, iterations = %d, converged = %s\n",
              lg::format_double(rep.objective).c_str(),
              lg::format_double(rep.relative_gap).c_str(), rep.iterations,
              rep.converged ? "yes" : "no");
  return rep.converged ? 0 : 2;
}

int cmd_cdii(const std::string& bundle_path, const std::string& out_dir) {
  const lg::CdiiBundle b = lg::load_cdii_bundle(bundle_path);
  auto [sigma_rec, rep] = lg::cdii_pipeline(b.sigma_true, b.boundary, b.config, b.cg_tol,
                                            b.grad_floor);
  fs::create_directories(out_dir);
  lg::write_field_csv((fs::path(out_dir) / "sigma_rec.csv").string(), sigma_rec);
  json j;
  j["u_rel_l2"] = rep.u_rel_l2;
  j["sigma_rel_l2"] = rep.sigma_rel_l2;
  j["cg_iterations"] = rep.cg_iterations;
  j["floor_activations"] = rep.floor_activations;
  j["excessive_floor"] = rep.excessive_floor;
  j["solve_converged"] = rep.solve_report.converged;
  j["solve_objective"] = rep.solve_report.objective;
  j["solve_relative_gap"] = rep.solve_report.relative_gap;
  std::ofstream out((fs::path(out_dir) / "report.json").string(), std::ios::binary);
  out << j.dump(2) << "\n";
  std::printf("sigma relative L2 error = %s, u relative L2 error = %s\n",
              lg::format_double(rep.sigma_rel_l2).c_str(),
              lg::format_double(rep.u_rel_l2).c_str());
  return rep.solve_report.converged ? 0 : 2;
}

int cmd_counterexample(double theta, double sigma, const std::string& out_dir) {
  lg::Counterexample ce(theta);
  fs::create_directories(out_dir);

  // Field dumps on the square window of D.
  lg::GridPtr square = lg::counterexample_grid_square(256);
  auto [a, J] = lg::counterexample_fields(ce, square);
  lg::ScalarField u = lg::counterexample_family(ce, sigma, square);
  lg::write_field_csv((fs::path(out_dir) / "a.csv").string(), a);
  lg::write_vector_csv((fs::path(out_dir) / "J.csv").string(), J);
  lg::write_field_csv((fs::path(out_dir) / "u_sigma.csv").string(), u);
  lg::write_grid_json((fs::path(out_dir) / "grid.json").string(), *square);

  json j;
  j["theta"] = theta;
  j["sigma"] = sigma;

  // Calibration residuals under refinement.
  json res = json::array();
  for (int n : {256, 512}) {
    lg::GridPtr g = lg::counterexample_grid_square(n);
    auto [an, Jn] = lg::counterexample_fields(ce, g);
    lg::ScalarField un = lg::counterexample_family(ce, sigma, g);
    res.push_back({{"n", n}, {"residual", lg::calibration_residual(an, Jn, un)}});
  }
  j["calibration_residuals"] = res;

  // Objective table on the 0.1-margin rectangle (the default Omega) and on a
  // lens-resolving rectangle where the family genuinely differs per cell.
  std::vector<double> sigmas{0.0, 0.5, 1.0};
  if (std::find(sigmas.begin(), sigmas.end(), sigma) == sigmas.end()) sigmas.push_back(sigma);
  lg::SolverConfig cfg = lg::suite_solver_config();
  {
    lg::GridPtr margin = lg::counterexample_grid_margin(1024);
    lg::NonuniquenessTable t = lg::nonuniqueness_demo(ce, margin, sigmas, cfg);
    j["margin_omega"] = {{"sigmas", t.sigmas},
                         {"objectives", t.objectives},
                         {"max_pairwise_gap", t.max_pairwise_gap},
                         {"tolerance", t.tolerance},
                         {"solver_objective", t.solver_objective}};
  }
  {
    const lg::CalibrationStudy study = lg::run_calibration_study(theta, {}, 1.5e-4, false, cfg);
    j["lens_omega"] = {{"sigmas", study.table.sigmas},
                       {"objectives", study.table.objectives},
                       {"max_pairwise_gap", study.table.max_pairwise_gap},
                       {"equality_tolerance", study.equality_tolerance},
                       {"perturbed_weight_gap", study.perturbed_gap}};
  }
  std::ofstream out((fs::path(out_dir) / "counterexample.json").string(), std::ios::binary);
  out << j.dump(2) << "\n";
  std::printf("wrote a.csv, J.csv, u_sigma.csv and counterexample.json to %s\n", out_dir.c_str());
  return 0;
}

int cmd_barrier(const std::string& bundle_path, const std::string& out_dir) {
  const lg::BarrierBundle b = lg::load_barrier_bundle(bundle_path);
  const lg::BarrierResult res = lg::barrier_indicator(b.metric, b.level_set, b.band_width);
  fs::create_directories(out_dir);
  lg::write_field_csv((fs::path(out_dir) / "indicator.csv").string(), res.indicator);
  json j;
  j["minimum"] = res.minimum;
  j["satisfied"] = res.minimum > 0.0;
  std::ofstream out((fs::path(out_dir) / "barrier.json").string(), std::ios::binary);
  out << j.dump(2) << "\n";
  std::printf("barrier condition: %s (minimum indicator = %s)\n",
              res.minimum > 0.0 ? "SATISFIED" : "VIOLATED",
              lg::format_double(res.minimum).c_str());
  return 0;
}

int cmd_check(const std::string& suite, std::uint64_t seed, const std::string& out_dir) {
  const auto names = lg::suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw std::runtime_error("unknown suite '" + suite + "'; available: " + list);
  }
  const lg::SuiteReport rep = lg::run_suite(suite, seed);
  const std::string text = rep.render();
  std::fputs(text.c_str(), stdout);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out((fs::path(out_dir) / (suite + "_report.txt")).string(), std::ios::binary);
    out << text;
  }
  return rep.pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"least gradient problems: weighted/anisotropic TV minimization tools"};
  app.require_subcommand(1);

  std::string bundle, out = ".", suite;
  std::uint64_t seed = 0;
  double sigma = 0.5, theta = 0.75;

  auto* solve = app.add_subcommand("solve", "solve a least gradient problem bundle");
  solve->add_option("--bundle", bundle, "bundle descriptor JSON")->required();
  solve->add_option("--out", out, "output directory");

  auto* cdii = app.add_subcommand("cdii", "run the conductivity-imaging pipeline");
  cdii->add_option("--bundle", bundle, "bundle descriptor JSON")->required();
  cdii->add_option("--out", out, "output directory");

  auto* ce = app.add_subcommand("counterexample", "emit the non-uniqueness construction");
  ce->add_option("--theta", theta, "family exponent in (1/2, 1)");
  ce->add_option("--sigma", sigma, "family parameter in [0, 1]");
  ce->add_option("--out", out, "output directory");

  auto* barrier = app.add_subcommand("barrier", "evaluate the barrier-condition indicator");
  barrier->add_option("--bundle", bundle, "bundle descriptor JSON")->required();
  barrier->add_option("--out", out, "output directory");

  auto* check = app.add_subcommand("check", "run a randomized property suite");
  check->add_option("--suite", suite, "suite name")->required();
  check->add_option("--seed", seed, "RNG seed")->required();
  check->add_option("--out", out, "output directory for the report");

  std::string check_out;  // only write a report when --out was given
  check->callback([&] { check_out = check->count("--out") ? out : ""; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(bundle, out);
    if (cdii->parsed()) return cmd_cdii(bundle, out);
    if (ce->parsed()) return cmd_counterexample(theta, sigma, out);
    if (barrier->parsed()) return cmd_barrier(bundle, out);
    if (check->parsed()) return cmd_check(suite, seed, check_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
