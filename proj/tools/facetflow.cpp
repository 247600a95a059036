// Command-line front end: scenario runs, invariant verification, facet
// trajectory extraction, oracle evaluation, mollifier sweeps, and run
// comparison. All numeric work lives in the library; this file only wires
// argument parsing, file handling, and exit codes:
//   0 success, 1 failed verification, 2 bad input, 3 solver failure.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "facetflow/facet_analysis.hpp"
#include "facetflow/oracles.hpp"
#include "facetflow/report.hpp"
#include "facetflow/scenario_io.hpp"
#include "facetflow/series_io.hpp"
#include "facetflow/solver.hpp"
#include "facetflow/verification.hpp"

namespace {

using namespace facetflow;

constexpr const char* kVersion = "facetflow 0.1.0";

bool is_archive(const std::string& path) {
  return std::filesystem::is_directory(path);
}

// Either load a finished archive or run the scenario file on the spot.
RunArchive obtain(const std::string& path, int snapshots, Scalar tol_prox) {
  if (is_archive(path)) return load_archive(path);
  Scenario sc = load_scenario_file(path);
  if (snapshots > 0) {
    const long steps = std::lround(sc.T / sc.dt);
    sc.snapshot_stride = std::max<long>(1, steps / snapshots);
  }
  if (tol_prox > 0) sc.solver.tol_prox = tol_prox;
  RunResult result = run(sc);
  return {std::move(sc), std::move(result.series)};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_run(const std::string& scn_path, const std::string& out_dir,
            int snapshots, Scalar tol_prox) {
  Scenario sc = load_scenario_file(scn_path);
  if (snapshots > 0) {
    const long steps = std::lround(sc.T / sc.dt);
    sc.snapshot_stride = std::max<long>(1, steps / snapshots);
  }
  if (tol_prox > 0) sc.solver.tol_prox = tol_prox;
  const RunResult result = run(sc);
  const Snapshot& last = result.series.back();
  std::cout << "scenario:      " << sc.name << "\n"
            << "method:        "
            << (sc.method == Method::prox ? "prox" : "regularized") << "\n"
            << "grid:          n=" << sc.n << " dt=" << sc.dt << " T=" << sc.T
            << "\n"
            << "snapshots:     " << result.series.snaps.size() << "\n"
            << "wall seconds:  " << result.wall_seconds << "\n"
            << "final t:       " << last.t << "\n"
            << "final energy:  " << last.diag.energy << "\n"
            << "final slope TV:" << last.diag.bv << "\n";
  if (!out_dir.empty()) {
    save_archive(out_dir, sc, result);
    std::cout << "archive:       " << out_dir << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& path, const std::string& second,
               const std::string& suite, Scalar tol) {
  const RunArchive a = obtain(path, 0, 0);
  std::vector<InvariantReport> reports;
  const bool want_all = suite == "all";
  if (want_all || suite == "bv")
    reports.push_back(check_bv_monotone(a.series, tol));
  if (want_all || suite == "convexity")
    reports.push_back(check_convexity(a.series, tol));
  if (want_all || suite == "energy")
    reports.push_back(check_energy_dissipation(a.series, a.scenario.graph, tol));
  if (want_all || suite == "flux")
    reports.push_back(check_flux_bound(a.series, a.scenario.graph, tol));
  if (suite == "contraction" || (want_all && !second.empty())) {
    if (second.empty())
      throw std::runtime_error(
          "contraction needs a second run: verify <a> <b> --suite contraction");
    const RunArchive b = obtain(second, 0, 0);
    reports.push_back(check_l2_contraction(a.series, b.series, tol));
  }
  std::cout << render_reports(reports);
  for (const auto& r : reports)
    if (r.status == InvariantStatus::fail) return 1;
  return 0;
}

int cmd_facets(const std::string& path, const std::string& out_file) {
  const RunArchive a = obtain(path, 0, 0);
  std::ostringstream csv;
  write_facet_trajectory(a.series, a.scenario.graph, csv);
  if (out_file.empty())
    std::cout << csv.str();
  else
    write_text(out_file, csv.str());
  return 0;
}

int cmd_oracle(const std::string& name, const std::vector<std::string>& at,
               Scalar center, int modes, const std::string& scn_path,
               int refine) {
  OracleSolution sol;
  if (name == "heat") {
    InitialSpec u0;  // defaults to the first sine mode
    Scalar A = 0, B = 0;
    if (!scn_path.empty()) {
      const Scenario sc = load_scenario_file(scn_path);
      u0 = sc.initial;
      A = sc.left.value(0);
      B = sc.right.value(0);
    }
    sol = heat_fourier(u0, A, B, modes);
  } else if (name == "tv-vee") {
    sol = tv_vee_facet(center);
  } else if (name == "one-sided") {
    if (scn_path.empty())
      throw std::runtime_error("oracle one-sided needs --scenario <file>");
    sol = one_sided_stationary(load_scenario_file(scn_path).initial);
  } else if (name == "fine-grid") {
    if (scn_path.empty())
      throw std::runtime_error("oracle fine-grid needs --scenario <file>");
    sol = fine_grid_reference(load_scenario_file(scn_path), refine);
  } else {
    throw std::runtime_error("unknown oracle '" + name +
                             "' (heat, tv-vee, one-sided, fine-grid)");
  }
  std::cout << "t,x,u,u_t\n";
  for (const std::string& point : at) {
    const auto comma = point.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("--at expects t,x pairs");
    const Scalar t = std::stod(point.substr(0, comma));
    const Scalar x = std::stod(point.substr(comma + 1));
    if (!sol.t_domain.contains(t, 1e-12))
      throw std::runtime_error("t outside the oracle validity window [" +
                               std::to_string(sol.t_domain.lo) + ", " +
                               std::to_string(sol.t_domain.hi) + "]");
    std::cout << t << ',' << x << ',' << sol.value(x, t) << ','
              << (sol.time_derivative ? sol.time_derivative(x, t)
                                      : std::numeric_limits<Scalar>::quiet_NaN())
              << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& scn_path, std::vector<Scalar> epsilons,
              const std::string& out_dir) {
  Scenario sc = load_scenario_file(scn_path);
  sc.method = Method::regularized;
  if (!epsilons.empty()) sc.epsilon_schedule = std::move(epsilons);
  const RunResult result = run(sc);
  std::cout << "epsilon,l2_to_finest\n";
  for (const auto& e : result.convergence)
    std::cout << e.epsilon << ',' << e.l2_to_finest << "\n";
  std::cout << "fitted order: " << fit_observed_order(result.convergence)
            << "\n";
  if (!out_dir.empty()) {
    save_archive(out_dir, sc, result);
    std::cout << "archive:      " << out_dir << "\n";
  }
  return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path,
                const std::string& oracle_name, Scalar center, int modes,
                int refine) {
  const RunArchive a = obtain(a_path, 0, 0);
  if (!oracle_name.empty()) {
    OracleSolution sol;
    const MonotoneGraph* facet_graph = nullptr;
    if (oracle_name == "heat") {
      sol = heat_fourier(a.scenario.initial, a.scenario.left.value(0),
                         a.scenario.right.value(0), modes);
    } else if (oracle_name == "tv-vee") {
      sol = tv_vee_facet(center);
      facet_graph = &a.scenario.graph;
    } else if (oracle_name == "one-sided") {
      sol = one_sided_stationary(a.scenario.initial);
    } else if (oracle_name == "fine-grid") {
      sol = fine_grid_reference(a.scenario, refine);
    } else {
      throw std::runtime_error("unknown oracle '" + oracle_name + "'");
    }
    std::cout << compare_with_oracle(a.series, sol, facet_graph);
    return 0;
  }
  if (b_path.empty())
    throw std::runtime_error("compare needs a second run or --oracle");
  const RunArchive b = obtain(b_path, 0, 0);
  std::cout << compare_runs(a.series, b.series);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-linear monotone diffusion workbench"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scn_path, out_path, second_path, suite = "all", oracle_name;
  std::vector<std::string> at_points;
  std::vector<Scalar> epsilons;
  Scalar tol = 0, tol_prox = 0, center = 0.5;
  int snapshots = 0, modes = 64, refine = 4;

  auto* run_cmd = app.add_subcommand("run", "run a scenario file");
  run_cmd->add_option("scenario", scn_path, "scenario file")->required();
  run_cmd->add_option("--out", out_path, "archive directory to write");
  run_cmd->add_option("--snapshots", snapshots,
                      "approximate number of stored snapshots");
  run_cmd->add_option("--tol-prox", tol_prox,
                      "implicit-step stopping tolerance override");

  auto* verify_cmd =
      app.add_subcommand("verify", "invariant suite over a run");
  verify_cmd->add_option("run", scn_path, "archive dir or scenario file")
      ->required();
  verify_cmd->add_option("second", second_path,
                         "second run (contraction suite)");
  verify_cmd->add_option("--suite", suite,
                         "all|bv|contraction|convexity|energy|flux");
  verify_cmd->add_option("--tol", tol, "margin tolerance override");

  auto* facets_cmd =
      app.add_subcommand("facets", "facet trajectory table of a run");
  facets_cmd->add_option("run", scn_path, "archive dir or scenario file")
      ->required();
  facets_cmd->add_option("--out", out_path, "write CSV here instead of stdout");

  auto* oracle_cmd =
      app.add_subcommand("oracle", "evaluate a reference solution");
  oracle_cmd->add_option("name", oracle_name, "heat|tv-vee|one-sided|fine-grid")
      ->required();
  oracle_cmd->add_option("--at", at_points, "t,x evaluation points")
      ->required();
  oracle_cmd->add_option("--center", center, "kink location (tv-vee)");
  oracle_cmd->add_option("--modes", modes, "series length (heat)");
  oracle_cmd->add_option("--scenario", second_path,
                         "scenario file (heat initial data, one-sided, fine-grid)");
  oracle_cmd->add_option("--refine", refine, "refinement factor (fine-grid)");

  auto* sweep_cmd = app.add_subcommand(
      "sweep-epsilon", "mollifier convergence sweep (explicit route)");
  sweep_cmd->add_option("scenario", scn_path, "scenario file")->required();
  sweep_cmd->add_option("--epsilons", epsilons,
                        "override the mollifier schedule")
      ->delimiter(',');
  sweep_cmd->add_option("--out", out_path, "archive directory to write");

  auto* compare_cmd =
      app.add_subcommand("compare", "difference table of two runs");
  compare_cmd->add_option("a", scn_path, "archive dir or scenario file")
      ->required();
  compare_cmd->add_option("b", second_path, "second run");
  compare_cmd->add_option("--oracle", oracle_name,
                          "compare against a reference instead");
  compare_cmd->add_option("--center", center, "kink location (tv-vee)");
  compare_cmd->add_option("--modes", modes, "series length (heat)");
  compare_cmd->add_option("--refine", refine, "refinement factor (fine-grid)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed())
      return cmd_run(scn_path, out_path, snapshots, tol_prox);
    if (verify_cmd->parsed())
      return cmd_verify(scn_path, second_path, suite, tol);
    if (facets_cmd->parsed()) return cmd_facets(scn_path, out_path);
    if (oracle_cmd->parsed())
      return cmd_oracle(oracle_name, at_points, center, modes, second_path,
                        refine);
    if (sweep_cmd->parsed()) return cmd_sweep(scn_path, epsilons, out_path);
    if (compare_cmd->parsed())
      return cmd_compare(scn_path, second_path, oracle_name, center, modes,
                         refine);
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const SolveError& e) {
    std::cerr << "solver error at t=" << e.t << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
