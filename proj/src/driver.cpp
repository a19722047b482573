#include "cavity/driver.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include <json.hpp>

#include "cavity/csv.hpp"
#include "cavity/errors.hpp"
#include "cavity/version.hpp"

namespace cavity {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json config_snapshot(const ParsedConfig& config) {
  const ScenarioConfig& sc = config.scenario;
  json j;
  j["bed"] = {{"r", sc.bed.r}};
  j["rheology"] = {{"n", sc.rheo.n}, {"A", sc.rheo.A}, {"delta_reg", sc.rheo.delta_reg}};
  j["mesh"] = {{"n_e", sc.n_e}, {"n_layers", sc.n_layers}, {"H", sc.H}, {"grading", sc.grading}};
  j["bc"] = {{"mode", sc.bc.mode == BoundaryCondition::Mode::kDirichlet ? "dirichlet" : "neumann"},
             {"u_i", sc.bc.u_i},
             {"tau_b", sc.bc.tau_b},
             {"N", sc.bc.N}};
  j["time"] = {{"dt", sc.dt}, {"t_end", sc.t_end}, {"steady_threshold", sc.steady_threshold}};
  j["solver"] = {{"c", sc.solver.c},
                 {"newton_tol", sc.solver.newton_tol},
                 {"max_iter", sc.solver.max_iter},
                 {"continuation", sc.solver.continuation}};
  j["output"] = {{"cadence", config.cadence},
                 {"snapshots", config.snapshots},
                 {"solver_log", config.solver_log}};
  if (!config.sweep_N.empty()) j["sweep"] = {{"N_values", config.sweep_N}, {"n_values", config.sweep_n}};
  if (config.has_unsteady_N0)
    j["unsteady"] = {{"N0", config.unsteady_N0},
                     {"amplitude", config.unsteady_amplitude},
                     {"frequency", config.unsteady_frequency},
                     {"t_end", config.unsteady_t_end}};
  return j;
}

void write_series(const TimeSeries& series, const std::string& path) {
  CsvWriter csv(path, {"t", "N", "tau_b", "u_b", "V", "x_detach", "x_reattach"});
  for (const auto& r : series.records)
    csv.row(r.t, r.N, r.tau_b, r.u_b, r.V, r.x_detach, r.x_reattach);
}

void append_snapshot(CsvWriter& csv, double t, const CavityRoof& roof) {
  for (int i = 0; i < roof.size(); ++i) csv.row(t, roof.x[i], roof.theta[i]);
}

void write_multiplier_profile(const MixedSolution& solution, const CavityRoof& roof,
                              const std::string& path) {
  CsvWriter csv(path, {"x", "lambda"});
  for (size_t j = 0; j < solution.attached_edges.size(); ++j) {
    const int e = solution.attached_edges[j];
    double mid = roof.x[e] + 0.5 * roof.dx(e);
    if (mid >= 1.0) mid -= 1.0;
    csv.row(mid, solution.lambda[static_cast<Eigen::Index>(j)]);
  }
}

void write_solver_log(const std::vector<std::vector<IterationRecord>>& history,
                      const std::string& path) {
  CsvWriter csv(path, {"step", "iter", "r_u", "r_p", "r_lambda", "active_count", "halvings"});
  for (size_t s = 0; s < history.size(); ++s)
    for (const auto& it : history[s])
      csv.row(static_cast<int>(s), it.iter, it.r_u, it.r_p, it.r_lambda, it.active_count,
              it.halvings);
}

struct OutputTracker {
  fs::path dir;
  std::vector<std::string>* listed;
  std::string file(const std::string& name) const {
    listed->push_back(name);
    return (dir / name).string();
  }
};

void run_steady_driver(const ParsedConfig& config, const OutputTracker& out,
                       std::vector<std::string>& notes) {
  ScenarioRunner runner(config.scenario);
  runner.keep_solver_history(config.solver_log);
  if (config.mesh_dump) dump_mesh(runner.mesh(), out.file("mesh.txt"));
  TimeSeries series;
  std::optional<CsvWriter> snapshots;
  if (config.snapshots)
    snapshots.emplace(out.file("roof_snapshots.csv"),
                      std::initializer_list<const char*>{"t", "x", "theta"});

  bool converged = false;
  CavityRoof solve_roof = runner.roof();
  try {
    const int max_steps =
        std::max(1, static_cast<int>(std::ceil(config.scenario.t_end / config.scenario.dt)));
    for (int k = 0; k < max_steps; ++k) {
      solve_roof = runner.roof();
      if (snapshots && k % config.cadence == 0)
        append_snapshot(*snapshots, runner.time(), solve_roof);
      series.records.push_back(runner.step());
      if (runner.roof_rate() < config.scenario.steady_threshold) {
        converged = true;
        break;
      }
    }
  } catch (...) {
    write_series(series, out.file("steady_series.csv.partial"));
    throw;
  }

  const StepRecord& last = series.records.back();
  write_series(series, out.file("steady_series.csv"));
  {
    CsvWriter csv(out.file("steady_summary.csv"),
                  {"n_e", "cells", "tau_b", "u_b", "x_detach", "x_reattach"});
    csv.row(config.scenario.n_e, 2 * config.scenario.n_e * config.scenario.n_layers, last.tau_b,
            last.u_b, last.x_detach, last.x_reattach);
  }
  if (snapshots) append_snapshot(*snapshots, runner.time(), runner.roof());
  write_multiplier_profile(*runner.last_solution(), solve_roof,
                           out.file("multiplier_profile.csv"));
  if (config.solver_log) write_solver_log(runner.solver_history(), out.file("solver_log.csv"));

  notes.push_back("steady: " + std::string(converged ? "converged" : "did not converge") +
                  " after " + std::to_string(series.records.size()) + " steps, tau_b = " +
                  format_g(last.tau_b) + ", u_b = " + format_g(last.u_b));
  if (!converged)
    throw NonconvergenceError("steady run: roof rate above threshold at t_end", {});
}

void run_sweep_driver(const ParsedConfig& config, const OutputTracker& out,
                      std::vector<std::string>& notes, int jobs) {
  if (config.sweep_N.empty())
    throw ConfigError("sweep: [sweep] N_values is required");

  struct ChainResult {
    double n = 0.0;
    std::vector<SweepPoint> points;
    std::optional<SlidingFit> fit;
    std::string fit_error;
  };

  auto run_chain = [&](double glen_n) {
    ChainResult chain;
    chain.n = glen_n;
    ScenarioConfig sc = config.scenario;
    sc.rheo.n = glen_n;
    chain.points = sweep_sliding_law(sc, config.sweep_N);
    try {
      chain.fit = fit_c0(chain.points, glen_n, sc.bed.r, sc.rheo.A);
    } catch (const ConfigError& err) {
      chain.fit_error = err.what();
    }
    return chain;
  };

  std::vector<ChainResult> chains;
  if (jobs > 1 && config.sweep_n.size() > 1) {
    std::vector<std::future<ChainResult>> futures;
    for (double n : config.sweep_n)
      futures.push_back(std::async(std::launch::async, run_chain, n));
    for (auto& f : futures) chains.push_back(f.get());
  } else {
    for (double n : config.sweep_n) chains.push_back(run_chain(n));
  }

  CsvWriter summary(out.file("sweep_summary.csv"), {"n", "r", "c0", "alpha", "points_used"});
  for (const auto& chain : chains) {
    const std::string tag = "_n" + format_g(chain.n);
    {
      CsvWriter csv(out.file("sliding_law" + tag + ".csv"),
                    {"N", "u_b", "tau_b", "u_b_scaled", "tau_scaled", "V"});
      for (const auto& p : chain.points)
        csv.row(p.N, p.u_b, p.tau_b, p.u_b_scaled, p.tau_scaled, p.V);
    }
    {
      CsvWriter csv(out.file("sweep_endpoints" + tag + ".csv"),
                    {"N", "x_detach", "x_reattach"});
      for (const auto& p : chain.points) csv.row(p.N, p.x_detach, p.x_reattach);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    summary.row(chain.n, config.scenario.bed.r, chain.fit ? chain.fit->c0 : nan,
                chain.fit ? chain.fit->alpha : nan, chain.fit ? chain.fit->points_used : 0);
    int failed = 0;
    for (const auto& p : chain.points) failed += p.converged ? 0 : 1;
    std::string note = "sweep n = " + format_g(chain.n) + ": " +
                       std::to_string(chain.points.size()) + " points";
    if (failed > 0) note += ", " + std::to_string(failed) + " not converged";
    note += chain.fit ? ", c0 = " + format_g(chain.fit->c0) : ", fit failed: " + chain.fit_error;
    notes.push_back(note);
  }
}

void run_unsteady_driver(const ParsedConfig& config, const OutputTracker& out,
                         std::vector<std::string>& notes) {
  if (!config.has_unsteady_N0)
    throw ConfigError("unsteady: [unsteady] N0 is required");

  std::optional<CsvWriter> snapshots;
  if (config.snapshots)
    snapshots.emplace(out.file("roof_snapshots.csv"),
                      std::initializer_list<const char*>{"t", "x", "theta"});
  int step_index = 0;
  auto on_step = [&](const ScenarioRunner& runner, const StepRecord& record) {
    if (snapshots && step_index % config.cadence == 0)
      append_snapshot(*snapshots, record.t, runner.roof());
    ++step_index;
  };

  UnsteadyResult result = run_unsteady(config.scenario, config.unsteady_N0,
                                       config.unsteady_amplitude, config.unsteady_frequency,
                                       config.unsteady_t_end, on_step);

  write_series(result.series, out.file("unsteady_series.csv"));
  {
    CsvWriter csv(out.file("hysteresis.csv"), {"t", "N", "u_b"});
    for (const auto& r : result.series.records) csv.row(r.t, r.N, r.u_b);
  }
  {
    CsvWriter csv(out.file("unsteady_initial.csv"),
                  {"N0", "tau_b0", "u_b0", "V0", "steady_steps"});
    csv.row(config.unsteady_N0, result.tau_b0, result.initial.u_b, result.initial.V,
            result.initial.steps);
  }
  notes.push_back("unsteady: initial steady in " + std::to_string(result.initial.steps) +
                  " steps (tau_b0 = " + format_g(result.tau_b0) + "), then " +
                  std::to_string(result.series.records.size()) + " oscillation steps");
}

}  // namespace

RunManifest dispatch(const std::string& subcommand, const ParsedConfig& config,
                     const std::string& out_dir, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.version = kVersion;
  OutputTracker out{out_dir, &manifest.outputs};

  auto finalize = [&](const std::string& manifest_name) {
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json j;
    j["subcommand"] = manifest.subcommand;
    j["version"] = manifest.version;
    j["wall_seconds"] = manifest.wall_seconds;
    j["outputs"] = manifest.outputs;
    j["convergence"] = manifest.convergence_notes;
    j["config"] = config_snapshot(config);
    std::ofstream(fs::path(out_dir) / manifest_name) << j.dump(2) << "\n";
  };

  try {
    if (subcommand == "steady") {
      run_steady_driver(config, out, manifest.convergence_notes);
    } else if (subcommand == "sweep") {
      run_sweep_driver(config, out, manifest.convergence_notes, jobs);
    } else if (subcommand == "unsteady") {
      run_unsteady_driver(config, out, manifest.convergence_notes);
    } else {
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
  } catch (const std::exception& err) {
    manifest.convergence_notes.push_back(std::string("error: ") + err.what());
    finalize("manifest.partial.json");
    throw;
  }

  finalize("manifest.json");
  return manifest;
}

}  // namespace cavity
