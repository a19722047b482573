#include "cavity/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "cavity/errors.hpp"

namespace cavity {

std::pair<double, double> basal_quantities(const MixedSolution& solution,
                                           const PeriodicMesh& mesh,
                                           const FunctionSpaces& spaces) {
  double tau_b = 0.0;
  for (size_t j = 0; j < solution.attached_edges.size(); ++j) {
    const auto& e = mesh.lower_edges[solution.attached_edges[j]];
    const double dy = mesh.vertices(e[1], 1) - mesh.vertices(e[0], 1);
    tau_b -= solution.lambda[static_cast<Eigen::Index>(j)] * dy;
  }
  const double u_b = integrate_lower_horizontal(mesh, spaces, solution.u);
  return {tau_b, u_b};
}

ScenarioRunner::ScenarioRunner(const ScenarioConfig& config)
    : config_(config),
      reference_(build_reference_mesh(config.n_e, config.n_layers, config.H, config.grading)),
      spaces_(build_spaces(reference_)),
      solver_(spaces_, config.solver),
      roof_(CavityRoof::attached(config.bed, config.n_e)),
      mesh_(deform_mesh(reference_, clip_to_bed(roof_, config.bed), config.H)) {
  roof_ = clip_to_bed(roof_, config_.bed);
}

void ScenarioRunner::set_roof(const CavityRoof& roof) {
  roof_ = clip_to_bed(roof, config_.bed);
  mesh_ = deform_mesh(reference_, roof_, config_.H);
}

StepRecord ScenarioRunner::step() {
  const std::vector<bool> detached = classify_edges(roof_, config_.bed);

  solution_ = solver_.solve(mesh_, detached, config_.rheo, config_.bc,
                            have_solution_ ? &solution_ : nullptr);
  have_solution_ = true;
  if (keep_history_) history_.push_back(solution_.history);

  StepRecord record;
  record.t = t_;
  record.N = config_.bc.N;
  std::tie(record.tau_b, record.u_b) = basal_quantities(solution_, mesh_, spaces_);
  record.V = cavity_volume(roof_, config_.bed);
  if (auto ep = cavity_endpoints(roof_, config_.bed)) {
    record.x_detach = ep->x_detach;
    record.x_reattach = ep->x_reattach;
  }
  record.newton_iterations = solution_.newton_iterations;
  record.max_lambda = solution_.max_lambda;
  record.max_normal_velocity = solution_.max_normal_velocity;
  record.max_complementarity = solution_.max_complementarity;
  record.max_divergence = solution_.max_divergence;

  // Edge velocities for the roof update: the averages of the solve, with the
  // contact-enforced edges pinned to exactly zero so attached nodes stay put
  // bit for bit.
  Eigen::VectorXd un = gamma_n_all(mesh_, spaces_, solution_.u);
  for (size_t j = 0; j < solution_.attached_edges.size(); ++j)
    if (solution_.active[j]) un[solution_.attached_edges[j]] = 0.0;

  record.cfl_warning = cfl_violated(roof_, un, config_.dt);
  if (record.cfl_warning)
    std::cerr << "warning: advection CFL violated at t = " << t_
              << " (max |u_n| dt exceeds half the node spacing)\n";

  CavityRoof advected = clip_to_bed(advect_roof(roof_, config_.bed, un, config_.dt), config_.bed);
  roof_rate_ = (advected.theta - roof_.theta).cwiseAbs().maxCoeff() / config_.dt;
  roof_ = std::move(advected);
  mesh_ = deform_mesh(reference_, roof_, config_.H);
  t_ += config_.dt;
  return record;
}

SteadyResult run_to_steady(ScenarioRunner& runner, double t_end) {
  SteadyResult result;
  const double threshold = runner.config().steady_threshold;
  const double dt = runner.config().dt;
  const int max_steps =
      std::max(1, static_cast<int>(std::ceil((t_end - runner.time()) / dt)));
  CavityRoof solve_roof = runner.roof();
  for (int k = 0; k < max_steps; ++k) {
    solve_roof = runner.roof();
    result.series.records.push_back(runner.step());
    ++result.steps;
    if (runner.roof_rate() < threshold) {
      result.converged = true;
      break;
    }
  }
  const StepRecord& last = result.series.records.back();
  result.roof = solve_roof;
  result.solution = *runner.last_solution();
  result.tau_b = last.tau_b;
  result.u_b = last.u_b;
  result.V = last.V;
  result.endpoints = cavity_endpoints(solve_roof, runner.config().bed);
  return result;
}

SteadyResult run_steady(const ScenarioConfig& config) {
  ScenarioRunner runner(config);
  return run_to_steady(runner, config.t_end);
}

std::vector<SweepPoint> sweep_sliding_law(const ScenarioConfig& config,
                                          const std::vector<double>& N_list) {
  std::vector<SweepPoint> points;
  ScenarioRunner runner(config);
  for (double N : N_list) {
    runner.bc().N = N;
    SweepPoint point;
    point.N = N;
    try {
      SteadyResult steady = run_to_steady(runner, runner.time() + config.t_end);
      point.converged = steady.converged;
      point.tau_b = steady.tau_b;
      point.u_b = steady.u_b;
      point.V = steady.V;
      if (steady.endpoints) {
        point.x_detach = steady.endpoints->x_detach;
        point.x_reattach = steady.endpoints->x_reattach;
      }
    } catch (const SolverError& err) {
      std::cerr << "sweep: N = " << N << " failed: " << err.what() << "\n";
      point.converged = false;
    }
    point.u_b_scaled =
        point.u_b / (config.rheo.A * std::pow(N, config.rheo.n));
    point.tau_scaled = point.tau_b / (config.bed.r * N);
    points.push_back(point);
  }
  return points;
}

SlidingFit fit_c0(const std::vector<SweepPoint>& points, double n, double r, double A) {
  double sxy = 0.0, sxx = 0.0;
  int used = 0;
  for (const auto& p : points) {
    if (!p.converged || p.V != 0.0) continue;
    const double x = (r / A) * p.u_b / std::pow(p.N, n);
    const double y = std::pow(p.tau_b / (r * p.N), n);
    sxy += x * y;
    sxx += x * x;
    ++used;
  }
  if (used < 2)
    throw ConfigError("fit_c0: need at least two uncavitated sweep points");
  SlidingFit fit;
  fit.alpha = sxy / sxx;
  fit.c0 = std::pow(2.0 * M_PI, n + 2.0) / (2.0 * fit.alpha);
  fit.points_used = used;
  return fit;
}

UnsteadyResult run_unsteady(const ScenarioConfig& config, double N0, double amplitude,
                            double frequency, double t_end,
                            const std::function<void(const ScenarioRunner&,
                                                     const StepRecord&)>& on_step) {
  UnsteadyResult result;

  ScenarioConfig steady_config = config;
  steady_config.bc.N = N0;
  ScenarioRunner runner(steady_config);
  result.initial = run_to_steady(runner, steady_config.t_end);
  if (!result.initial.converged)
    throw NonconvergenceError("run_unsteady: initial steady state did not converge", {});
  result.tau_b0 = result.initial.tau_b;

  // Keep the runner (roof, mesh, warm start) and switch to the Neumann
  // condition with the steady state's own basal shear stress.
  runner.bc().mode = BoundaryCondition::Mode::kNeumann;
  runner.bc().tau_b = result.tau_b0;
  runner.reset_time();

  const double dt = config.dt;
  while (runner.time() < t_end - 0.5 * dt) {
    runner.bc().N = N0 * (1.0 + amplitude * std::sin(2.0 * M_PI * frequency * runner.time()));
    StepRecord record = runner.step();
    result.series.records.push_back(record);
    if (on_step) on_step(runner, record);
  }
  return result;
}

}  // namespace cavity
