#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "cavity/bed.hpp"
#include "cavity/contact.hpp"
#include "cavity/mesh.hpp"
#include "cavity/rheology.hpp"
#include "cavity/roof.hpp"
#include "cavity/spaces.hpp"
#include "cavity/surface.hpp"

namespace cavity {

/// Nondimensional run parameters. Lengths scale with the bed wavelength,
/// so the domain has unit period and H defaults to 1.
struct ScenarioConfig {
  BedProfile bed;
  GlenRheology rheo;
  int n_e = 16;
  int n_layers = 3;
  double H = 1.0;
  double grading = 2.0;
  BoundaryCondition bc;
  double dt = 0.01;
  double t_end = 20.0;
  double steady_threshold = 1e-4;
  SolverParams solver;
  int output_cadence = 1;
};

struct StepRecord {
  double t = 0.0;
  double N = 0.0;
  double tau_b = 0.0;
  double u_b = 0.0;
  double V = 0.0;
  double x_detach = std::numeric_limits<double>::quiet_NaN();
  double x_reattach = std::numeric_limits<double>::quiet_NaN();
  int newton_iterations = 0;
  bool cfl_warning = false;
  // contact diagnostics of the step's solve
  double max_lambda = 0.0, max_normal_velocity = 0.0, max_complementarity = 0.0,
         max_divergence = 0.0;
};

struct TimeSeries {
  std::vector<StepRecord> records;
};

/// Basal shear stress from the multiplier (tau_b = -1/L \int lambda n_x ds)
/// and sliding speed from the horizontal velocity over the whole lower
/// boundary (arc-length measure).
std::pair<double, double> basal_quantities(const MixedSolution& solution,
                                           const PeriodicMesh& mesh,
                                           const FunctionSpaces& spaces);

/// Runs Algorithm-1 steps: classify edges, solve the contact-Stokes system,
/// advect and clip the roof, deform the mesh. State persists between steps
/// so experiments can change the boundary condition mid-run.
class ScenarioRunner {
public:
  explicit ScenarioRunner(const ScenarioConfig& config);

  StepRecord step();

  double time() const { return t_; }
  const CavityRoof& roof() const { return roof_; }
  const PeriodicMesh& mesh() const { return mesh_; }
  const FunctionSpaces& spaces() const { return spaces_; }
  const MixedSolution* last_solution() const {
    return have_solution_ ? &solution_ : nullptr;
  }
  /// max_i |theta^{k+1} - theta^k| / dt of the most recent step.
  double roof_rate() const { return roof_rate_; }

  BoundaryCondition& bc() { return config_.bc; }
  const ScenarioConfig& config() const { return config_; }
  void reset_time() { t_ = 0.0; }

  /// Replace the roof (clipped to the bed) and rebuild the deformed mesh.
  void set_roof(const CavityRoof& roof);

  /// Per-solve iteration history, one entry per step when retention is on.
  void keep_solver_history(bool keep) { keep_history_ = keep; }
  const std::vector<std::vector<IterationRecord>>& solver_history() const {
    return history_;
  }

private:
  ScenarioConfig config_;
  PeriodicMesh reference_;
  FunctionSpaces spaces_;
  ContactSolver solver_;
  CavityRoof roof_;
  PeriodicMesh mesh_;
  MixedSolution solution_;
  bool have_solution_ = false;
  double t_ = 0.0;
  double roof_rate_ = std::numeric_limits<double>::infinity();
  bool keep_history_ = false;
  std::vector<std::vector<IterationRecord>> history_;
};

struct SteadyResult {
  TimeSeries series;
  CavityRoof roof;          ///< roof of the final solve
  MixedSolution solution;   ///< final solve
  double tau_b = 0.0, u_b = 0.0, V = 0.0;
  std::optional<CavityEndpoints> endpoints;
  int steps = 0;
  bool converged = false;
};

/// March until max_i |dtheta| / dt falls below config.steady_threshold or
/// t reaches t_end (converged = false in that case; the series is kept).
SteadyResult run_steady(const ScenarioConfig& config);

/// Same, continuing from the runner's current state (used by sweeps).
SteadyResult run_to_steady(ScenarioRunner& runner, double t_end);

struct SweepPoint {
  double N = 0.0, u_b = 0.0, tau_b = 0.0, V = 0.0;
  double u_b_scaled = 0.0;  ///< u_b / (A L N^n)
  double tau_scaled = 0.0;  ///< tau_b / (r N)
  double x_detach = std::numeric_limits<double>::quiet_NaN();
  double x_reattach = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

/// One steady state per effective pressure, visiting N_list in the given
/// order and warm-starting each point from the previous roof. Nonconvergent
/// points are flagged and the sweep continues.
std::vector<SweepPoint> sweep_sliding_law(const ScenarioConfig& config,
                                          const std::vector<double>& N_list);

struct SlidingFit {
  double alpha = 0.0;  ///< slope of (tau_b/(rN))^n vs (r/(AL)) u_b/N^n
  double c0 = 0.0;     ///< (2 pi)^(n+2) / (2 alpha)
  int points_used = 0;
};

/// Least-squares slope through the origin over the uncavitated (V = 0)
/// converged points.
SlidingFit fit_c0(const std::vector<SweepPoint>& points, double n, double r, double A);

struct UnsteadyResult {
  SteadyResult initial;   ///< steady state the oscillation starts from
  double tau_b0 = 0.0;    ///< shear stress held fixed during the run
  TimeSeries series;
};

/// Oscillating effective pressure N(t) = N0 (1 + a sin(2 pi f t)) under a
/// fixed Neumann shear tau_b0 taken from the initial steady solve.
UnsteadyResult run_unsteady(const ScenarioConfig& config, double N0, double amplitude,
                            double frequency, double t_end,
                            const std::function<void(const ScenarioRunner&, const StepRecord&)>&
                                on_step = nullptr);

}  // namespace cavity
