#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cavity/assembly.hpp"
#include "cavity/linalg.hpp"
#include "cavity/mesh.hpp"
#include "cavity/rheology.hpp"
#include "cavity/roof.hpp"
#include "cavity/spaces.hpp"

namespace cavity {

struct SolverParams {
  double c = 1.0;            ///< complementarity scaling, > 0
  double newton_tol = 1e-10; ///< residual tolerance relative to the load norm
  int max_iter = 50;
  bool continuation = false; ///< warm-start n > 1 solves from an n = 1 solve
};

struct BoundaryCondition {
  enum class Mode { kDirichlet, kNeumann };
  Mode mode = Mode::kDirichlet;
  double u_i = 1.0;    ///< top horizontal speed (Dirichlet)
  double tau_b = 0.0;  ///< top shear traction (Neumann)
  double N = 0.0;      ///< effective pressure
  /// When set, assemble the load from (p_i, p_w) separately instead of the
  /// effective-pressure form; the solution velocity and multiplier match the
  /// N = p_i - p_w form, with the pressure shifted by p_w.
  std::optional<std::pair<double, double>> split_pressures;
};

struct IterationRecord {
  int iter = 0;
  double r_u = 0.0, r_p = 0.0, r_lambda = 0.0;
  int active_count = 0;
  int halvings = 0;
};

/// Converged state of the discrete contact-Stokes system.
struct MixedSolution {
  Eigen::VectorXd u;       ///< velocity DoFs, N_v
  Eigen::VectorXd p;       ///< cell pressures, N_q
  Eigen::VectorXd lambda;  ///< multipliers on the attached edges, N_mu
  std::vector<int> attached_edges;
  std::vector<bool> active;  ///< contact-enforced subset of the attached edges
  int newton_iterations = 0;
  double residual_u = 0.0, residual_p = 0.0, residual_lambda = 0.0;

  // Discrete contact diagnostics at the solution.
  double max_lambda = 0.0;           ///< max_j lambda_j
  double max_normal_velocity = 0.0;  ///< max_j (gamma_n u)_j
  double max_complementarity = 0.0;  ///< max_j |lambda_j (gamma_n u)_j|
  double max_divergence = 0.0;       ///< ||B^T u||_inf

  std::vector<IterationRecord> history;
};

/// Elementwise lambda + max(0, -lambda + c un); zero exactly when the
/// discrete contact conditions hold.
Eigen::VectorXd complementarity_residual(const Eigen::VectorXd& lambda,
                                         const Eigen::VectorXd& un, double c);

/// Semi-smooth Newton solver for the mixed contact-Stokes system. One
/// instance per scenario; the symbolic factorization is reused across calls
/// while the active set and edge partition stay fixed.
class ContactSolver {
public:
  ContactSolver(const FunctionSpaces& spaces, SolverParams params)
      : spaces_(spaces), params_(std::move(params)) {}

  /// Solve on the given mesh and edge partition. `detached` flags per lower
  /// edge; `initial_guess` may come from a different partition (multipliers
  /// are matched by edge id).
  MixedSolution solve(const PeriodicMesh& mesh, const std::vector<bool>& detached,
                      const GlenRheology& rheo, const BoundaryCondition& bc,
                      const MixedSolution* initial_guess = nullptr);

private:
  MixedSolution solve_impl(const PeriodicMesh& mesh, const std::vector<bool>& detached,
                           const GlenRheology& rheo, const BoundaryCondition& bc,
                           const MixedSolution* initial_guess);

  const FunctionSpaces& spaces_;
  SolverParams params_;
  SparseLuSolver lu_;
};

}  // namespace cavity
