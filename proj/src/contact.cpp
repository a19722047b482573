#include "cavity/contact.hpp"

#include <algorithm>
#include <cmath>

#include "cavity/errors.hpp"

namespace cavity {

Eigen::VectorXd complementarity_residual(const Eigen::VectorXd& lambda,
                                         const Eigen::VectorXd& un, double c) {
  if (lambda.size() != un.size())
    throw ConfigError("complementarity_residual: length mismatch");
  return lambda.array() + (-lambda.array() + c * un.array()).max(0.0);
}

namespace {

// gamma_n as a sparse row per attached edge: the same 3-point Gauss average
// used by gamma_n(), expressed in the velocity DoFs.
struct GammaRows {
  // per edge: list of (dof, coeff)
  std::vector<std::vector<std::pair<int, double>>> rows;
};

GammaRows build_gamma_rows(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                           const std::vector<int>& attached_edges) {
  GammaRows gr;
  gr.rows.resize(attached_edges.size());
  const double g = std::sqrt(3.0 / 5.0);
  const double ts[3] = {0.5 * (1.0 - g), 0.5, 0.5 * (1.0 + g)};
  const double ws[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  for (size_t j = 0; j < attached_edges.size(); ++j) {
    const int e = attached_edges[j];
    const Eigen::Vector2d n = mesh.lower_edge_normal(e);
    const auto& nodes = spaces.lower_edge_nodes[e];
    double shape_int[3] = {0.0, 0.0, 0.0};
    for (int q = 0; q < 3; ++q) {
      const double t = ts[q];
      shape_int[0] += ws[q] * (1.0 - t) * (1.0 - 2.0 * t);
      shape_int[1] += ws[q] * t * (2.0 * t - 1.0);
      shape_int[2] += ws[q] * 4.0 * t * (1.0 - t);
    }
    for (int a = 0; a < 3; ++a) {
      gr.rows[j].emplace_back(FunctionSpaces::dof(nodes[a], 0), shape_int[a] * n.x());
      gr.rows[j].emplace_back(FunctionSpaces::dof(nodes[a], 1), shape_int[a] * n.y());
    }
  }
  return gr;
}

struct ResidualNorms {
  double r_u = 0.0, r_p = 0.0, r_lambda = 0.0;
  double total() const { return std::sqrt(r_u * r_u + r_p * r_p + r_lambda * r_lambda); }
};

}  // namespace

MixedSolution ContactSolver::solve(const PeriodicMesh& mesh, const std::vector<bool>& detached,
                                   const GlenRheology& rheo, const BoundaryCondition& bc,
                                   const MixedSolution* initial_guess) {
  if (params_.c <= 0.0) throw ConfigError("contact solver: c must be positive");
  if (params_.continuation && rheo.n > 1.0 && initial_guess == nullptr) {
    // Cold nonlinear starts walk up the flow exponent, each stage warm-
    // starting the next; one hop per two units of n keeps Newton in its
    // attraction basin.
    std::vector<double> ladder = {1.0};
    while (ladder.back() + 2.0 < rheo.n) ladder.push_back(ladder.back() + 2.0);
    ladder.push_back(rheo.n);
    MixedSolution stage;
    bool have_stage = false;
    for (double nk : ladder) {
      GlenRheology stage_rheo = rheo;
      stage_rheo.n = nk;
      stage = solve_impl(mesh, detached, stage_rheo, bc, have_stage ? &stage : nullptr);
      have_stage = true;
    }
    return stage;
  }
  return solve_impl(mesh, detached, rheo, bc, initial_guess);
}

MixedSolution ContactSolver::solve_impl(const PeriodicMesh& mesh,
                                        const std::vector<bool>& detached,
                                        const GlenRheology& rheo, const BoundaryCondition& bc,
                                        const MixedSolution* initial_guess) {
  const int N_v = spaces_.N_v;
  const int N_q = spaces_.N_q;

  DiscreteOperators ops;
  ops.B = assemble_divergence(mesh, spaces_);
  ops.contact = assemble_contact_coupling(mesh, spaces_, detached);
  if (bc.split_pressures) {
    ops.f = assemble_load_split(mesh, spaces_, bc.split_pressures->first,
                                bc.split_pressures->second,
                                bc.mode == BoundaryCondition::Mode::kNeumann
                                    ? std::optional<double>(bc.tau_b)
                                    : std::nullopt);
  } else {
    ops.f = assemble_load(mesh, spaces_, bc.N,
                          bc.mode == BoundaryCondition::Mode::kNeumann
                              ? std::optional<double>(bc.tau_b)
                              : std::nullopt);
  }
  if (bc.mode == BoundaryCondition::Mode::kDirichlet) apply_dirichlet(ops, spaces_, bc.u_i);

  const std::vector<int>& attached = ops.contact.attached_edges;
  const int N_mu = static_cast<int>(attached.size());
  if (N_mu == 0)
    throw NullSpaceError("contact solver: no attached edges; rigid modes are uncontrolled");

  const GammaRows gamma_rows = build_gamma_rows(mesh, spaces_, attached);

  std::vector<char> constrained(N_v, 0);
  Eigen::VectorXd dirichlet_value = Eigen::VectorXd::Zero(N_v);
  for (const auto& [dof, value] : ops.dirichlet) {
    constrained[dof] = 1;
    dirichlet_value[dof] = value;
  }

  // State, warm-started when a guess is given. Multipliers transfer by edge
  // id so partition changes between steps keep whatever λ survives.
  MixedSolution sol;
  sol.attached_edges = attached;
  sol.u = Eigen::VectorXd::Zero(N_v);
  sol.p = Eigen::VectorXd::Zero(N_q);
  sol.lambda = Eigen::VectorXd::Zero(N_mu);
  if (initial_guess != nullptr && initial_guess->u.size() == N_v) {
    sol.u = initial_guess->u;
    sol.p = initial_guess->p;
    for (int j = 0; j < N_mu; ++j) {
      auto it = std::find(initial_guess->attached_edges.begin(),
                          initial_guess->attached_edges.end(), attached[j]);
      if (it != initial_guess->attached_edges.end())
        sol.lambda[j] =
            initial_guess->lambda[it - initial_guess->attached_edges.begin()];
    }
  }
  for (int d = 0; d < N_v; ++d)
    if (constrained[d]) sol.u[d] = dirichlet_value[d];

  const double load_norm = ops.f.norm();
  const double threshold = std::max(params_.newton_tol * load_norm, 1e-12);

  auto compute_residuals = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                               const Eigen::VectorXd& lambda, Eigen::VectorXd& r_u,
                               Eigen::VectorXd& r_p, Eigen::VectorXd& r_lambda,
                               Eigen::VectorXd& un) {
    r_u = assemble_residual_A(mesh, spaces_, rheo, u) - ops.B * p -
          ops.contact.D * lambda - ops.f;
    for (int d = 0; d < N_v; ++d)
      if (constrained[d]) r_u[d] = u[d] - dirichlet_value[d];
    r_p = -(ops.B.transpose() * u);
    un = gamma_n(mesh, spaces_, attached, u);
    r_lambda = complementarity_residual(lambda, un, params_.c);
  };

  auto classify = [&](const Eigen::VectorXd& lambda, const Eigen::VectorXd& un) {
    std::vector<bool> active(N_mu);
    for (int j = 0; j < N_mu; ++j) active[j] = -lambda[j] + params_.c * un[j] >= 0.0;
    return active;
  };

  Eigen::VectorXd r_u, r_p, r_lambda, un;
  compute_residuals(sol.u, sol.p, sol.lambda, r_u, r_p, r_lambda, un);
  std::vector<bool> active = classify(sol.lambda, un);
  std::vector<bool> prev_active;
  std::vector<double> norm_history;

  const int total = N_v + N_q + N_mu;
  bool converged = false;
  for (int it = 0; it < params_.max_iter; ++it) {
    ResidualNorms norms{r_u.norm(), r_p.norm(), r_lambda.norm()};
    norm_history.push_back(norms.total());
    if (it > 0 && norms.r_u <= threshold && norms.r_p <= threshold &&
        norms.r_lambda <= threshold && active == prev_active) {
      sol.newton_iterations = it;
      sol.residual_u = norms.r_u;
      sol.residual_p = norms.r_p;
      sol.residual_lambda = norms.r_lambda;
      converged = true;
      break;
    }

    // Linearized saddle system in the increments (du, dp, dlambda).
    std::vector<Eigen::Triplet<double>> trips;
    const SpMat J = assemble_jacobian_A(mesh, spaces_, rheo, sol.u);
    trips.reserve(J.nonZeros() + 4 * ops.B.nonZeros() + 2 * ops.contact.D.nonZeros() +
                  8 * N_mu + N_v);
    for (int k = 0; k < J.outerSize(); ++k)
      for (SpMat::InnerIterator itj(J, k); itj; ++itj)
        if (!constrained[itj.row()]) trips.emplace_back(itj.row(), itj.col(), itj.value());
    for (int k = 0; k < ops.B.outerSize(); ++k)
      for (SpMat::InnerIterator itb(ops.B, k); itb; ++itb) {
        if (!constrained[itb.row()])
          trips.emplace_back(itb.row(), N_v + itb.col(), -itb.value());
        trips.emplace_back(N_v + itb.col(), itb.row(), -itb.value());
      }
    for (int k = 0; k < ops.contact.D.outerSize(); ++k)
      for (SpMat::InnerIterator itd(ops.contact.D, k); itd; ++itd)
        if (!constrained[itd.row()])
          trips.emplace_back(itd.row(), N_v + N_q + itd.col(), -itd.value());
    for (int d = 0; d < N_v; ++d)
      if (constrained[d]) trips.emplace_back(d, d, 1.0);
    // Multiplier rows carry both branch patterns so the sparsity structure
    // (and the symbolic factorization) survives active-set changes.
    for (int j = 0; j < N_mu; ++j) {
      const int row = N_v + N_q + j;
      for (const auto& [dof, coeff] : gamma_rows.rows[j])
        trips.emplace_back(row, dof, active[j] ? coeff : 0.0);
      trips.emplace_back(row, row, active[j] ? 0.0 : 1.0);
    }

    SpMat M(total, total);
    M.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd rhs(total);
    rhs.head(N_v) = -r_u;
    rhs.segment(N_v, N_q) = -r_p;
    for (int j = 0; j < N_mu; ++j)
      rhs[N_v + N_q + j] = active[j] ? -un[j] : -sol.lambda[j];

    lu_.factorize(M, "contact Newton step");
    const Eigen::VectorXd delta = lu_.solve(rhs);

    // Damped update: halve the step up to eight times on residual increase.
    const double current_norm = norms.total();
    double alpha = 1.0;
    int halvings = 0;
    Eigen::VectorXd u_new, p_new, lambda_new;
    Eigen::VectorXd ru_new, rp_new, rl_new, un_new;
    std::vector<bool> active_new;
    for (;;) {
      u_new = sol.u + alpha * delta.head(N_v);
      p_new = sol.p + alpha * delta.segment(N_v, N_q);
      lambda_new = sol.lambda + alpha * delta.tail(N_mu);
      for (int d = 0; d < N_v; ++d)
        if (constrained[d]) u_new[d] = dirichlet_value[d];
      compute_residuals(u_new, p_new, lambda_new, ru_new, rp_new, rl_new, un_new);
      active_new = classify(lambda_new, un_new);
      const double new_norm =
          std::sqrt(ru_new.squaredNorm() + rp_new.squaredNorm() + rl_new.squaredNorm());
      if (new_norm <= current_norm || halvings >= 8) break;
      alpha *= 0.5;
      ++halvings;
    }

    sol.u = std::move(u_new);
    sol.p = std::move(p_new);
    sol.lambda = std::move(lambda_new);
    r_u = std::move(ru_new);
    r_p = std::move(rp_new);
    r_lambda = std::move(rl_new);
    un = std::move(un_new);
    prev_active = active;
    active = std::move(active_new);

    sol.history.push_back(IterationRecord{it, r_u.norm(), r_p.norm(), r_lambda.norm(),
                                          static_cast<int>(std::count(active.begin(),
                                                                      active.end(), true)),
                                          halvings});
  }

  if (!converged)
    throw NonconvergenceError("contact solver: Newton did not converge within max_iter",
                              norm_history);

  sol.active = active;
  sol.max_lambda = sol.lambda.size() ? sol.lambda.maxCoeff() : 0.0;
  sol.max_normal_velocity = un.size() ? un.maxCoeff() : 0.0;
  sol.max_complementarity =
      un.size() ? (sol.lambda.array() * un.array()).abs().maxCoeff() : 0.0;
  sol.max_divergence = (ops.B.transpose() * sol.u).cwiseAbs().maxCoeff();
  return sol;
}

}  // namespace cavity
