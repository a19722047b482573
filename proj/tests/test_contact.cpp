#include <doctest.h>

#include <cmath>

#include "cavity/contact.hpp"
#include "cavity/errors.hpp"
#include "cavity/scenarios.hpp"

using namespace cavity;

namespace {

struct Problem {
  PeriodicMesh reference;
  FunctionSpaces spaces;
  BedProfile bed;
  CavityRoof roof;
  PeriodicMesh mesh;
  std::vector<bool> detached;

  Problem(double r, int n_e, int n_layers, const CavityRoof* custom_roof = nullptr)
      : reference(build_reference_mesh(n_e, n_layers, 1.0, 2.0)),
        spaces(build_spaces(reference)),
        bed{r},
        roof(custom_roof ? *custom_roof : CavityRoof::attached(bed, n_e)),
        mesh(deform_mesh(reference, roof, 1.0)),
        detached(classify_edges(roof, bed)) {}
};

}  // namespace

TEST_CASE("complementarity residual branch values") {
  Eigen::VectorXd lambda(3), un(3);
  lambda << -0.5, 0.0, 0.2;
  un << 0.0, -0.3, 0.0;
  const Eigen::VectorXd r = complementarity_residual(lambda, un, 1.0);
  CHECK(r[0] == 0.0);  // attached, compressive
  CHECK(r[1] == 0.0);  // detaching, zero stress
  CHECK(r[2] == doctest::Approx(0.2));  // inadmissible tensile stress
  CHECK_THROWS_AS(complementarity_residual(lambda, Eigen::VectorXd::Zero(2), 1.0), ConfigError);
}

TEST_CASE("flat bed rigid translation is the exact solution") {
  Problem prob(0.0, 8, 2);
  GlenRheology newtonian{0.5, 1.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kDirichlet;
  bc.u_i = 1.0;
  bc.N = 0.3;

  ContactSolver solver(prob.spaces, SolverParams{});
  const MixedSolution sol = solver.solve(prob.mesh, prob.detached, newtonian, bc);

  for (int node = 0; node < prob.spaces.n_nodes; ++node) {
    CHECK(sol.u[FunctionSpaces::dof(node, 0)] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.u[FunctionSpaces::dof(node, 1)] == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  }
  for (int q = 0; q < prob.spaces.N_q; ++q)
    CHECK(sol.p[q] == doctest::Approx(0.3).epsilon(1e-9));
  for (int j = 0; j < sol.lambda.size(); ++j)
    CHECK(sol.lambda[j] == doctest::Approx(-0.3).epsilon(1e-9));

  const auto [tau_b, u_b] = basal_quantities(sol, prob.mesh, prob.spaces);
  CHECK(tau_b == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(u_b == doctest::Approx(1.0).epsilon(1e-10));

  // all edges stay in contact and the linear problem converges in one step
  for (bool a : sol.active) CHECK(a);
  CHECK(sol.newton_iterations == 1);

  // discrete contact conditions
  CHECK(sol.max_lambda <= 1e-8);
  CHECK(sol.max_normal_velocity <= 1e-8);
  CHECK(sol.max_complementarity <= 1e-8);
  CHECK(sol.max_divergence <= 1e-9);
}

TEST_CASE("dirichlet constraint residual is exactly zero on constrained DoFs") {
  Problem prob(0.01, 8, 2);
  GlenRheology newtonian{0.5, 1.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kDirichlet;
  bc.u_i = 1.0;
  bc.N = 0.5;
  ContactSolver solver(prob.spaces, SolverParams{});
  const MixedSolution sol = solver.solve(prob.mesh, prob.detached, newtonian, bc);
  for (int node : prob.spaces.top_nodes)
    CHECK(sol.u[FunctionSpaces::dof(node, 0)] == 1.0);
}

TEST_CASE("partially detached solve satisfies the discrete contact conditions") {
  // lift four nodes on the lee side to open a cavity by classification
  BedProfile bed{0.01};
  CavityRoof roof = CavityRoof::attached(bed, 16);
  for (int i = 12; i < 16; ++i) roof.theta[i] += 0.002 * std::sin((i - 11) * M_PI / 5.0);
  Problem prob(0.01, 16, 3, &roof);
  REQUIRE(count_detached(prob.detached) == 4);

  GlenRheology newtonian{0.5, 1.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kDirichlet;
  bc.u_i = 1.0;
  bc.N = 0.3;
  ContactSolver solver(prob.spaces, SolverParams{});
  const MixedSolution sol = solver.solve(prob.mesh, prob.detached, newtonian, bc);

  CHECK(sol.max_lambda <= 1e-8);
  CHECK(sol.max_normal_velocity <= 1e-8);
  CHECK(sol.max_complementarity <= 1e-8);
  CHECK(sol.max_divergence <= 1e-9);
  CHECK(sol.attached_edges.size() == 12);
}

TEST_CASE("converged solutions are independent of the complementarity scaling c") {
  BedProfile bed{0.01};
  CavityRoof roof = CavityRoof::attached(bed, 16);
  for (int i = 12; i < 16; ++i) roof.theta[i] += 0.001 * (i - 11);
  Problem prob(0.01, 16, 3, &roof);

  GlenRheology newtonian{0.5, 1.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kDirichlet;
  bc.u_i = 1.0;
  bc.N = 0.3;

  SolverParams params;
  params.c = 1.0;
  ContactSolver base(prob.spaces, params);
  const MixedSolution ref = base.solve(prob.mesh, prob.detached, newtonian, bc);
  for (double c : {0.1, 10.0}) {
    SolverParams alt = params;
    alt.c = c;
    ContactSolver solver(prob.spaces, alt);
    const MixedSolution sol = solver.solve(prob.mesh, prob.detached, newtonian, bc);
    CHECK((sol.u - ref.u).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((sol.p - ref.p).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((sol.lambda - ref.lambda).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("neumann mode reproduces the applied shear stress through the multiplier") {
  Problem prob(0.01, 16, 3);
  GlenRheology newtonian{0.5, 1.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kNeumann;
  bc.tau_b = 0.01;
  bc.N = 0.3;
  ContactSolver solver(prob.spaces, SolverParams{});
  const MixedSolution sol = solver.solve(prob.mesh, prob.detached, newtonian, bc);
  const auto [tau_b, u_b] = basal_quantities(sol, prob.mesh, prob.spaces);
  CHECK(std::abs(tau_b - bc.tau_b) <= 1e-10);
  CHECK(u_b > 0.0);
  // mass balance: per-cell divergence already below tolerance implies the
  // boundary flux balances
  CHECK(sol.max_divergence <= 1e-9);
}

TEST_CASE("effective-pressure and split-pressure loads agree up to a pressure shift") {
  Problem prob(0.01, 8, 2);
  GlenRheology newtonian{0.5, 1.0, 1e-10};

  BoundaryCondition n_form;
  n_form.mode = BoundaryCondition::Mode::kDirichlet;
  n_form.u_i = 1.0;
  n_form.N = 0.3;

  BoundaryCondition split = n_form;
  split.split_pressures = std::make_pair(1.3, 1.0);  // p_i - p_w = 0.3

  ContactSolver s1(prob.spaces, SolverParams{});
  ContactSolver s2(prob.spaces, SolverParams{});
  const MixedSolution a = s1.solve(prob.mesh, prob.detached, newtonian, n_form);
  const MixedSolution b = s2.solve(prob.mesh, prob.detached, newtonian, split);

  CHECK((a.u - b.u).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((a.lambda - b.lambda).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(((b.p - a.p).array() - 1.0).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("fully detached partitions raise a null-space error") {
  BedProfile bed{0.01};
  CavityRoof roof = CavityRoof::attached(bed, 8);
  roof.theta.array() += 0.05;  // everything lifted
  Problem prob(0.01, 8, 2, &roof);
  REQUIRE(count_detached(prob.detached) == 8);
  GlenRheology newtonian{0.5, 1.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kNeumann;
  bc.tau_b = 0.01;
  bc.N = 0.3;
  ContactSolver solver(prob.spaces, SolverParams{});
  CHECK_THROWS_AS(solver.solve(prob.mesh, prob.detached, newtonian, bc), NullSpaceError);
}

TEST_CASE("newton nonconvergence carries the residual history") {
  Problem prob(0.01, 8, 2);
  GlenRheology glen{0.5, 3.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kDirichlet;
  bc.u_i = 1.0;
  bc.N = 0.3;
  SolverParams params;
  params.max_iter = 1;
  params.continuation = false;
  ContactSolver solver(prob.spaces, params);
  try {
    solver.solve(prob.mesh, prob.detached, glen, bc);
    FAIL("expected NonconvergenceError");
  } catch (const NonconvergenceError& err) {
    CHECK_FALSE(err.residual_history.empty());
  }
}

TEST_CASE("nonlinear rheology converges with continuation and damping") {
  Problem prob(0.01, 16, 3);
  GlenRheology glen{0.5, 3.0, 1e-10};
  BoundaryCondition bc;
  bc.mode = BoundaryCondition::Mode::kDirichlet;
  bc.u_i = 1.0;
  bc.N = 0.3;
  SolverParams params;
  params.continuation = true;
  ContactSolver solver(prob.spaces, params);
  const MixedSolution sol = solver.solve(prob.mesh, prob.detached, glen, bc);
  CHECK(sol.max_lambda <= 1e-8);
  CHECK(sol.max_normal_velocity <= 1e-8);
  CHECK(sol.max_divergence <= 1e-9);
  const auto [tau_b, u_b] = basal_quantities(sol, prob.mesh, prob.spaces);
  CHECK(u_b > 0.5);
  CHECK(tau_b > 0.0);
}
