#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cavity/mesh.hpp"
#include "cavity/rheology.hpp"
#include "cavity/spaces.hpp"

namespace cavity {

using SpMat = Eigen::SparseMatrix<double>;

/// Multiplier coupling D_ij = \int_{e_j} v_i . n ds over the attached edges,
/// plus the attached-edge index list and edge lengths used to average.
struct ContactCoupling {
  SpMat D;                          ///< N_v x N_mu
  std::vector<int> attached_edges;  ///< lower-edge ids, left to right
  Eigen::VectorXd edge_lengths;     ///< per attached edge
};

/// Assembled pieces of the discrete saddle problem on one mesh.
struct DiscreteOperators {
  SpMat B;                 ///< divergence coupling, N_v x N_q
  ContactCoupling contact;
  Eigen::VectorXd f;       ///< load vector, N_v
  std::vector<std::pair<int, double>> dirichlet;  ///< velocity DoF -> value
};

/// B such that (B^T u)_cell = \int_cell div(u_h).
SpMat assemble_divergence(const PeriodicMesh& mesh, const FunctionSpaces& spaces);

/// Viscous residual [A(u)]_i = \int 2 eta(|eps(u)|) eps(u) : eps(v_i).
/// quad_degree in {4, 6}.
Eigen::VectorXd assemble_residual_A(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                    const GlenRheology& rheo, const Eigen::VectorXd& u,
                                    int quad_degree = 4);

/// Consistent tangent dA/du, symmetric.
SpMat assemble_jacobian_A(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                          const GlenRheology& rheo, const Eigen::VectorXd& u,
                          int quad_degree = 4);

/// Multiplier coupling over the attached edges of the given partition.
ContactCoupling assemble_contact_coupling(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                          const std::vector<bool>& detached);

/// Load in the effective-pressure form: f_i = \int_{top} tau_b v_i.e_x ds
/// - \int_{top} N v_i.n ds. Omit tau_b under the Dirichlet condition.
Eigen::VectorXd assemble_load(const PeriodicMesh& mesh, const FunctionSpaces& spaces, double N,
                              std::optional<double> tau_b);

/// Load in the split form with overburden p_i on top and water pressure p_w
/// along the whole lower boundary; equivalent to assemble_load with
/// N = p_i - p_w up to a constant pressure shift.
Eigen::VectorXd assemble_load_split(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                    double p_i, double p_w, std::optional<double> tau_b);

/// Average outward-normal velocity over each listed lower edge.
Eigen::VectorXd gamma_n(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                        const std::vector<int>& edges, const Eigen::VectorXd& u);

/// Same average over every lower edge (used to advect the roof).
Eigen::VectorXd gamma_n_all(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                            const Eigen::VectorXd& u);

/// Average horizontal velocity (arc-length integral / L) over the lower
/// boundary and the multiplier drag -sum_j lambda_j \int_{e_j} n_x ds.
double integrate_lower_horizontal(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                  const Eigen::VectorXd& u);
double multiplier_drag(const PeriodicMesh& mesh, const ContactCoupling& contact,
                       const Eigen::VectorXd& lambda);

/// Fix the horizontal velocity to u_i on the top boundary; clears the load
/// on the constrained DoFs.
void apply_dirichlet(DiscreteOperators& ops, const FunctionSpaces& spaces, double u_i);

}  // namespace cavity
