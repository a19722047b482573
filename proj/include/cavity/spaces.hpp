#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "cavity/mesh.hpp"

namespace cavity {

/// Degree-of-freedom maps for the mixed discretization: continuous
/// piecewise-quadratic vector velocities (two components per unique P2 node,
/// periodic pairs identified), piecewise-constant pressures (one per cell)
/// and piecewise-constant multipliers (one per attached lower edge; those are
/// indexed per solve, not here).
///
/// Connectivity only depends on the reference mesh, so one FunctionSpaces
/// object serves every deformed mesh of a run. Velocity DoF (node, comp) maps
/// to 2*node + comp.
struct FunctionSpaces {
  int n_nodes = 0;  ///< unique P2 nodes after periodic identification
  int N_v = 0;      ///< velocity DoFs = 2 * n_nodes
  int N_q = 0;      ///< pressure DoFs = cell count

  /// Per cell: compact indices of (v0, v1, v2, m01, m12, m20).
  Eigen::Matrix<int, Eigen::Dynamic, 6> cell_nodes;

  /// Per lower/top boundary edge: (left vertex, right vertex, midpoint).
  std::vector<std::array<int, 3>> lower_edge_nodes;
  std::vector<std::array<int, 3>> top_edge_nodes;

  /// Unique P2 nodes on the top boundary (for the Dirichlet condition).
  std::vector<int> top_nodes;

  static int dof(int node, int comp) { return 2 * node + comp; }
};

FunctionSpaces build_spaces(const PeriodicMesh& mesh);

}  // namespace cavity
