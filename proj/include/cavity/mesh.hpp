#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cavity/roof.hpp"

namespace cavity {

/// Triangulation of the periodic strip [0,1] x [roof, H].
///
/// The right boundary column x = 1 duplicates the left column geometrically;
/// the two are identified through periodic_vertex_pairs when building
/// function spaces. Vertices are numbered row-major from the lower boundary
/// up, so lower-boundary vertex k sits at x = k/n_e and lower edge k spans
/// vertices (k, k+1), matching the roof's edge numbering.
struct PeriodicMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;  ///< CCW vertex triples

  std::vector<std::array<int, 2>> lower_edges;  ///< left-to-right
  std::vector<std::array<int, 2>> top_edges;    ///< left-to-right
  std::vector<std::pair<int, int>> periodic_vertex_pairs;  ///< (left, right)

  int n_e = 0;
  int n_layers = 0;
  double H = 1.0;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_cells() const { return static_cast<int>(triangles.rows()); }

  double cell_area(int cell) const;

  /// Outward normal (pointing out of the ice, downward) of lower edge k,
  /// together with the edge length.
  Eigen::Vector2d lower_edge_normal(int k, double* length = nullptr) const;
};

/// Structured triangulation of [0,1] x [0,H]: n_e uniform intervals in x and
/// n_layers rows whose heights grow geometrically with `grading` away from
/// the bed, each quad split into two triangles.
PeriodicMesh build_reference_mesh(int n_e, int n_layers, double H, double grading);

/// Map the reference strip onto the domain bounded below by the roof:
/// (x, y_ref) -> (x, theta(x) + y_ref (H - theta(x)) / H). The top boundary
/// stays at y = H. Throws GeometryError if the roof reaches the top or a
/// cell inverts.
PeriodicMesh deform_mesh(const PeriodicMesh& reference, const CavityRoof& roof, double H);

/// Plain-text dump (vertices then triangles, one record per line).
void dump_mesh(const PeriodicMesh& mesh, const std::string& path);

}  // namespace cavity
