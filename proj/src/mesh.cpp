#include "cavity/mesh.hpp"

#include <cmath>
#include <fstream>

#include "cavity/errors.hpp"

namespace cavity {

double CavityRoof::interpolate(double xq) const {
  const int n = size();
  // Locate the edge containing xq; node coordinates are in [0, 1).
  if (xq >= x[n - 1]) {
    const double t = (xq - x[n - 1]) / (1.0 + x[0] - x[n - 1]);
    return theta[n - 1] + t * (theta[0] - theta[n - 1]);
  }
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (x[mid] <= xq ? lo : hi) = mid;
  }
  const double t = (xq - x[lo]) / (x[lo + 1] - x[lo]);
  return theta[lo] + t * (theta[lo + 1] - theta[lo]);
}

CavityRoof CavityRoof::attached(const BedProfile& bed, int n) {
  CavityRoof roof;
  roof.x.resize(n);
  roof.theta.resize(n);
  for (int i = 0; i < n; ++i) {
    roof.x[i] = static_cast<double>(i) / n;
    roof.theta[i] = bed(roof.x[i]);
  }
  return roof;
}

std::vector<bool> classify_edges(const CavityRoof& roof, const BedProfile& bed) {
  const int n = roof.size();
  std::vector<bool> detached(n);
  for (int e = 0; e < n; ++e) {
    const int i = roof.downstream_node(e);
    detached[e] = roof.theta[i] > bed(roof.x[i]);
  }
  return detached;
}

double PeriodicMesh::cell_area(int cell) const {
  const auto t = triangles.row(cell);
  const Eigen::Vector2d a = vertices.row(t[0]);
  const Eigen::Vector2d b = vertices.row(t[1]);
  const Eigen::Vector2d c = vertices.row(t[2]);
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Eigen::Vector2d PeriodicMesh::lower_edge_normal(int k, double* length) const {
  const auto& e = lower_edges[k];
  const Eigen::Vector2d a = vertices.row(e[0]);
  const Eigen::Vector2d b = vertices.row(e[1]);
  const Eigen::Vector2d d = b - a;
  const double len = d.norm();
  if (length) *length = len;
  // Rotate the left-to-right tangent by -90 degrees: points out of the ice.
  return Eigen::Vector2d(d.y() / len, -d.x() / len);
}

PeriodicMesh build_reference_mesh(int n_e, int n_layers, double H, double grading) {
  if (n_e < 4 || n_e % 2 != 0)
    throw ConfigError("build_reference_mesh: n_e must be even and >= 4");
  if (n_layers < 1) throw ConfigError("build_reference_mesh: n_layers must be >= 1");
  if (H <= 0.0) throw ConfigError("build_reference_mesh: H must be positive");
  if (grading < 1.0) throw ConfigError("build_reference_mesh: grading must be >= 1");

  PeriodicMesh mesh;
  mesh.n_e = n_e;
  mesh.n_layers = n_layers;
  mesh.H = H;

  // Row heights in geometric progression, smallest at the bed.
  Eigen::VectorXd y(n_layers + 1);
  y[0] = 0.0;
  double weight_sum = 0.0, w = 1.0;
  for (int j = 0; j < n_layers; ++j, w *= grading) weight_sum += w;
  double h = H / weight_sum;
  for (int j = 0; j < n_layers; ++j, h *= grading) y[j + 1] = y[j] + h;
  y[n_layers] = H;  // guard against accumulated rounding

  const int cols = n_e + 1;
  mesh.vertices.resize(cols * (n_layers + 1), 2);
  for (int j = 0; j <= n_layers; ++j)
    for (int i = 0; i < cols; ++i)
      mesh.vertices.row(j * cols + i) << static_cast<double>(i) / n_e, y[j];

  mesh.triangles.resize(2 * n_e * n_layers, 3);
  int cell = 0;
  for (int j = 0; j < n_layers; ++j) {
    for (int i = 0; i < n_e; ++i) {
      const int a = j * cols + i;
      const int b = a + 1;
      const int c = b + cols;
      const int d = a + cols;
      mesh.triangles.row(cell++) << a, b, c;
      mesh.triangles.row(cell++) << a, c, d;
    }
  }

  mesh.lower_edges.reserve(n_e);
  mesh.top_edges.reserve(n_e);
  const int top0 = n_layers * cols;
  for (int i = 0; i < n_e; ++i) {
    mesh.lower_edges.push_back({i, i + 1});
    mesh.top_edges.push_back({top0 + i, top0 + i + 1});
  }

  mesh.periodic_vertex_pairs.reserve(n_layers + 1);
  for (int j = 0; j <= n_layers; ++j)
    mesh.periodic_vertex_pairs.emplace_back(j * cols, j * cols + n_e);

  return mesh;
}

PeriodicMesh deform_mesh(const PeriodicMesh& reference, const CavityRoof& roof, double H) {
  if (roof.size() != reference.n_e)
    throw GeometryError("deform_mesh: roof node count does not match the mesh");
  PeriodicMesh mesh = reference;
  const int cols = reference.n_e + 1;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const int col = v % cols;
    const double th =
        (col < roof.size()) ? roof.theta[col] : roof.theta[0];  // right column wraps
    if (th >= H) throw GeometryError("deform_mesh: roof reaches the domain top");
    const double y_ref = reference.vertices(v, 1);
    mesh.vertices(v, 1) = th + y_ref * (H - th) / H;
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell_area(c) <= 0.0)
      throw GeometryError("deform_mesh: nonpositive area in cell " + std::to_string(c));
  }
  return mesh;
}

void dump_mesh(const PeriodicMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "vertices " << mesh.num_vertices() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out << mesh.vertices(v, 0) << " " << mesh.vertices(v, 1) << "\n";
  out << "triangles " << mesh.num_cells() << "\n";
  for (int c = 0; c < mesh.num_cells(); ++c)
    out << mesh.triangles(c, 0) << " " << mesh.triangles(c, 1) << " "
        << mesh.triangles(c, 2) << "\n";
}

}  // namespace cavity
