#pragma once

// Test-only evaluation helpers kept independent of the assembly kernels:
// P2 fields are evaluated through geometric barycentric coordinates and
// integrated with dense Gauss-Legendre rules (Duffy transform on triangles),
// so oracle values never reuse the production quadrature or gradient code.

#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "cavity/mesh.hpp"
#include "cavity/spaces.hpp"

namespace oracle {

/// Nodes and weights of the n-point Gauss-Legendre rule on [0,1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on Legendre polynomials over [-1,1].
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (t + 1.0);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// Integrate f(x, y) over a triangle via the Duffy transform with a dense
/// tensor Gauss rule; exact to machine precision for moderate-degree
/// polynomials.
inline double integrate_triangle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c,
                                 const std::function<double(double, double)>& f, int n = 12) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double area2 = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = x[i], v = x[j];
      const double xi = u, eta = v * (1.0 - u);  // Duffy: square -> triangle
      const double jac = (1.0 - u);
      const Eigen::Vector2d p = a + xi * (b - a) + eta * (c - a);
      sum += w[i] * w[j] * jac * f(p.x(), p.y());
    }
  }
  return sum * area2;
}

/// Integrate f(point) over a straight segment with a dense Gauss rule.
inline double integrate_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                const std::function<double(const Eigen::Vector2d&)>& f,
                                int n = 10) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += w[i] * f(a + x[i] * (b - a));
  return sum * (b - a).norm();
}

/// P2 field evaluation inside one cell from nodal values, going through
/// geometric barycentric coordinates.
inline double eval_p2(const cavity::PeriodicMesh& mesh, int cell,
                      const std::array<double, 6>& nodal, double px, double py) {
  const auto t = mesh.triangles.row(cell);
  const Eigen::Vector2d a = mesh.vertices.row(t[0]);
  const Eigen::Vector2d b = mesh.vertices.row(t[1]);
  const Eigen::Vector2d c = mesh.vertices.row(t[2]);
  auto tri_area = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                     const Eigen::Vector2d& r) {
    return 0.5 * ((q.x() - p.x()) * (r.y() - p.y()) - (r.x() - p.x()) * (q.y() - p.y()));
  };
  const double total = tri_area(a, b, c);
  const Eigen::Vector2d p(px, py);
  const double l0 = tri_area(p, b, c) / total;
  const double l1 = tri_area(a, p, c) / total;
  const double l2 = tri_area(a, b, p) / total;
  const double N[6] = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
                       4 * l0 * l1,       4 * l1 * l2,       4 * l2 * l0};
  double value = 0.0;
  for (int k = 0; k < 6; ++k) value += N[k] * nodal[k];
  return value;
}

/// Gather the six nodal values of one velocity component on a cell.
inline std::array<double, 6> cell_component(const cavity::FunctionSpaces& spaces, int cell,
                                            const Eigen::VectorXd& u, int comp) {
  std::array<double, 6> nodal;
  for (int k = 0; k < 6; ++k)
    nodal[k] = u[cavity::FunctionSpaces::dof(spaces.cell_nodes(cell, k), comp)];
  return nodal;
}

/// Central finite-difference gradient of a P2 component inside a cell.
inline Eigen::Vector2d fd_gradient(const cavity::PeriodicMesh& mesh, int cell,
                                   const std::array<double, 6>& nodal, double px, double py,
                                   double h = 1e-6) {
  const double fx1 = eval_p2(mesh, cell, nodal, px + h, py);
  const double fx0 = eval_p2(mesh, cell, nodal, px - h, py);
  const double fy1 = eval_p2(mesh, cell, nodal, px, py + h);
  const double fy0 = eval_p2(mesh, cell, nodal, px, py - h);
  return {(fx1 - fx0) / (2.0 * h), (fy1 - fy0) / (2.0 * h)};
}

}  // namespace oracle
