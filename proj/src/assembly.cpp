#include "cavity/assembly.hpp"

#include <cmath>
#include <string>

#include "cavity/errors.hpp"

namespace cavity {

namespace {

struct QuadPoint {
  double xi, eta, w;
};

// Degree-4 (6-point) and degree-6 (12-point) rules on the reference triangle
// (0,0)-(1,0)-(0,1); weights sum to 1 and scale with the cell area.
const std::vector<QuadPoint>& triangle_rule(int degree) {
  static const std::vector<QuadPoint> deg4 = {
      {0.445948490915965, 0.445948490915965, 0.223381589678011},
      {0.108103018168070, 0.445948490915965, 0.223381589678011},
      {0.445948490915965, 0.108103018168070, 0.223381589678011},
      {0.091576213509771, 0.091576213509771, 0.109951743655322},
      {0.816847572980459, 0.091576213509771, 0.109951743655322},
      {0.091576213509771, 0.816847572980459, 0.109951743655322},
  };
  static const std::vector<QuadPoint> deg6 = [] {
    std::vector<QuadPoint> pts;
    auto add3 = [&](double a, double w) {
      const double b = 1.0 - 2.0 * a;
      pts.push_back({a, a, w});
      pts.push_back({b, a, w});
      pts.push_back({a, b, w});
    };
    auto add6 = [&](double a, double b, double w) {
      const double c = 1.0 - a - b;
      pts.push_back({a, b, w});
      pts.push_back({b, a, w});
      pts.push_back({a, c, w});
      pts.push_back({c, a, w});
      pts.push_back({b, c, w});
      pts.push_back({c, b, w});
    };
    add3(0.249286745170910, 0.116786275726379);
    add3(0.063089014491502, 0.050844906370207);
    add6(0.310352451033784, 0.636502499121399, 0.082851075618374);
    return pts;
  }();
  if (degree <= 4) return deg4;
  return deg6;
}

// 3-point Gauss rule on [0,1].
struct EdgeQP {
  double t, w;
};
const std::array<EdgeQP, 3> kEdgeRule = {{
    {0.5 * (1.0 - std::sqrt(3.0 / 5.0)), 5.0 / 18.0},
    {0.5, 8.0 / 18.0},
    {0.5 * (1.0 + std::sqrt(3.0 / 5.0)), 5.0 / 18.0},
}};

// P2 shape values at barycentric (l0, l1, l2) = (1-xi-eta, xi, eta); node
// order v0, v1, v2, m01, m12, m20.
void p2_values(double xi, double eta, double N[6]) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  N[0] = l0 * (2.0 * l0 - 1.0);
  N[1] = l1 * (2.0 * l1 - 1.0);
  N[2] = l2 * (2.0 * l2 - 1.0);
  N[3] = 4.0 * l0 * l1;
  N[4] = 4.0 * l1 * l2;
  N[5] = 4.0 * l2 * l0;
}

// Reference-space gradients at (xi, eta); columns d/dxi, d/deta.
void p2_gradients(double xi, double eta, double dN[6][2]) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  dN[0][0] = -(4.0 * l0 - 1.0);
  dN[0][1] = -(4.0 * l0 - 1.0);
  dN[1][0] = 4.0 * l1 - 1.0;
  dN[1][1] = 0.0;
  dN[2][0] = 0.0;
  dN[2][1] = 4.0 * l2 - 1.0;
  dN[3][0] = 4.0 * (l0 - l1);
  dN[3][1] = -4.0 * l1;
  dN[4][0] = 4.0 * l2;
  dN[4][1] = 4.0 * l1;
  dN[5][0] = -4.0 * l2;
  dN[5][1] = 4.0 * (l0 - l2);
}

// Shape values along a straight edge parameterized by t in [0,1] for the
// (left vertex, right vertex, midpoint) trace.
void p2_edge_values(double t, double L[3]) {
  L[0] = (1.0 - t) * (1.0 - 2.0 * t);
  L[1] = t * (2.0 * t - 1.0);
  L[2] = 4.0 * t * (1.0 - t);
}

struct CellGeometry {
  double inv_jt[2][2];  // J^{-T}
  double det_j;
};

CellGeometry cell_geometry(const PeriodicMesh& mesh, int cell) {
  const auto t = mesh.triangles.row(cell);
  const double x0 = mesh.vertices(t[0], 0), y0 = mesh.vertices(t[0], 1);
  const double j00 = mesh.vertices(t[1], 0) - x0, j10 = mesh.vertices(t[1], 1) - y0;
  const double j01 = mesh.vertices(t[2], 0) - x0, j11 = mesh.vertices(t[2], 1) - y0;
  CellGeometry g;
  g.det_j = j00 * j11 - j01 * j10;
  // J^{-T} = adj(J)^T / det
  g.inv_jt[0][0] = j11 / g.det_j;
  g.inv_jt[0][1] = -j10 / g.det_j;
  g.inv_jt[1][0] = -j01 / g.det_j;
  g.inv_jt[1][1] = j00 / g.det_j;
  return g;
}

}  // namespace

SpMat assemble_divergence(const PeriodicMesh& mesh, const FunctionSpaces& spaces) {
  std::vector<Eigen::Triplet<double>> trips;
  const auto& rule = triangle_rule(4);
  double dN[6][2];
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    for (const auto& qp : rule) {
      p2_gradients(qp.xi, qp.eta, dN);
      const double w = qp.w * 0.5 * g.det_j;
      for (int a = 0; a < 6; ++a) {
        const double gx = g.inv_jt[0][0] * dN[a][0] + g.inv_jt[0][1] * dN[a][1];
        const double gy = g.inv_jt[1][0] * dN[a][0] + g.inv_jt[1][1] * dN[a][1];
        const int node = spaces.cell_nodes(c, a);
        trips.emplace_back(FunctionSpaces::dof(node, 0), c, w * gx);
        trips.emplace_back(FunctionSpaces::dof(node, 1), c, w * gy);
      }
    }
  }
  SpMat B(spaces.N_v, spaces.N_q);
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

namespace {

// Shared cell kernel for the viscous residual and tangent.
template <bool WithJacobian>
void viscous_assembly(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                      const GlenRheology& rheo, const Eigen::VectorXd& u, int quad_degree,
                      Eigen::VectorXd* residual, std::vector<Eigen::Triplet<double>>* trips) {
  const auto& rule = triangle_rule(quad_degree);
  double dN[6][2];
  double gx[6], gy[6];
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    int dofs[12];
    double ucoef[12];
    for (int a = 0; a < 6; ++a) {
      const int node = spaces.cell_nodes(c, a);
      dofs[2 * a] = FunctionSpaces::dof(node, 0);
      dofs[2 * a + 1] = FunctionSpaces::dof(node, 1);
      ucoef[2 * a] = u[dofs[2 * a]];
      ucoef[2 * a + 1] = u[dofs[2 * a + 1]];
    }
    for (const auto& qp : rule) {
      p2_gradients(qp.xi, qp.eta, dN);
      for (int a = 0; a < 6; ++a) {
        gx[a] = g.inv_jt[0][0] * dN[a][0] + g.inv_jt[0][1] * dN[a][1];
        gy[a] = g.inv_jt[1][0] * dN[a][0] + g.inv_jt[1][1] * dN[a][1];
      }
      double ux_x = 0, ux_y = 0, uy_x = 0, uy_y = 0;
      for (int a = 0; a < 6; ++a) {
        ux_x += ucoef[2 * a] * gx[a];
        ux_y += ucoef[2 * a] * gy[a];
        uy_x += ucoef[2 * a + 1] * gx[a];
        uy_y += ucoef[2 * a + 1] * gy[a];
      }
      const double exx = ux_x, eyy = uy_y, exy = 0.5 * (ux_y + uy_x);
      const double s = std::sqrt(exx * exx + eyy * eyy + 2.0 * exy * exy);
      const double eta = viscosity(rheo, s);
      if (!std::isfinite(eta))
        throw NumericError("viscous assembly: non-finite viscosity in cell " + std::to_string(c));
      const double w = qp.w * 0.5 * g.det_j;

      // eps(u) : eps(phi) for each local velocity DoF.
      double eps_dot[12];
      for (int a = 0; a < 6; ++a) {
        eps_dot[2 * a] = exx * gx[a] + exy * gy[a];
        eps_dot[2 * a + 1] = exy * gx[a] + eyy * gy[a];
      }

      if (residual) {
        for (int i = 0; i < 12; ++i) (*residual)[dofs[i]] += w * 2.0 * eta * eps_dot[i];
      }
      if constexpr (WithJacobian) {
        const double deta = viscosity_derivative(rheo, s);
        for (int i = 0; i < 12; ++i) {
          const int ai = i / 2, ci = i % 2;
          for (int j = 0; j < 12; ++j) {
            const int aj = j / 2, cj = j % 2;
            double pairing;
            if (ci == 0 && cj == 0)
              pairing = gx[ai] * gx[aj] + 0.5 * gy[ai] * gy[aj];
            else if (ci == 1 && cj == 1)
              pairing = gy[ai] * gy[aj] + 0.5 * gx[ai] * gx[aj];
            else if (ci == 0)
              pairing = 0.5 * gy[ai] * gx[aj];
            else
              pairing = 0.5 * gx[ai] * gy[aj];
            const double value =
                w * (2.0 * eta * pairing + 2.0 * deta * eps_dot[i] * eps_dot[j]);
            trips->emplace_back(dofs[i], dofs[j], value);
          }
        }
      }
    }
  }
}

}  // namespace

Eigen::VectorXd assemble_residual_A(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                    const GlenRheology& rheo, const Eigen::VectorXd& u,
                                    int quad_degree) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(spaces.N_v);
  viscous_assembly<false>(mesh, spaces, rheo, u, quad_degree, &r, nullptr);
  return r;
}

SpMat assemble_jacobian_A(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                          const GlenRheology& rheo, const Eigen::VectorXd& u, int quad_degree) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.num_cells()) * 144 * triangle_rule(quad_degree).size());
  viscous_assembly<true>(mesh, spaces, rheo, u, quad_degree, nullptr, &trips);
  SpMat J(spaces.N_v, spaces.N_v);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

ContactCoupling assemble_contact_coupling(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                          const std::vector<bool>& detached) {
  ContactCoupling cc;
  for (int e = 0; e < static_cast<int>(detached.size()); ++e)
    if (!detached[e]) cc.attached_edges.push_back(e);
  const int n_mu = static_cast<int>(cc.attached_edges.size());
  cc.edge_lengths.resize(n_mu);

  std::vector<Eigen::Triplet<double>> trips;
  double L[3];
  for (int j = 0; j < n_mu; ++j) {
    const int e = cc.attached_edges[j];
    double len = 0.0;
    const Eigen::Vector2d n = mesh.lower_edge_normal(e, &len);
    cc.edge_lengths[j] = len;
    const auto& nodes = spaces.lower_edge_nodes[e];
    for (const auto& qp : kEdgeRule) {
      p2_edge_values(qp.t, L);
      for (int a = 0; a < 3; ++a) {
        const double w = qp.w * len * L[a];
        trips.emplace_back(FunctionSpaces::dof(nodes[a], 0), j, w * n.x());
        trips.emplace_back(FunctionSpaces::dof(nodes[a], 1), j, w * n.y());
      }
    }
  }
  cc.D.resize(spaces.N_v, n_mu);
  cc.D.setFromTriplets(trips.begin(), trips.end());
  return cc;
}

namespace {

// Accumulate \int_edge (t v.e_x - p v.n) ds over a boundary edge list with
// outward normal `n_sign`-rotated from the left-to-right tangent.
void accumulate_boundary_load(const PeriodicMesh& mesh,
                              const std::vector<std::array<int, 2>>& edges,
                              const std::vector<std::array<int, 3>>& edge_nodes, bool outward_up,
                              double shear, double pressure, Eigen::VectorXd& f) {
  double L[3];
  for (size_t k = 0; k < edges.size(); ++k) {
    const Eigen::Vector2d a = mesh.vertices.row(edges[k][0]);
    const Eigen::Vector2d b = mesh.vertices.row(edges[k][1]);
    const Eigen::Vector2d d = b - a;
    const double len = d.norm();
    Eigen::Vector2d n = outward_up ? Eigen::Vector2d(-d.y(), d.x()) : Eigen::Vector2d(d.y(), -d.x());
    n /= len;
    const auto& nodes = edge_nodes[k];
    for (const auto& qp : kEdgeRule) {
      p2_edge_values(qp.t, L);
      for (int i = 0; i < 3; ++i) {
        const double w = qp.w * len * L[i];
        f[FunctionSpaces::dof(nodes[i], 0)] += w * (shear - pressure * n.x());
        f[FunctionSpaces::dof(nodes[i], 1)] += w * (-pressure * n.y());
      }
    }
  }
}

}  // namespace

Eigen::VectorXd assemble_load(const PeriodicMesh& mesh, const FunctionSpaces& spaces, double N,
                              std::optional<double> tau_b) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(spaces.N_v);
  accumulate_boundary_load(mesh, mesh.top_edges, spaces.top_edge_nodes, /*outward_up=*/true,
                           tau_b.value_or(0.0), N, f);
  return f;
}

Eigen::VectorXd assemble_load_split(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                    double p_i, double p_w, std::optional<double> tau_b) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(spaces.N_v);
  accumulate_boundary_load(mesh, mesh.top_edges, spaces.top_edge_nodes, /*outward_up=*/true,
                           tau_b.value_or(0.0), p_i, f);
  accumulate_boundary_load(mesh, mesh.lower_edges, spaces.lower_edge_nodes, /*outward_up=*/false,
                           0.0, p_w, f);
  return f;
}

Eigen::VectorXd gamma_n(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                        const std::vector<int>& edges, const Eigen::VectorXd& u) {
  Eigen::VectorXd un(static_cast<Eigen::Index>(edges.size()));
  double L[3];
  for (size_t j = 0; j < edges.size(); ++j) {
    double len = 0.0;
    const Eigen::Vector2d n = mesh.lower_edge_normal(edges[j], &len);
    const auto& nodes = spaces.lower_edge_nodes[edges[j]];
    double avg = 0.0;
    for (const auto& qp : kEdgeRule) {
      p2_edge_values(qp.t, L);
      double vx = 0.0, vy = 0.0;
      for (int a = 0; a < 3; ++a) {
        vx += L[a] * u[FunctionSpaces::dof(nodes[a], 0)];
        vy += L[a] * u[FunctionSpaces::dof(nodes[a], 1)];
      }
      avg += qp.w * (vx * n.x() + vy * n.y());
    }
    un[static_cast<Eigen::Index>(j)] = avg;  // weights sum to 1: already the edge average
  }
  return un;
}

Eigen::VectorXd gamma_n_all(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                            const Eigen::VectorXd& u) {
  std::vector<int> all(mesh.lower_edges.size());
  for (size_t e = 0; e < all.size(); ++e) all[e] = static_cast<int>(e);
  return gamma_n(mesh, spaces, all, u);
}

double integrate_lower_horizontal(const PeriodicMesh& mesh, const FunctionSpaces& spaces,
                                  const Eigen::VectorXd& u) {
  double total = 0.0;
  double L[3];
  for (size_t k = 0; k < mesh.lower_edges.size(); ++k) {
    const Eigen::Vector2d a = mesh.vertices.row(mesh.lower_edges[k][0]);
    const Eigen::Vector2d b = mesh.vertices.row(mesh.lower_edges[k][1]);
    const double len = (b - a).norm();
    const auto& nodes = spaces.lower_edge_nodes[k];
    for (const auto& qp : kEdgeRule) {
      p2_edge_values(qp.t, L);
      double vx = 0.0;
      for (int i = 0; i < 3; ++i) vx += L[i] * u[FunctionSpaces::dof(nodes[i], 0)];
      total += qp.w * len * vx;
    }
  }
  return total;  // L = 1
}

double multiplier_drag(const PeriodicMesh& mesh, const ContactCoupling& contact,
                       const Eigen::VectorXd& lambda) {
  double drag = 0.0;
  for (size_t j = 0; j < contact.attached_edges.size(); ++j) {
    const auto& e = mesh.lower_edges[contact.attached_edges[j]];
    const double dy = mesh.vertices(e[1], 1) - mesh.vertices(e[0], 1);
    drag -= lambda[static_cast<Eigen::Index>(j)] * dy;  // \int_e n_x ds = dy
  }
  return drag;  // L = 1
}

void apply_dirichlet(DiscreteOperators& ops, const FunctionSpaces& spaces, double u_i) {
  for (int node : spaces.top_nodes) {
    const int dof = FunctionSpaces::dof(node, 0);
    for (const auto& [d, v] : ops.dirichlet) {
      if (d == dof && v != u_i)
        throw ConfigError("apply_dirichlet: conflicting constraint on DoF " + std::to_string(d));
    }
    ops.dirichlet.emplace_back(dof, u_i);
    ops.f[dof] = 0.0;
  }
}

}  // namespace cavity
