#pragma once

#include <vector>

#include <Eigen/Core>

#include "cavity/bed.hpp"

namespace cavity {

/// Piecewise-linear cavity roof on the periodic strip.
///
/// Nodes are (x[i], theta[i]) with x strictly increasing, x[0] = 0 and
/// period 1. Edge i spans node i to node (i+1) mod n; its downstream node
/// (ice flows in +x) is node (i+1) mod n. The roof equals the bed where the
/// ice is attached and lies strictly above it where a cavity has opened.
struct CavityRoof {
  Eigen::VectorXd x;      ///< node coordinates, size n
  Eigen::VectorXd theta;  ///< roof heights, size n

  int size() const { return static_cast<int>(x.size()); }

  /// Downstream node index of edge i.
  int downstream_node(int edge) const { return (edge + 1) % size(); }

  /// Length of the x-interval covered by edge i (wraps at the period).
  double dx(int edge) const {
    const int n = size();
    return (edge + 1 < n) ? x[edge + 1] - x[edge] : 1.0 + x[0] - x[n - 1];
  }

  /// Roof slope on edge i.
  double edge_slope(int edge) const {
    const int n = size();
    const double dtheta = theta[downstream_node(edge)] - theta[edge % n];
    return dtheta / dx(edge);
  }

  /// Piecewise-linear interpolant, valid for x in [0, 1].
  double interpolate(double xq) const;

  /// Roof that coincides with the bed everywhere (fully attached state).
  static CavityRoof attached(const BedProfile& bed, int n);
};

/// Edge partition of the lower boundary: detached[i] is true iff the
/// downstream node of edge i lies strictly above the bed. The comparison is
/// exact; clipping guarantees attached nodes carry the bed value bit for bit.
std::vector<bool> classify_edges(const CavityRoof& roof, const BedProfile& bed);

inline int count_detached(const std::vector<bool>& detached) {
  int k = 0;
  for (bool d : detached) k += d ? 1 : 0;
  return k;
}

}  // namespace cavity
