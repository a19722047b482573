#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "cavity/bed.hpp"
#include "cavity/roof.hpp"

namespace cavity {

/// Explicit upwind update of the roof: node i moves according to the
/// outward-normal edge-average velocity un_edges[i-1] on the edge
/// immediately upstream (ice flows in +x),
///
///   theta_i <- theta_i - dt sqrt(slope^2 + 1) un_upstream(i).
///
/// With the outward normal pointing out of the ice, nonpositive averages on
/// attached edges cannot push nodes below the bed. A zero edge velocity
/// leaves the downstream node bitwise unchanged.
CavityRoof advect_roof(const CavityRoof& roof, const BedProfile& bed,
                       const Eigen::VectorXd& un_edges, double dt);

/// theta_i <- max(theta_i, b(x_i)), assigning the bed value exactly on clip.
CavityRoof clip_to_bed(const CavityRoof& roof, const BedProfile& bed);

/// Trapezoid-rule cavity volume of (theta - b) over one period.
double cavity_volume(const CavityRoof& roof, const BedProfile& bed);

struct CavityEndpoints {
  double x_detach = 0.0;    ///< smaller contact-transition coordinate
  double x_reattach = 0.0;  ///< larger one
  bool multiple_cavities = false;
};

/// Contact-transition coordinates of the dominant cavity, or nullopt when
/// fully attached. The transitions are the last attached node before the
/// detached run and the first attached node after it; both are reported in
/// (0, 1] and sorted ascending, which is how a cavity wrapping the periodic
/// seam stays representable as two numbers.
std::optional<CavityEndpoints> cavity_endpoints(const CavityRoof& roof, const BedProfile& bed);

/// True when max|un| dt exceeds half the smallest node spacing.
bool cfl_violated(const CavityRoof& roof, const Eigen::VectorXd& un_edges, double dt);

}  // namespace cavity
