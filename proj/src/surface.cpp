#include "cavity/surface.hpp"

#include <cmath>

#include "cavity/errors.hpp"

namespace cavity {

CavityRoof advect_roof(const CavityRoof& roof, const BedProfile& bed,
                       const Eigen::VectorXd& un_edges, double dt) {
  (void)bed;
  if (dt <= 0.0) throw ConfigError("advect_roof: dt must be positive");
  const int n = roof.size();
  if (un_edges.size() != n)
    throw ConfigError("advect_roof: one edge velocity per lower edge required");

  CavityRoof next = roof;
  for (int i = 0; i < n; ++i) {
    const int e = (i - 1 + n) % n;  // upstream edge of node i
    const double slope = roof.edge_slope(e);
    const double metric = std::sqrt(slope * slope + 1.0);
    next.theta[i] = roof.theta[i] - dt * metric * un_edges[e];
  }
  return next;
}

CavityRoof clip_to_bed(const CavityRoof& roof, const BedProfile& bed) {
  CavityRoof clipped = roof;
  for (int i = 0; i < roof.size(); ++i) {
    const double b = bed(roof.x[i]);
    if (clipped.theta[i] < b) clipped.theta[i] = b;
  }
  return clipped;
}

double cavity_volume(const CavityRoof& roof, const BedProfile& bed) {
  const int n = roof.size();
  double volume = 0.0;
  for (int e = 0; e < n; ++e) {
    const int i = e;
    const int j = roof.downstream_node(e);
    const double gi = roof.theta[i] - bed(roof.x[i]);
    const double gj = roof.theta[j] - bed(roof.x[j]);
    volume += 0.5 * (gi + gj) * roof.dx(e);
  }
  return volume;
}

std::optional<CavityEndpoints> cavity_endpoints(const CavityRoof& roof, const BedProfile& bed) {
  const int n = roof.size();
  const std::vector<bool> detached = classify_edges(roof, bed);
  const int n_detached = count_detached(detached);
  if (n_detached == 0) return std::nullopt;
  if (n_detached == n) return CavityEndpoints{1.0, 1.0, false};  // no transitions left

  // Walk the edges cyclically starting just past an attached edge and gather
  // maximal detached runs as (first edge, length).
  int a0 = 0;
  while (detached[a0]) ++a0;
  std::vector<std::pair<int, int>> runs;
  int run_start = -1, run_len = 0;
  for (int s = 1; s <= n; ++s) {
    const int e = (a0 + s) % n;
    if (detached[e]) {
      if (run_len == 0) run_start = e;
      ++run_len;
    } else if (run_len > 0) {
      runs.emplace_back(run_start, run_len);
      run_len = 0;
    }
  }
  if (run_len > 0) runs.emplace_back(run_start, run_len);

  int best = 0;
  for (int k = 1; k < static_cast<int>(runs.size()); ++k)
    if (runs[k].second > runs[best].second) best = k;

  const int first_edge = runs[best].first;
  const int last_edge = (first_edge + runs[best].second - 1) % n;
  // contact transitions: upstream node of the first detached edge, and the
  // node just past the last detached node; x = 0 reports as 1
  double detach = roof.x[first_edge];
  double reattach = roof.x[(last_edge + 2) % n];
  if (detach == 0.0) detach = 1.0;
  if (reattach == 0.0) reattach = 1.0;
  CavityEndpoints ep;
  ep.x_detach = std::min(detach, reattach);
  ep.x_reattach = std::max(detach, reattach);
  ep.multiple_cavities = runs.size() > 1;
  return ep;
}

bool cfl_violated(const CavityRoof& roof, const Eigen::VectorXd& un_edges, double dt) {
  const int n = roof.size();
  double min_dx = roof.dx(0);
  for (int e = 1; e < n; ++e) min_dx = std::min(min_dx, roof.dx(e));
  return un_edges.cwiseAbs().maxCoeff() * dt > 0.5 * min_dx;
}

}  // namespace cavity
