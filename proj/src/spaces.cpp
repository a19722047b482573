#include "cavity/spaces.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "cavity/errors.hpp"

namespace cavity {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey make_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

FunctionSpaces build_spaces(const PeriodicMesh& mesh) {
  const int nv = mesh.num_vertices();
  const int nc = mesh.num_cells();

  // Number the triangle edges in first-encounter order.
  std::map<EdgeKey, int> edge_ids;
  std::vector<std::array<int, 3>> cell_edges(nc);
  constexpr int local_edge[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int c = 0; c < nc; ++c) {
    for (int le = 0; le < 3; ++le) {
      const int a = mesh.triangles(c, local_edge[le][0]);
      const int b = mesh.triangles(c, local_edge[le][1]);
      auto [it, inserted] = edge_ids.try_emplace(make_key(a, b), static_cast<int>(edge_ids.size()));
      cell_edges[c][le] = it->second;
    }
  }
  const int n_edges = static_cast<int>(edge_ids.size());

  // P2 node ids: vertices first, then edge midpoints.
  const int n_p2 = nv + n_edges;
  std::vector<int> rep(n_p2);
  for (int i = 0; i < n_p2; ++i) rep[i] = i;

  // Identify periodic partners: right-column vertices with their left twins,
  // and midpoints of right-boundary edges with the matching left ones.
  std::vector<int> left_of(nv, -1);
  for (const auto& [l, r] : mesh.periodic_vertex_pairs) {
    rep[r] = l;
    left_of[r] = l;
  }
  for (const auto& [key, id] : edge_ids) {
    const int la = left_of[key.first];
    const int lb = left_of[key.second];
    if (la >= 0 && lb >= 0) {
      auto it = edge_ids.find(make_key(la, lb));
      if (it == edge_ids.end())
        throw GeometryError("build_spaces: periodic edge has no partner");
      rep[nv + id] = nv + it->second;
    }
  }

  // Compact numbering of representatives.
  std::vector<int> index(n_p2, -1);
  int n_unique = 0;
  for (int i = 0; i < n_p2; ++i)
    if (rep[i] == i) index[i] = n_unique++;
  auto compact = [&](int p2node) { return index[rep[p2node]]; };

  FunctionSpaces spaces;
  spaces.n_nodes = n_unique;
  spaces.N_v = 2 * n_unique;
  spaces.N_q = nc;

  spaces.cell_nodes.resize(nc, 6);
  for (int c = 0; c < nc; ++c) {
    for (int k = 0; k < 3; ++k) spaces.cell_nodes(c, k) = compact(mesh.triangles(c, k));
    for (int le = 0; le < 3; ++le) spaces.cell_nodes(c, 3 + le) = compact(nv + cell_edges[c][le]);
  }

  auto boundary_nodes = [&](const std::vector<std::array<int, 2>>& edges) {
    std::vector<std::array<int, 3>> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
      auto it = edge_ids.find(make_key(e[0], e[1]));
      if (it == edge_ids.end()) throw GeometryError("build_spaces: missing boundary edge");
      out.push_back({compact(e[0]), compact(e[1]), compact(nv + it->second)});
    }
    return out;
  };
  spaces.lower_edge_nodes = boundary_nodes(mesh.lower_edges);
  spaces.top_edge_nodes = boundary_nodes(mesh.top_edges);

  std::vector<int> top;
  for (const auto& e : spaces.top_edge_nodes) {
    top.push_back(e[0]);
    top.push_back(e[1]);
    top.push_back(e[2]);
  }
  std::sort(top.begin(), top.end());
  top.erase(std::unique(top.begin(), top.end()), top.end());
  spaces.top_nodes = std::move(top);

  return spaces;
}

}  // namespace cavity
