#include <doctest.h>

#include <cmath>
#include <random>

#include "cavity/mesh.hpp"
#include "cavity/errors.hpp"

using namespace cavity;

TEST_CASE("bed is periodic with amplitude r") {
  BedProfile bed{0.01};
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.99}) {
    CHECK(bed(x + 1.0) == doctest::Approx(bed(x)).epsilon(1e-14));
  }
  double max_abs = 0.0;
  for (int i = 0; i <= 1000; ++i) max_abs = std::max(max_abs, std::abs(bed(i / 1000.0)));
  CHECK(max_abs == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("reference mesh cell counts match the structured layout") {
  CHECK(build_reference_mesh(16, 3, 1.0, 2.0).num_cells() == 96);
  CHECK(build_reference_mesh(192, 19, 1.0, 2.0).num_cells() == 7296);
  const PeriodicMesh small = build_reference_mesh(4, 1, 1.0, 1.0);
  CHECK(small.num_cells() == 8);
  CHECK(small.lower_edges.size() == 4);
}

TEST_CASE("invalid mesh parameters are rejected") {
  CHECK_THROWS_AS(build_reference_mesh(3, 1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_reference_mesh(6, 0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_reference_mesh(6, 1, -1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_reference_mesh(6, 1, 1.0, 0.5), ConfigError);
}

TEST_CASE("all reference cells have positive area and graded layers sum to H") {
  const PeriodicMesh mesh = build_reference_mesh(8, 4, 1.0, 1.5);
  for (int c = 0; c < mesh.num_cells(); ++c) CHECK(mesh.cell_area(c) > 0.0);
  // topmost row of vertices sits exactly at H
  for (const auto& e : mesh.top_edges) {
    CHECK(mesh.vertices(e[0], 1) == 1.0);
  }
  // graded: first layer shorter than last
  const double h0 = mesh.vertices((8 + 1) * 1, 1);
  CHECK(h0 < 1.0 / 4.0);
}

TEST_CASE("deform maps bottom to the roof and keeps the top fixed") {
  const PeriodicMesh reference = build_reference_mesh(8, 2, 1.0, 1.0);
  BedProfile flat{0.0};
  CavityRoof roof = CavityRoof::attached(flat, 8);

  SUBCASE("zero roof is the identity") {
    const PeriodicMesh deformed = deform_mesh(reference, roof, 1.0);
    CHECK((deformed.vertices - reference.vertices).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("constant roof shifts the bottom and fixes the top") {
    roof.theta.setConstant(0.1);
    const PeriodicMesh deformed = deform_mesh(reference, roof, 1.0);
    CHECK(deformed.vertices(0, 1) == doctest::Approx(0.1).epsilon(1e-15));
    const int top_left = deformed.top_edges.front()[0];
    CHECK(deformed.vertices(top_left, 1) == 1.0);
    for (int c = 0; c < deformed.num_cells(); ++c) CHECK(deformed.cell_area(c) > 0.0);
  }

  SUBCASE("roof at H is rejected") {
    roof.theta.setConstant(1.0);
    CHECK_THROWS_AS(deform_mesh(reference, roof, 1.0), GeometryError);
  }
}

TEST_CASE("deformed meshes keep positive areas for random admissible roofs") {
  const PeriodicMesh reference = build_reference_mesh(16, 3, 1.0, 2.0);
  BedProfile bed{0.05};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lift(0.0, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    CavityRoof roof = CavityRoof::attached(bed, 16);
    for (int i = 0; i < roof.size(); ++i) roof.theta[i] += lift(rng);
    const PeriodicMesh deformed = deform_mesh(reference, roof, 1.0);
    for (int c = 0; c < deformed.num_cells(); ++c) CHECK(deformed.cell_area(c) > 0.0);
  }
}

TEST_CASE("classification detaches exactly the edges with a lifted downstream node") {
  BedProfile bed{0.01};
  CavityRoof roof = CavityRoof::attached(bed, 16);

  SUBCASE("fully attached") {
    const auto detached = classify_edges(roof, bed);
    CHECK(count_detached(detached) == 0);
  }

  SUBCASE("one lifted node detaches only its upstream edge") {
    roof.theta[5] += 1e-3;
    const auto detached = classify_edges(roof, bed);
    CHECK(count_detached(detached) == 1);
    CHECK(detached[4]);  // edge spanning nodes 4 -> 5
    CHECK_FALSE(detached[5]);
  }

  SUBCASE("wrap-around edge classifies by node 0") {
    roof.theta[0] += 1e-9;
    const auto detached = classify_edges(roof, bed);
    CHECK(count_detached(detached) == 1);
    CHECK(detached[15]);
  }
}

TEST_CASE("classification is exact at the bed and idempotent") {
  BedProfile bed{0.02};
  CavityRoof roof = CavityRoof::attached(bed, 32);
  roof.theta[3] += 5e-16;  // one ulp-scale lift still counts as detached
  const auto first = classify_edges(roof, bed);
  CHECK(count_detached(first) == 1);
  const auto second = classify_edges(roof, bed);
  CHECK(first == second);
}

TEST_CASE("mesh construction is deterministic") {
  const PeriodicMesh a = build_reference_mesh(12, 3, 1.0, 1.7);
  const PeriodicMesh b = build_reference_mesh(12, 3, 1.0, 1.7);
  CHECK((a.vertices - b.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.triangles - b.triangles).cwiseAbs().maxCoeff() == 0);
}
