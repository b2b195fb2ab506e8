#include "doctest.h"

#include <cmath>

#include "cslab/geometry.hpp"
#include "cslab/rng.hpp"

using namespace cslab;

TEST_CASE("radial projection basics") {
  auto rp = radial_project(Point3(2, 0, 0));
  CHECK(rp.direction == SimplexPoint(1, 0, 0));
  CHECK(rp.radius == 2.0);

  rp = radial_project(Point3(1, 1, 1));
  CHECK(rp.radius == 3.0);
  CHECK(rp.direction[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  rp = radial_project(Point3(0.2, 0.3, 0.5));
  CHECK(rp.radius == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rp.direction[1] == doctest::Approx(0.3).epsilon(1e-15));

  CHECK_THROWS_AS(radial_project(Point3(0, 0, 0)), Error);
  CHECK_THROWS_AS(radial_project(Point3(1e-301, 0, 0)), Error);
}

TEST_CASE("radial projection is scale invariant") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Point3 x(rng.uniform(1e-3, 5), rng.uniform(0, 5), rng.uniform(0, 5));
    const Real alpha = rng.uniform(1e-3, 100);
    const auto a = radial_project(x);
    const auto b = radial_project(alpha * x);
    CHECK((a.direction - b.direction).norm() < 1e-12);
    CHECK(b.radius == doctest::Approx(alpha * a.radius).epsilon(1e-12));
    // reconstruct
    CHECK((a.radius * a.direction - x).norm() < 1e-12 * (1 + x.norm()));
  }
}

TEST_CASE("order_compare on a face") {
  const auto face = SpeciesSubset::pair(0, 1);
  CHECK(order_compare(Point3(1, 2, 0), Point3(2, 3, 0), face) ==
        OrderRelation::AllStrict);
  CHECK(order_compare(Point3(1, 2, 0), Point3(1, 3, 0), face) ==
        OrderRelation::LeqStrictSomewhere);
  CHECK(order_compare(Point3(1, 2, 0), Point3(2, 1, 0), face) ==
        OrderRelation::Incomparable);
  CHECK(order_compare(Point3(1, 2, 0), Point3(1, 2, 0), face) ==
        OrderRelation::Equal);
  // Directional: the reverse relation comes from swapping the arguments.
  CHECK(order_compare(Point3(2, 3, 0), Point3(1, 2, 0), face) ==
        OrderRelation::Incomparable);
  CHECK_THROWS_AS(order_compare(Point3(1, 2, 0.5), Point3(2, 3, 0), face), Error);
}

TEST_CASE("make_grid counts and structure") {
  CHECK_THROWS_AS(make_grid(0), Error);
  CHECK_THROWS_AS(make_grid(1025), Error);

  const DeltaGrid g1 = make_grid(1);
  CHECK(g1.node_count() == 3);
  CHECK(g1.triangle_count() == 1);

  const DeltaGrid g2 = make_grid(2);
  CHECK(g2.node_count() == 6);
  CHECK(g2.triangle_count() == 4);

  const DeltaGrid g32 = make_grid(32);
  CHECK(g32.node_count() == 561);
  CHECK(g32.triangle_count() == 1024);

  // Independent count oracle: enumerate lattice points i+j+k = L directly.
  for (int level : {3, 8, 32}) {
    const DeltaGrid g = make_grid(level);
    long nodes = 0;
    for (int i = 0; i <= level; ++i)
      for (int j = 0; j <= level; ++j)
        for (int k = 0; k <= level; ++k)
          if (i + j + k == level) ++nodes;
    CHECK(g.node_count() == nodes);
    CHECK(g.triangle_count() == level * level);
  }
}

TEST_CASE("grid triangles are positively oriented with equal area") {
  const DeltaGrid g = make_grid(8);
  const Real expected = 1.0 / (2.0 * 8 * 8);
  for (const auto& t : g.triangles) {
    const Real a2 = triangle_area2(g.nodes[t[0]], g.nodes[t[1]], g.nodes[t[2]]);
    CHECK(a2 / 2 == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("grid boundary nodes per face form a 1D grid") {
  const int level = 16;
  const DeltaGrid g = make_grid(level);
  for (unsigned mask : {3u, 5u, 6u}) {
    const SpeciesSubset face = SpeciesSubset::from_mask(mask);
    int count = 0;
    for (int k = 0; k < g.node_count(); ++k) {
      const auto nf = g.node_face[std::size_t(k)];
      if ((nf.mask() | face.mask()) == face.mask()) ++count;
    }
    CHECK(count == level + 1);
  }
  // Node zero-pattern matches the declared face.
  for (int k = 0; k < g.node_count(); ++k) {
    for (int i = 0; i < 3; ++i) {
      if (g.node_face[std::size_t(k)].contains(i))
        CHECK(g.nodes[std::size_t(k)][i] > 0);
      else
        CHECK(g.nodes[std::size_t(k)][i] == 0);
    }
  }
}

TEST_CASE("interpolate_pushforward on the identity grid") {
  const DeltaGrid g = make_grid(4);
  std::vector<Real> radii(std::size_t(g.node_count()));
  for (int k = 0; k < g.node_count(); ++k) radii[std::size_t(k)] = 1.0 + 0.1 * k;

  // Query at a source point reproduces it exactly.
  const auto at_node =
      interpolate_pushforward(g.nodes, radii, g.triangles, g.nodes[7]);
  CHECK(at_node.rho == radii[7]);
  CHECK_FALSE(at_node.extrapolated);

  // Centroid of a triangle averages its radii.
  const auto& tr = g.triangles[0];
  const SimplexPoint centroid =
      (g.nodes[tr[0]] + g.nodes[tr[1]] + g.nodes[tr[2]]) / 3.0;
  const auto at_centroid =
      interpolate_pushforward(g.nodes, radii, g.triangles, centroid);
  const Real mean =
      (radii[std::size_t(tr[0])] + radii[std::size_t(tr[1])] + radii[std::size_t(tr[2])]) / 3.0;
  CHECK(at_centroid.rho == doctest::Approx(mean).epsilon(1e-14));

  // Uniform field stays uniform at the centroid.
  std::vector<Real> ones(std::size_t(g.node_count()), 1.0);
  CHECK(interpolate_pushforward(g.nodes, ones, g.triangles, centroid).rho ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interpolate_pushforward is exact on affine fields") {
  const DeltaGrid g = make_grid(6);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Real ca = rng.uniform(-2, 2), cb = rng.uniform(-2, 2), cc = rng.uniform(1, 3);
    std::vector<Real> radii(std::size_t(g.node_count()));
    for (int k = 0; k < g.node_count(); ++k) {
      const SimplexPoint& y = g.nodes[std::size_t(k)];
      radii[std::size_t(k)] = ca * y[0] + cb * y[1] + cc;
    }
    // Random query inside the simplex.
    Real u = rng.uniform(0, 1), v = rng.uniform(0, 1);
    if (u + v > 1) {
      u = 1 - u;
      v = 1 - v;
    }
    const SimplexPoint q(u, v, 1 - u - v);
    const auto r = interpolate_pushforward(g.nodes, radii, g.triangles, q);
    CHECK_FALSE(r.extrapolated);
    CHECK(r.rho == doctest::Approx(ca * u + cb * v + cc).epsilon(1e-12));
  }
}

TEST_CASE("interpolate_pushforward flags extrapolation and degeneracy") {
  // A single triangle that covers only part of the simplex.
  std::vector<SimplexPoint> dirs = {SimplexPoint(0.5, 0.25, 0.25),
                                    SimplexPoint(0.25, 0.5, 0.25),
                                    SimplexPoint(0.25, 0.25, 0.5)};
  std::vector<Real> radii = {1.0, 2.0, 3.0};
  std::vector<Eigen::Vector3i> tris = {Eigen::Vector3i(0, 1, 2)};
  const auto outside =
      interpolate_pushforward(dirs, radii, tris, SimplexPoint(0.9, 0.05, 0.05));
  CHECK(outside.extrapolated);
  CHECK(outside.rho == 1.0);  // nearest source

  // Collapsed triangle under the query.
  std::vector<SimplexPoint> flat = {SimplexPoint(0.2, 0.4, 0.4),
                                    SimplexPoint(0.4, 0.3, 0.3),
                                    SimplexPoint(0.6, 0.2, 0.2)};
  CHECK_THROWS_AS(
      interpolate_pushforward(flat, radii, tris, SimplexPoint(0.4, 0.3, 0.3)),
      Error);
}

TEST_CASE("RadialGraph interpolation matches nodes and affine fields") {
  RadialGraph g;
  g.grid = make_grid(12);
  g.rho.resize(g.grid.node_count());
  for (int k = 0; k < g.grid.node_count(); ++k) {
    const SimplexPoint& y = g.grid.nodes[std::size_t(k)];
    g.rho[k] = 2.0 + 0.5 * y[0] - 0.25 * y[1];
  }
  for (int k = 0; k < g.grid.node_count(); ++k)
    CHECK(g.interpolate(g.grid.nodes[std::size_t(k)]) ==
          doctest::Approx(g.rho[k]).epsilon(1e-12));
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Real u = rng.uniform(0, 1), v = rng.uniform(0, 1);
    if (u + v > 1) {
      u = 1 - u;
      v = 1 - v;
    }
    const SimplexPoint q(u, v, 1 - u - v);
    CHECK(g.interpolate(q) ==
          doctest::Approx(2.0 + 0.5 * u - 0.25 * v).epsilon(1e-12));
  }
  // graph_distance along a ray
  const Point3 p = 3.0 * SimplexPoint(0.25, 0.25, 0.5);
  const Real expect = std::abs(3.0 - (2.0 + 0.5 * 0.25 - 0.25 * 0.25));
  CHECK(graph_distance(g, p) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("SpeciesSubset behaves") {
  const auto s = SpeciesSubset::pair(0, 2);
  CHECK(s.card() == 2);
  CHECK(s.contains(0));
  CHECK_FALSE(s.contains(1));
  CHECK(s.complement() == SpeciesSubset::single(1));
  CHECK(s.str() == "{1,3}");
  CHECK_THROWS_AS(SpeciesSubset::all().complement(), Error);
  const auto idx = s.indices();
  CHECK(idx[0] == 0);
  CHECK(idx[1] == 2);
  CHECK(idx[2] == -1);
}
