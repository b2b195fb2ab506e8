#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cslab/spectra.hpp"
#include "fixtures.hpp"

using namespace cslab;
using namespace cslab::testfix;

TEST_CASE("axial fixed points of the built-ins") {
  const auto lgb = find_axial_fixed_points(lg_b());
  REQUIRE(lgb.size() == 3);
  CHECK((lgb[0].location - Point3(2, 0, 0)).norm() < 1e-10);
  CHECK((lgb[1].location - Point3(0, 2, 0)).norm() < 1e-10);
  CHECK((lgb[2].location - Point3(0, 0, 2)).norm() < 1e-10);
  for (const auto& fp : lgb) {
    CHECK(fp.residual < 1e-12);
    CHECK(fp.face.card() == 1);
    // (lambda - 1) / a_ii oracle to full precision.
    CHECK(fp.location.maxCoeff() == doctest::Approx(2.0).epsilon(1e-10));
  }

  const auto lga = find_axial_fixed_points(lg_a());
  for (int i = 0; i < 3; ++i)
    CHECK(lga[std::size_t(i)].location[i] == doctest::Approx(1.0).epsilon(1e-10));

  const auto rk = find_axial_fixed_points(ricker_b());
  for (int i = 0; i < 3; ++i)
    CHECK(rk[std::size_t(i)].location[i] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("axial fixed point failures") {
  CHECK_THROWS_AS(find_axial_fixed_points(
                      lg_callback(Vec3(0.9, 3, 3), lg_b_params().a)),
                  Error);
}

TEST_CASE("planar fixed points") {
  const auto face12 = SpeciesSubset::pair(0, 1);

  const auto lgb = find_planar_fixed_points(lg_b(), face12);
  REQUIRE(lgb.size() == 1);
  CHECK((lgb[0].location - Point3(4.0 / 3, 4.0 / 3, 0)).norm() < 1e-9);
  CHECK(lgb[0].location[2] == 0.0);
  CHECK(lgb[0].residual < 1e-10);

  const auto lgc = find_planar_fixed_points(lg_c(), face12);
  REQUIRE(lgc.size() == 1);
  CHECK((lgc[0].location - Point3(1.0 / 3, 1.0 / 3, 0)).norm() < 1e-9);

  // Competition skewed so the 2x2 system has no positive solution.
  LeslieGowerParams p;
  p.lambda = Vec3(2, 2, 2);
  p.a << 1, 3, 0.5, 0.2, 1, 0.5, 0.5, 0.5, 1;
  const auto none = find_planar_fixed_points(MapModel::leslie_gower(p), face12);
  CHECK(none.empty());

  // LG-A has a whole segment of planar fixed points; many survive dedup.
  const auto lga = find_planar_fixed_points(lg_a(), face12);
  CHECK(lga.size() >= 10);
  for (const auto& fp : lga)
    CHECK(fp.location[0] + fp.location[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("interior fixed points") {
  const auto lgb = find_interior_fixed_points(lg_b());
  REQUIRE(lgb.size() == 1);
  CHECK((lgb[0].location - Point3(1, 1, 1)).norm() < 1e-9);

  const auto lgc = find_interior_fixed_points(lg_c());
  REQUIRE(lgc.size() == 1);
  CHECK((lgc[0].location - Point3(0.2, 0.2, 0.2)).norm() < 1e-9);

  // Dominance pattern with no interior coexistence point.
  LeslieGowerParams p;
  p.lambda = Vec3(2, 2, 2);
  p.a << 1, 3, 3, 0.2, 1, 3, 0.2, 0.2, 1;
  CHECK(find_interior_fixed_points(MapModel::leslie_gower(p)).empty());
}

TEST_CASE("fixed point residuals re-verified independently") {
  const MapModel m = lg_b();
  auto all = find_axial_fixed_points(m);
  for (const auto& face :
       {SpeciesSubset::pair(0, 1), SpeciesSubset::pair(0, 2), SpeciesSubset::pair(1, 2)})
    for (const auto& fp : find_planar_fixed_points(m, face)) all.push_back(fp);
  for (const auto& fp : find_interior_fixed_points(m)) all.push_back(fp);
  for (const auto& fp : all)
    CHECK((m.eval(fp.location) - fp.location).norm() < 1e-10);
}

TEST_CASE("boundary spectrum at LG-B fixed points") {
  const MapModel m = lg_b();

  const auto axial = find_axial_fixed_points(m);
  const SpectrumRecord sa = boundary_spectrum(m, axial[0]);
  CHECK(sa.principal == doctest::Approx(1.0 / 3).epsilon(1e-12));
  REQUIRE(sa.externals.size() == 2);
  CHECK(sa.externals[0].value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sa.externals[1].value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sa.principal > 0.0);
  CHECK(sa.principal < 1.0);
  CHECK_FALSE(sa.internal_other.has_value());
  CHECK(sa.margin() == doctest::Approx(7.0 / 6).epsilon(1e-12));

  const auto planar = find_planar_fixed_points(m, SpeciesSubset::pair(0, 1));
  const SpectrumRecord sp = boundary_spectrum(m, planar.at(0));
  CHECK(sp.principal == doctest::Approx(1.0 / 3).epsilon(1e-9));
  REQUIRE(sp.internal_other.has_value());
  CHECK(*sp.internal_other == doctest::Approx(7.0 / 9).epsilon(1e-9));
  REQUIRE(sp.externals.size() == 1);
  CHECK(sp.externals[0].species == 2);
  CHECK(sp.externals[0].value == doctest::Approx(9.0 / 7).epsilon(1e-9));
  CHECK(sp.margin() == doctest::Approx(9.0 / 7 - 1.0 / 3).epsilon(1e-9));

  // Eigenvectors: r positive along the face diagonal, w sign-mixed.
  CHECK(sp.perron_direction[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(sp.perron_direction[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(sp.perron_direction[2] == 0.0);
  CHECK(sp.tangent_direction[0] * sp.tangent_direction[1] < 0.0);

  // Eigen residuals of the reported pairs.
  Mat2 block;
  block << sp.fp.jacobian(0, 0), sp.fp.jacobian(0, 1), sp.fp.jacobian(1, 0),
      sp.fp.jacobian(1, 1);
  const Vec2 r2(sp.perron_direction[0], sp.perron_direction[1]);
  const Vec2 w2(sp.tangent_direction[0], sp.tangent_direction[1]);
  CHECK((block * r2 - sp.principal * r2).norm() < 1e-9);
  CHECK((block * w2 - *sp.internal_other * w2).norm() < 1e-9);

  // Principal equals the reciprocal Perron root of the positive inverse block.
  const Mat2 inv = block.inverse();
  CHECK(inv.minCoeff() > 0.0);
  const Real perron =
      (inv.trace() + std::sqrt(inv.trace() * inv.trace() - 4 * inv.determinant())) / 2;
  CHECK(sp.principal * perron == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("boundary spectrum at the LG-C planar point") {
  const MapModel m = lg_c();
  const auto planar = find_planar_fixed_points(m, SpeciesSubset::pair(0, 1));
  const SpectrumRecord sp = boundary_spectrum(m, planar.at(0));
  CHECK(sp.principal == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(*sp.internal_other == doctest::Approx(7.0 / 6).epsilon(1e-9));
  CHECK(sp.externals[0].value == doctest::Approx(6.0 / 7).epsilon(1e-9));
  CHECK_FALSE(sp.degenerate);  // smallest-modulus internal is 1/2 < 1
}

TEST_CASE("cubic debug path cross-checks the block spectra") {
  for (const MapModel& m : {lg_b(), lg_c()}) {
    const auto planar = find_planar_fixed_points(m, SpeciesSubset::pair(0, 1));
    const SpectrumRecord sp = boundary_spectrum(m, planar.at(0));
    const auto roots = eigenvalues_cubic(sp.fp.jacobian);
    std::vector<Real> expected = {sp.principal, *sp.internal_other,
                                  sp.externals[0].value};
    std::sort(expected.begin(), expected.end());
    std::vector<Real> got;
    for (const auto& r : roots) {
      CHECK(std::abs(r.imag()) < 1e-10);
      got.push_back(r.real());
    }
    std::sort(got.begin(), got.end());
    for (int i = 0; i < 3; ++i)
      CHECK(got[std::size_t(i)] ==
            doctest::Approx(expected[std::size_t(i)]).epsilon(1e-9));
  }
  // Complex pair handling: a rotation-like matrix.
  Mat3 rot;
  rot << 0, -1, 0, 1, 0, 0, 0, 0, 2;
  const auto roots = eigenvalues_cubic(rot);
  int complex_count = 0;
  for (const auto& r : roots)
    if (std::abs(r.imag()) > 0.5) ++complex_count;
  CHECK(complex_count == 2);
}

TEST_CASE("classify the three reference models") {
  const ClassificationReport b = classify(lg_b());
  CHECK(b.verdict == ClassVerdict::NeatlyEmbeddedPredicted);
  CHECK(b.min_margin() == doctest::Approx(20.0 / 21).epsilon(1e-9));
  CHECK(b.spectra.size() == 6);  // 3 axial + 3 planar

  const ClassificationReport a = classify(lg_a());
  CHECK(a.verdict == ClassVerdict::Degenerate);
  CHECK(a.max_planar_points_on_one_face >= 10);

  const ClassificationReport c = classify(lg_c());
  CHECK(c.verdict == ClassVerdict::NeatlyEmbeddedPredicted);
  // Axial margin 2/3 - 1/2 = 1/6 is the binding one.
  CHECK(c.min_margin() == doctest::Approx(1.0 / 6).epsilon(1e-9));
  CHECK(c.note.find("period >= 2") != std::string::npos);
}

TEST_CASE("classify is invariant under species relabeling") {
  LeslieGowerParams p;
  p.lambda = Vec3(2.5, 3.2, 1.9);
  p.a << 1.0, 0.4, 0.7, 0.3, 1.0, 0.5, 0.45, 0.8, 1.0;
  const ClassificationReport base = classify(MapModel::leslie_gower(p));

  // Cyclic permutation sigma = (0 1 2) -> (1 2 0).
  const int sigma[3] = {1, 2, 0};
  LeslieGowerParams q;
  for (int i = 0; i < 3; ++i) {
    q.lambda[i] = p.lambda[sigma[i]];
    for (int j = 0; j < 3; ++j) q.a(i, j) = p.a(sigma[i], sigma[j]);
  }
  const ClassificationReport perm = classify(MapModel::leslie_gower(q));

  CHECK(base.verdict == perm.verdict);
  CHECK(base.spectra.size() == perm.spectra.size());
  std::vector<Real> m1, m2;
  for (const auto& s : base.spectra) m1.push_back(s.margin());
  for (const auto& s : perm.spectra) m2.push_back(s.margin());
  std::sort(m1.begin(), m1.end());
  std::sort(m2.begin(), m2.end());
  for (std::size_t i = 0; i < m1.size(); ++i)
    CHECK(m1[i] == doctest::Approx(m2[i]).epsilon(1e-9));
}

TEST_CASE("axial spectra obey (H4') bounds for LG with lambda > 1") {
  for (const MapModel& m : {lg_a(), lg_b(), lg_c(), ricker_b()}) {
    for (const auto& fp : find_axial_fixed_points(m)) {
      const SpectrumRecord s = boundary_spectrum(m, fp);
      CHECK(s.principal > 0.0);
      CHECK(s.principal < 1.0);
      for (const auto& e : s.externals) CHECK(e.value > 0.0);
    }
  }
}

TEST_CASE("boundary spectrum rejects interior points and broken structure") {
  const MapModel m = lg_b();
  const auto interior = find_interior_fixed_points(m);
  CHECK_THROWS_AS(boundary_spectrum(m, interior.at(0)), Error);

  // A fabricated record with complex internal eigenvalues.
  FixedPointRecord fake;
  fake.location = Point3(1, 1, 0);
  fake.face = SpeciesSubset::pair(0, 1);
  fake.jacobian << 0.5, 0.4, 0, -0.4, 0.5, 0, 0, 0, 1.2;
  CHECK_THROWS_AS(boundary_spectrum(m, fake), Error);
}
