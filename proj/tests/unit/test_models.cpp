#include "doctest.h"

#include <cmath>

#include "cslab/models.hpp"
#include "cslab/rng.hpp"
#include "fixtures.hpp"

using namespace cslab;
using namespace cslab::testfix;

namespace {

// Jacobian oracle at fixed points with x_i > 0: dP_i/dx_j = delta_ij - x_i a_ij / lambda_i.
Real lg_fixed_point_partial(const LeslieGowerParams& p, const Point3& x, int i, int j) {
  return (i == j ? 1.0 : 0.0) - x[i] * p.a(i, j) / p.lambda[i];
}

}  // namespace

TEST_CASE("eval at known fixed points") {
  CHECK((lg_b().eval(Point3(1, 1, 1)) - Point3(1, 1, 1)).norm() < 1e-15);
  CHECK((lg_a().eval(Point3(1, 0, 0)) - Point3(1, 0, 0)).norm() < 1e-15);
  CHECK(lg_a().eval(Point3(0, 0, 0)).norm() == 0.0);
  CHECK(lg_c().eval(Point3(0, 0, 0)).norm() == 0.0);
}

TEST_CASE("eval preserves faces exactly for built-ins") {
  Rng rng(5);
  for (const MapModel& m : {lg_a(), lg_b(), lg_c(), ricker_b()}) {
    const Point3 box = m.absorbing_box();
    for (int trial = 0; trial < 200; ++trial) {
      Point3 x(rng.uniform(0, box[0]), rng.uniform(0, box[1]),
               rng.uniform(0, box[2]));
      const int zero_out = rng.uniform_int(4);
      if (zero_out < 3) x[zero_out] = 0.0;
      const Point3 y = m.eval(x);
      for (int i = 0; i < 3; ++i)
        if (x[i] == 0.0) CHECK(y[i] == 0.0);
      CHECK(y.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("jacobian closed forms at LG-B fixed points") {
  const MapModel m = lg_b();
  const LeslieGowerParams p = lg_b_params();

  const Point3 planar(4.0 / 3, 4.0 / 3, 0);
  const Mat3 j = m.jacobian(planar);
  CHECK(j(0, 0) == doctest::Approx(5.0 / 9).epsilon(1e-12));
  CHECK(j(0, 1) == doctest::Approx(-2.0 / 9).epsilon(1e-12));
  CHECK(j(1, 0) == doctest::Approx(-2.0 / 9).epsilon(1e-12));
  CHECK(j(1, 1) == doctest::Approx(5.0 / 9).epsilon(1e-12));
  CHECK(j(2, 2) == doctest::Approx(9.0 / 7).epsilon(1e-12));
  CHECK(std::abs(j(2, 0)) < 1e-15);
  CHECK(std::abs(j(2, 1)) < 1e-15);
  // Oracle formula for the rows of present species.
  for (int i = 0; i < 2; ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(j(i, c) ==
            doctest::Approx(lg_fixed_point_partial(p, planar, i, c)).epsilon(1e-12));

  const Point3 axial(2, 0, 0);
  const Mat3 ja = m.jacobian(axial);
  CHECK(ja(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(ja(1, 1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(ja(2, 2) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(ja(1, 0) == 0.0);
  CHECK(ja(2, 0) == 0.0);
  CHECK(ja(2, 1) == 0.0);
}

TEST_CASE("finite differences agree with analytic jacobians") {
  Rng rng(17);
  for (bool ricker : {false, true}) {
    const MapModel m = ricker ? ricker_b() : lg_b();
    const MapModel fd = ricker ? ricker_b(JacobianMode::FiniteDifference)
                               : lg_b(JacobianMode::FiniteDifference);
    const Point3 box = m.absorbing_box();
    Real worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Point3 x(rng.uniform(0, box[0]), rng.uniform(0, box[1]),
                     rng.uniform(0, box[2]));
      worst = std::max(worst,
                       (m.jacobian(x) - fd.jacobian(x)).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-5);
  }
  // The LG-B bound at 20 points is tighter.
  const MapModel m = lg_b();
  const MapModel fd = lg_b(JacobianMode::FiniteDifference);
  Real worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Point3 x(rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3));
    worst = std::max(worst,
                     (m.jacobian(x) - fd.jacobian(x)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("finite differences keep face rows clean") {
  const MapModel fd = lg_b(JacobianMode::FiniteDifference);
  const Mat3 j = fd.jacobian(Point3(0.7, 0, 1.3));
  CHECK(std::abs(j(1, 0)) < 10e-12);  // 10*h^2 with h = 1e-6
  CHECK(std::abs(j(1, 2)) < 10e-12);
}

TEST_CASE("absorbing boxes") {
  CHECK((lg_a().absorbing_box() - Point3(2, 2, 2)).norm() < 1e-15);
  CHECK((lg_b().absorbing_box() - Point3(3, 3, 3)).norm() < 1e-15);
  const Point3 rb = ricker_b().absorbing_box();
  const Real expect = 1.1 * std::exp(-0.5) / 0.5;
  CHECK(rb[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(1.334).epsilon(1e-3));
  // The box absorbs: one application of P stays inside.
  Rng rng(23);
  for (const MapModel& m : {lg_a(), lg_b(), lg_c(), ricker_b()}) {
    const Point3 box = m.absorbing_box();
    for (int trial = 0; trial < 200; ++trial) {
      const Point3 x(rng.uniform(0, box[0]), rng.uniform(0, box[1]),
                     rng.uniform(0, box[2]));
      const Point3 y = m.eval(x);
      for (int i = 0; i < 3; ++i) CHECK(y[i] <= box[i]);
    }
  }
}

TEST_CASE("orientation: LG jacobian determinant positive on the box") {
  Rng rng(29);
  for (const MapModel& m : {lg_a(), lg_b(), lg_c()}) {
    const Point3 box = m.absorbing_box();
    for (int trial = 0; trial < 200; ++trial) {
      const Point3 x(rng.uniform(0, box[0]), rng.uniform(0, box[1]),
                     rng.uniform(0, box[2]));
      CHECK(m.jacobian(x).determinant() > 0.0);
    }
  }
  // Ricker keeps positive orientation near its attractor scale (1/a_ii), not
  // on the whole inflated box.
  const MapModel rk = ricker_b();
  for (int trial = 0; trial < 200; ++trial) {
    const Point3 x(rng.uniform(0, 1.05), rng.uniform(0, 1.05),
                   rng.uniform(0, 1.05));
    CHECK(rk.jacobian(x).determinant() > 0.0);
  }
}

TEST_CASE("check_h2 passes built-ins and catches a leaky face") {
  const HypothesisReport lg = check_h2(lg_b(), 100);
  CHECK(lg.verdict == HypVerdict::Pass);
  CHECK(lg.findings.empty());

  const HypothesisReport rk = check_h2(ricker_b(), 100);
  CHECK(rk.verdict == HypVerdict::Pass);

  // Structural face check at a named point.
  CHECK(lg_b().eval(Point3(0.7, 0, 1.3))[1] == 0.0);

  // Adversarial model: P_2 gains 0.1 regardless of x_2.
  ExternalHooks hooks;
  hooks.description = "leaky";
  hooks.eval = [](const Point3& x) -> Point3 {
    Point3 y = 0.5 * x;
    y[1] = x[1] + 0.1;
    return y;
  };
  hooks.absorbing_box = Point3(2, 2, 2);
  const HypothesisReport bad = check_h2(MapModel::external(std::move(hooks)), 20);
  CHECK(bad.verdict == HypVerdict::Fail);
  CHECK(!bad.findings.empty());
  CHECK(bad.has_hard_violation());
}

TEST_CASE("check_h3prime positivity") {
  const MapModel m = lg_b();
  // Direct examples: the full inverse at the interior point, and the 1x1
  // reciprocal on an axis.
  const Mat3 inv = m.jacobian(Point3(1, 1, 1)).inverse();
  CHECK(inv.minCoeff() > 0.0);
  const Mat3 inv_axial = m.jacobian(Point3(2, 0, 0)).inverse();
  CHECK(inv_axial(0, 0) == doctest::Approx(3.0).epsilon(1e-12));

  CHECK(check_h3prime(m, 200).verdict == HypVerdict::Pass);
  CHECK(check_h3prime(lg_c(), 200).verdict == HypVerdict::Pass);

  // a_12 = 0 breaks strict positivity on face {1,2} (upper-triangular block).
  Mat3 a;
  a << 1, 0, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
  const MapModel zero_coupling = lg_callback(Vec3(3, 3, 3), a);
  const HypothesisReport rep = check_h3prime(zero_coupling, 50);
  CHECK(rep.verdict != HypVerdict::Pass);
  CHECK(!rep.findings.empty());

  // A cooperative (non-competitive) interaction produces hard violations.
  ExternalHooks hooks;
  hooks.description = "cooperative";
  hooks.eval = [](const Point3& x) -> Point3 {
    return Point3(0.5 * x[0] * (1.0 + x[1]), 0.5 * x[1], 0.5 * x[2]);
  };
  hooks.absorbing_box = Point3(2, 2, 2);
  const HypothesisReport coop =
      check_h3prime(MapModel::external(std::move(hooks)), 50);
  CHECK(coop.verdict == HypVerdict::Fail);
  CHECK(coop.has_hard_violation());
}

TEST_CASE("check_h4prime on built-ins and an extinct axis") {
  const HypothesisReport lg = check_h4prime(lg_b());
  CHECK(lg.verdict == HypVerdict::Pass);

  // Closed forms at u_1 = (2,0,0): derivative 1/3, cross-partial -1/3.
  const Mat3 j = lg_b().jacobian(Point3(2, 0, 0));
  CHECK(j(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(j(0, 1) == doctest::Approx(-1.0 / 3).epsilon(1e-12));

  const HypothesisReport rk = check_h4prime(ricker_b());
  CHECK(rk.verdict == HypVerdict::Pass);
  // Ricker axial derivative is 1 - r = 0.5 at u = 1/a.
  CHECK(ricker_b().jacobian(Point3(1, 0, 0))(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-12));

  // lambda_1 <= 1: species 1 goes extinct, no axial fixed point.
  const MapModel extinct = lg_callback(Vec3(0.9, 3, 3), lg_b_params().a);
  const HypothesisReport bad = check_h4prime(extinct);
  CHECK(bad.verdict == HypVerdict::Fail);
  REQUIRE(!bad.findings.empty());
  CHECK(bad.findings[0].quantity.find("no axial fixed point") != std::string::npos);
}

TEST_CASE("check_h6 ratio monotonicity") {
  CHECK(check_h6(lg_b(), 500).verdict == HypVerdict::Pass);

  // Pure scaling map: ratios match exactly, equality passes.
  ExternalHooks scale;
  scale.description = "halving";
  scale.eval = [](const Point3& x) -> Point3 { return 0.5 * x; };
  scale.absorbing_box = Point3(2, 2, 2);
  CHECK(check_h6(MapModel::external(std::move(scale)), 100).verdict ==
        HypVerdict::Pass);

  // Squaring map: image ratios shrink below pre-image ratios.
  ExternalHooks square;
  square.description = "squaring";
  square.eval = [](const Point3& x) -> Point3 { return x.cwiseProduct(x); };
  square.absorbing_box = Point3(1.5, 1.5, 1.5);
  const HypothesisReport bad = check_h6(MapModel::external(std::move(square)), 100);
  CHECK(bad.verdict == HypVerdict::Fail);
  CHECK(!bad.findings.empty());
}

TEST_CASE("checker determinism") {
  const HypothesisReport a = check_h6(lg_b(), 50, 42);
  const HypothesisReport b = check_h6(lg_b(), 50, 42);
  CHECK(a.sample_count == b.sample_count);
  CHECK(a.findings.size() == b.findings.size());
}

TEST_CASE("external model without a box refuses box-dependent work") {
  ExternalHooks hooks;
  hooks.description = "boxless";
  hooks.eval = [](const Point3& x) -> Point3 { return 0.5 * x; };
  const MapModel m = MapModel::external(std::move(hooks));
  CHECK_THROWS_AS(m.absorbing_box(), Error);
  CHECK_THROWS_AS(check_h2(m, 10), Error);
}

TEST_CASE("numeric overflow surfaces as an error") {
  ExternalHooks hooks;
  hooks.description = "exploding";
  hooks.eval = [](const Point3& x) -> Point3 {
    return Point3(std::exp(x[0] * 1e6), x[1], x[2]);
  };
  hooks.absorbing_box = Point3(2, 2, 2);
  const MapModel m = MapModel::external(std::move(hooks));
  CHECK_THROWS_AS(m.eval(Point3(1, 1, 1)), Error);
}

TEST_CASE("invalid parameters are rejected at construction") {
  LeslieGowerParams bad_lambda;
  bad_lambda.lambda = Vec3(0.9, 3, 3);
  bad_lambda.a.setOnes();
  CHECK_THROWS_AS(MapModel::leslie_gower(bad_lambda), Error);

  RickerParams bad_r;
  bad_r.r = Vec3(1.5, 0.5, 0.5);
  bad_r.a.setOnes();
  CHECK_THROWS_AS(MapModel::ricker(bad_r), Error);
}
