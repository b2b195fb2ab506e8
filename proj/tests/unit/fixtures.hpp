#ifndef CSLAB_TESTS_FIXTURES_HPP_
#define CSLAB_TESTS_FIXTURES_HPP_

#include "cslab/models.hpp"

namespace cslab::testfix {

// Symmetric model whose carrying simplex is the flat plane x1+x2+x3 = 1.
inline MapModel lg_a(JacobianMode mode = JacobianMode::Analytic) {
  LeslieGowerParams p;
  p.lambda = Vec3(2, 2, 2);
  p.a.setOnes();
  return MapModel::leslie_gower(p, mode);
}

// Weak symmetric competition: axial points at 2, planar at (4/3, 4/3),
// interior at (1,1,1); strictly convex carrying simplex.
inline MapModel lg_b(JacobianMode mode = JacobianMode::Analytic) {
  LeslieGowerParams p;
  p.lambda = Vec3(3, 3, 3);
  p.a << 1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
  return MapModel::leslie_gower(p, mode);
}

// Strong symmetric competition (bistable faces): nonconvex carrying simplex.
inline MapModel lg_c(JacobianMode mode = JacobianMode::Analytic) {
  LeslieGowerParams p;
  p.lambda = Vec3(2, 2, 2);
  p.a << 1, 2, 2, 2, 1, 2, 2, 2, 1;
  return MapModel::leslie_gower(p, mode);
}

inline LeslieGowerParams lg_b_params() {
  LeslieGowerParams p;
  p.lambda = Vec3(3, 3, 3);
  p.a << 1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
  return p;
}

inline MapModel ricker_b(JacobianMode mode = JacobianMode::Analytic) {
  RickerParams p;
  p.r = Vec3(0.5, 0.5, 0.5);
  p.a << 1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
  return MapModel::ricker(p, mode);
}

// Leslie-Gower formulas evaluated directly; lets tests build parameter sets
// the validated constructors refuse (adversarial checker cases).
inline MapModel lg_callback(const Vec3& lambda, const Mat3& a) {
  ExternalHooks hooks;
  hooks.description = "lg_callback";
  hooks.eval = [lambda, a](const Point3& x) -> Point3 {
    const Vec3 ax = a * x;
    Point3 y;
    for (int i = 0; i < 3; ++i) y[i] = lambda[i] * x[i] / (1.0 + ax[i]);
    return y;
  };
  Point3 box;
  for (int i = 0; i < 3; ++i)
    box[i] = std::max(1.0, lambda[i]) / a(i, i);
  hooks.absorbing_box = box;
  return MapModel::external(std::move(hooks));
}

}  // namespace cslab::testfix

#endif  // CSLAB_TESTS_FIXTURES_HPP_
