#include "cslab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cslab {

namespace {

constexpr Real kResidualTol = 1e-10;
constexpr Real kDedupeDist = 1e-7;
constexpr Real kStructuralZeroTol = 1e-8;

Real map_residual(const MapModel& model, const Point3& x) {
  return (model.eval(x) - x).norm();
}

// Newton iteration for P(x) = x restricted to `face`. Off-face coordinates
// stay exactly zero. Acceptance is by residual, so points on a non-isolated
// fixed curve are still usable even though the Newton matrix degenerates.
std::optional<FixedPointRecord> newton_on_face(const MapModel& model,
                                               SpeciesSubset face, Point3 seed,
                                               Real box_scale) {
  const auto idx = face.indices();
  const int d = face.card();
  Point3 x = Point3::Zero();
  for (int a = 0; a < d; ++a) x[idx[a]] = seed[idx[a]];
  for (int it = 0; it < 60; ++it) {
    const Point3 gx = model.eval(x) - x;
    Eigen::VectorXd g(d);
    for (int a = 0; a < d; ++a) g[a] = gx[idx[a]];
    if (g.norm() < 1e-13) break;
    Mat3 j;
    try {
      j = model.jacobian(x);
    } catch (const Error&) {
      return std::nullopt;
    }
    Eigen::MatrixXd dg(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        dg(a, b) = j(idx[a], idx[b]) - (a == b ? 1.0 : 0.0);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(dg);
    if (!lu.isInvertible()) {
      // Singular Newton matrix: keep the point if it already satisfies the
      // fixed-point equation (non-isolated fixed sets land here).
      break;
    }
    Eigen::VectorXd step = lu.solve(g);
    // Trust region: never jump further than the box scale.
    const Real max_step = 0.5 * box_scale;
    if (step.norm() > max_step) step *= max_step / step.norm();
    for (int a = 0; a < d; ++a) x[idx[a]] -= step[a];
    if (!x.allFinite()) return std::nullopt;
    // Diverged far outside the region of interest.
    for (int a = 0; a < d; ++a)
      if (x[idx[a]] < -0.5 * box_scale || x[idx[a]] > 10.0 * box_scale)
        return std::nullopt;
  }
  const Real res = map_residual(model, x);
  if (res >= kResidualTol) return std::nullopt;
  FixedPointRecord rec;
  rec.location = x;
  rec.face = face;
  rec.residual = res;
  rec.jacobian = model.jacobian(x);
  return rec;
}

void dedupe_sorted(std::vector<FixedPointRecord>& points) {
  std::sort(points.begin(), points.end(),
            [](const FixedPointRecord& a, const FixedPointRecord& b) {
              if (a.location[0] != b.location[0]) return a.location[0] < b.location[0];
              if (a.location[1] != b.location[1]) return a.location[1] < b.location[1];
              return a.location[2] < b.location[2];
            });
  std::vector<FixedPointRecord> unique;
  for (auto& p : points) {
    bool dup = false;
    for (const auto& q : unique)
      if ((p.location - q.location).norm() < kDedupeDist) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(std::move(p));
  }
  points.swap(unique);
}

// Eigenpair of a 2x2 block for eigenvalue mu; the better-conditioned row of
// (B - mu I) supplies the eigenvector.
Vec2 eigenvector_2x2(const Mat2& b, Real mu) {
  const Real off_b = b(0, 1);
  const Real off_c = b(1, 0);
  Vec2 v;
  if (std::abs(off_b) >= std::abs(off_c))
    v = Vec2(off_b, mu - b(0, 0));
  else
    v = Vec2(mu - b(1, 1), off_c);
  if (v.norm() < 1e-14) v = Vec2(1, 0);  // diagonal block
  return v.normalized();
}

}  // namespace

Real SpectrumRecord::margin() const {
  Real m = std::numeric_limits<Real>::infinity();
  for (const auto& e : externals) m = std::min(m, e.value - principal);
  return m;
}

Real ClassificationReport::min_margin() const {
  Real m = std::numeric_limits<Real>::infinity();
  for (const auto& s : spectra) m = std::min(m, s.margin());
  return m;
}

const char* class_verdict_name(ClassVerdict v) {
  switch (v) {
    case ClassVerdict::NeatlyEmbeddedPredicted: return "NeatlyEmbeddedPredicted";
    case ClassVerdict::CriterionFails: return "CriterionFails";
    case ClassVerdict::Marginal: return "Marginal";
    case ClassVerdict::Degenerate: return "Degenerate";
  }
  return "?";
}

std::vector<FixedPointRecord> find_axial_fixed_points(const MapModel& model) {
  std::vector<FixedPointRecord> out;
  const Point3 box = model.absorbing_box();
  const int scan_points = 1000;
  for (int axis = 0; axis < 3; ++axis) {
    auto g = [&](Real s) {
      Point3 x = Point3::Zero();
      x[axis] = s;
      return model.eval(x)[axis] - s;
    };
    int sign_changes = 0;
    Real lo = 0, hi = 0;
    Real prev_s = std::max(1e-8, box[axis] / scan_points);
    Real prev_g = g(prev_s);
    for (int k = 2; k <= scan_points; ++k) {
      const Real s = box[axis] * Real(k) / scan_points;
      const Real gs = g(s);
      if ((prev_g > 0 && gs <= 0) || (prev_g < 0 && gs >= 0)) {
        if (sign_changes == 0) {
          lo = prev_s;
          hi = s;
        }
        ++sign_changes;
      }
      prev_s = s;
      prev_g = gs;
    }
    if (sign_changes == 0)
      throw Error(Errc::NoAxialFixedPoint,
                  "no sign change on axis " + std::to_string(axis + 1));
    if (sign_changes > 1)
      throw Error(Errc::MultipleRoots,
                  "multiple axial fixed points on axis " + std::to_string(axis + 1) +
                      " violate (H4') uniqueness");
    Real glo = g(lo);
    for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
      const Real mid = 0.5 * (lo + hi);
      const Real gm = g(mid);
      if ((glo > 0) == (gm > 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    Real u = 0.5 * (lo + hi);
    for (int it = 0; it < 10; ++it) {
      Point3 x = Point3::Zero();
      x[axis] = u;
      const Real d = model.jacobian(x)(axis, axis) - 1.0;
      if (std::abs(d) < 1e-14) break;
      const Real next = u - g(u) / d;
      if (!(next > 0) || !std::isfinite(next)) break;
      u = next;
      if (std::abs(g(u)) < 1e-15) break;
    }
    FixedPointRecord rec;
    rec.location = Point3::Zero();
    rec.location[axis] = u;
    rec.face = SpeciesSubset::single(axis);
    rec.residual = map_residual(model, rec.location);
    if (rec.residual >= 1e-12)
      throw Error(Errc::NoAxialFixedPoint,
                  "axial polish failed on axis " + std::to_string(axis + 1));
    rec.jacobian = model.jacobian(rec.location);
    out.push_back(rec);
  }
  return out;
}

std::vector<FixedPointRecord> find_planar_fixed_points(const MapModel& model,
                                                       SpeciesSubset face) {
  if (face.card() != 2)
    throw Error(Errc::FaceMismatch, "planar search needs a 2-species face");
  const Point3 box = model.absorbing_box();
  const auto idx = face.indices();
  std::vector<FixedPointRecord> found;
  for (int si = 1; si <= 8; ++si) {
    for (int sj = 1; sj <= 8; ++sj) {
      Point3 seed = Point3::Zero();
      seed[idx[0]] = box[idx[0]] * Real(si) / 9.0;
      seed[idx[1]] = box[idx[1]] * Real(sj) / 9.0;
      auto rec = newton_on_face(model, face, seed, box.maxCoeff());
      if (!rec) continue;
      // Points on the face boundary are axial, not planar.
      if (rec->location[idx[0]] < kDedupeDist || rec->location[idx[1]] < kDedupeDist)
        continue;
      found.push_back(std::move(*rec));
    }
  }
  dedupe_sorted(found);
  return found;
}

std::vector<FixedPointRecord> find_interior_fixed_points(const MapModel& model) {
  const Point3 box = model.absorbing_box();
  std::vector<FixedPointRecord> found;
  for (int si = 1; si <= 5; ++si)
    for (int sj = 1; sj <= 5; ++sj)
      for (int sk = 1; sk <= 5; ++sk) {
        Point3 seed(box[0] * Real(si) / 6.0, box[1] * Real(sj) / 6.0,
                    box[2] * Real(sk) / 6.0);
        auto rec = newton_on_face(model, SpeciesSubset::all(), seed, box.maxCoeff());
        if (!rec) continue;
        if (rec->location.minCoeff() < kDedupeDist) continue;
        found.push_back(std::move(*rec));
      }
  dedupe_sorted(found);
  return found;
}

SpectrumRecord boundary_spectrum(const MapModel& model, const FixedPointRecord& fp) {
  if (fp.face.card() == 3)
    throw Error(Errc::FaceMismatch, "boundary spectrum needs a boundary fixed point");
  SpectrumRecord rec;
  rec.fp = fp;
  const Mat3& j = fp.jacobian;

  if (fp.face.card() == 1) {
    const int i = fp.face.indices()[0];
    // Rows of absent species must be diagonal: the 2-faces through u_i are
    // invariant, which kills their off-diagonal derivatives.
    for (int r = 0; r < 3; ++r) {
      if (r == i) continue;
      for (int c = 0; c < 3; ++c)
        if (c != r && std::abs(j(r, c)) > kStructuralZeroTol)
          throw Error(Errc::FaceMismatch,
                      "axial Jacobian lacks its structural zeros");
    }
    rec.principal = j(i, i);
    if (!(rec.principal > 0))
      throw Error(Errc::NonpositiveEigenvalue, "axial principal eigenvalue <= 0");
    for (int r = 0; r < 3; ++r) {
      if (r == i) continue;
      if (!(j(r, r) > 0))
        throw Error(Errc::NonpositiveEigenvalue, "axial external eigenvalue <= 0");
      rec.externals.push_back({r, j(r, r)});
    }
    rec.perron_direction = Vec3::Unit(i);
    rec.degenerate = rec.principal >= 1.0;
    (void)model;
    return rec;
  }

  // Planar point: internal eigenvalues from the face block, external from the
  // diagonal entry of the absent species.
  const auto idx = fp.face.indices();
  const int i = idx[0], k = idx[1];
  const int ext = fp.face.complement().indices()[0];
  for (int c = 0; c < 3; ++c)
    if (c != ext && std::abs(j(ext, c)) > kStructuralZeroTol)
      throw Error(Errc::FaceMismatch, "planar Jacobian lacks its structural zeros");
  Mat2 block;
  block << j(i, i), j(i, k), j(k, i), j(k, k);
  const Real tr = block.trace();
  const Real det = block.determinant();
  const Real disc = tr * tr - 4.0 * det;
  if (disc < 0)
    throw Error(Errc::ComplexInternalEigenvalues,
                "internal eigenvalues are complex; the map is not competitive "
                "at this fixed point");
  const Real root = std::sqrt(disc);
  Real mu_small = (tr - root) / 2.0;
  Real mu_large = (tr + root) / 2.0;
  if (std::abs(mu_small) > std::abs(mu_large)) std::swap(mu_small, mu_large);
  if (!(mu_small > 0) || !(mu_large > 0))
    throw Error(Errc::NonpositiveEigenvalue, "internal eigenvalue <= 0");
  const Real b_ext = j(ext, ext);
  if (!(b_ext > 0))
    throw Error(Errc::NonpositiveEigenvalue, "external eigenvalue <= 0");

  rec.principal = mu_small;
  rec.internal_other = mu_large;
  rec.externals.push_back({ext, b_ext});
  rec.degenerate = mu_small >= 1.0;

  // Consistency: the principal eigenvalue is the reciprocal of the Perron
  // root of the (positive) inverse block.
  const Mat2 inv = block.inverse();
  const Real itr = inv.trace();
  const Real idet = inv.determinant();
  const Real idisc = itr * itr - 4.0 * idet;
  if (idisc < 0)
    throw Error(Errc::ComplexInternalEigenvalues, "inverse block eigenvalues complex");
  const Real perron = (itr + std::sqrt(idisc)) / 2.0;
  if (std::abs(rec.principal * perron - 1.0) > 1e-9)
    throw Error(Errc::NonpositiveEigenvalue,
                "principal eigenvalue does not match the inverse-block Perron root");

  Vec2 r2 = eigenvector_2x2(block, mu_small);
  if (r2[0] < 0) r2 = -r2;
  if (!(r2[0] > 0 && r2[1] > 0))
    throw Error(Errc::NonpositiveEigenvalue,
                "principal eigenvector is not positive on the face");
  Vec2 w2 = eigenvector_2x2(block, mu_large);
  if (w2[0] < 0) w2 = -w2;
  // Eigen residual sanity for both internal pairs.
  if ((block * r2 - mu_small * r2).norm() > 1e-9 ||
      (block * w2 - mu_large * w2).norm() > 1e-9)
    throw Error(Errc::NonpositiveEigenvalue, "internal eigenpair residual too large");

  rec.perron_direction = Vec3::Zero();
  rec.perron_direction[i] = r2[0];
  rec.perron_direction[k] = r2[1];
  rec.tangent_direction = Vec3::Zero();
  rec.tangent_direction[i] = w2[0];
  rec.tangent_direction[k] = w2[1];
  return rec;
}

ClassificationReport classify(const MapModel& model, Real margin_tol) {
  ClassificationReport rep;
  rep.margin_tol = margin_tol;
  rep.note =
      "criterion evaluated at boundary fixed points only; periodic points of "
      "period >= 2 are not searched (boundary face dynamics are conjugate to "
      "monotone interval maps for the supported model classes)";

  const auto axial = find_axial_fixed_points(model);
  for (const auto& fp : axial) rep.spectra.push_back(boundary_spectrum(model, fp));

  const SpeciesSubset faces2[3] = {SpeciesSubset::pair(0, 1),
                                   SpeciesSubset::pair(0, 2),
                                   SpeciesSubset::pair(1, 2)};
  bool continuum = false;
  for (const auto& face : faces2) {
    const auto planar = find_planar_fixed_points(model, face);
    rep.max_planar_points_on_one_face =
        std::max(rep.max_planar_points_on_one_face, int(planar.size()));
    if (planar.size() >= 10) {
      continuum = true;
      continue;  // a curve of fixed points; spectra there are meaningless
    }
    for (const auto& fp : planar) rep.spectra.push_back(boundary_spectrum(model, fp));
  }

  bool degenerate = continuum;
  bool fails = false;
  bool marginal = false;
  for (auto& s : rep.spectra) {
    if (s.degenerate) degenerate = true;
    const Real m = s.margin();
    if (std::abs(m) <= margin_tol) {
      s.marginal = true;
      marginal = true;
    } else if (m < 0) {
      fails = true;
    }
  }
  if (degenerate)
    rep.verdict = ClassVerdict::Degenerate;
  else if (fails)
    rep.verdict = ClassVerdict::CriterionFails;
  else if (marginal)
    rep.verdict = ClassVerdict::Marginal;
  else
    rep.verdict = ClassVerdict::NeatlyEmbeddedPredicted;
  return rep;
}

std::array<std::complex<Real>, 3> eigenvalues_cubic(const Mat3& m) {
  // Characteristic polynomial mu^3 - c2 mu^2 + c1 mu - c0.
  const Real c2 = m.trace();
  const Real c1 = 0.5 * (m.trace() * m.trace() - (m * m).trace());
  const Real c0 = m.determinant();
  // Depressed form t^3 + p t + q with mu = t + c2/3.
  const Real shift = c2 / 3.0;
  const Real p = c1 - c2 * c2 / 3.0;
  const Real q = -c0 + c1 * shift - 2.0 * c2 * c2 * c2 / 27.0;
  std::array<std::complex<Real>, 3> roots;
  const Real disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc >= 0) {
    // Three real roots (trigonometric form).
    const Real a = std::sqrt(std::max(0.0, -p / 3.0));
    if (a == 0.0) {
      roots = {std::complex<Real>(shift), std::complex<Real>(shift),
               std::complex<Real>(shift)};
    } else {
      const Real arg = std::clamp(3.0 * q / (2.0 * p * a), -1.0, 1.0);
      const Real phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k)
        roots[k] = std::complex<Real>(
            2.0 * a * std::cos(phi - 2.0 * M_PI * k / 3.0) + shift);
    }
  } else {
    // One real root (Cardano) and a complex pair.
    const Real s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    const Real u = std::cbrt(-q / 2.0 + s);
    const Real v = std::cbrt(-q / 2.0 - s);
    const Real t_real = u + v;
    roots[0] = std::complex<Real>(t_real + shift);
    const Real re = -t_real / 2.0;
    const Real im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
    roots[1] = std::complex<Real>(re + shift, im);
    roots[2] = std::complex<Real>(re + shift, -im);
  }
  // One Newton polish per root on the characteristic polynomial.
  auto poly = [&](std::complex<Real> mu) {
    return ((mu - c2) * mu + c1) * mu - c0;
  };
  auto dpoly = [&](std::complex<Real> mu) {
    return (3.0 * mu - 2.0 * c2) * mu + c1;
  };
  for (auto& r : roots) {
    const std::complex<Real> d = dpoly(r);
    if (std::abs(d) > 1e-14) r -= poly(r) / d;
  }
  return roots;
}

}  // namespace cslab
