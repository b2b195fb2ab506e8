#include "cslab/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cslab/rng.hpp"

namespace cslab {

namespace {

constexpr Real kZeroTol = 1e-12;   // exact-vanishing tolerance for face coords
constexpr Real kNearBand = 1e-9;   // strict-inequality checks this close to
                                   // their threshold are inconclusive

std::string matrix_str(const Mat3& a) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (int i = 0; i < 3; ++i) {
    os << "[" << a(i, 0) << "," << a(i, 1) << "," << a(i, 2) << "]";
    if (i < 2) os << ",";
  }
  os << "]";
  return os.str();
}

std::string vec_str(const Vec3& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << v[0] << "," << v[1] << "," << v[2] << "]";
  return os.str();
}

// All nonempty subsets of {1,2,3}, singletons first.
std::vector<SpeciesSubset> all_faces() {
  std::vector<SpeciesSubset> f;
  for (unsigned m : {1u, 2u, 4u, 3u, 5u, 6u, 7u}) f.push_back(SpeciesSubset::from_mask(m));
  return f;
}

Point3 random_face_point(Rng& rng, SpeciesSubset face, const Point3& box) {
  Point3 x = Point3::Zero();
  for (int i = 0; i < 3; ++i)
    if (face.contains(i)) x[i] = rng.uniform(1e-6, box[i]);
  return x;
}

}  // namespace

void LeslieGowerParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(lambda[i] > 1.0))
      throw Error(Errc::ConfigError, "leslie_gower requires lambda_i > 1");
    for (int j = 0; j < 3; ++j)
      if (!(a(i, j) > 0.0))
        throw Error(Errc::ConfigError, "leslie_gower requires a_ij > 0");
  }
}

void RickerParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(r[i] > 0.0 && r[i] < 1.0))
      throw Error(Errc::ConfigError, "ricker requires r_i in (0, 1)");
    for (int j = 0; j < 3; ++j)
      if (!(a(i, j) > 0.0))
        throw Error(Errc::ConfigError, "ricker requires a_ij > 0");
  }
}

MapModel MapModel::leslie_gower(const LeslieGowerParams& p, JacobianMode mode,
                                Real fd_step) {
  p.validate();
  MapModel m;
  m.kind_ = ModelKind::LeslieGower;
  m.mode_ = mode;
  m.fd_step_ = fd_step;
  m.lg_ = std::make_shared<LeslieGowerParams>(p);
  auto params = m.lg_;
  m.eval_ = [params](const Point3& x) -> Point3 {
    const Vec3 ax = params->a * x;
    Point3 y;
    for (int i = 0; i < 3; ++i) y[i] = params->lambda[i] * x[i] / (1.0 + ax[i]);
    return y;
  };
  m.analytic_jacobian_ = [params](const Point3& x) -> Mat3 {
    const Vec3 ax = params->a * x;
    Mat3 j;
    for (int i = 0; i < 3; ++i) {
      const Real s = 1.0 + ax[i];
      for (int k = 0; k < 3; ++k) {
        const Real d = (i == k) ? s : 0.0;
        j(i, k) = params->lambda[i] * (d - x[i] * params->a(i, k)) / (s * s);
      }
    }
    return j;
  };
  Point3 box;
  for (int i = 0; i < 3; ++i) box[i] = p.lambda[i] / p.a(i, i);
  m.box_ = box;
  m.fingerprint_ =
      "leslie_gower lambda=" + vec_str(p.lambda) + " a=" + matrix_str(p.a);
  return m;
}

MapModel MapModel::ricker(const RickerParams& p, JacobianMode mode, Real fd_step) {
  p.validate();
  MapModel m;
  m.kind_ = ModelKind::Ricker;
  m.mode_ = mode;
  m.fd_step_ = fd_step;
  m.rk_ = std::make_shared<RickerParams>(p);
  auto params = m.rk_;
  m.eval_ = [params](const Point3& x) -> Point3 {
    const Vec3 ax = params->a * x;
    Point3 y;
    for (int i = 0; i < 3; ++i)
      y[i] = x[i] * std::exp(params->r[i] * (1.0 - ax[i]));
    return y;
  };
  m.analytic_jacobian_ = [params](const Point3& x) -> Mat3 {
    const Vec3 ax = params->a * x;
    Mat3 j;
    for (int i = 0; i < 3; ++i) {
      const Real e = std::exp(params->r[i] * (1.0 - ax[i]));
      for (int k = 0; k < 3; ++k) {
        const Real d = (i == k) ? 1.0 : 0.0;
        j(i, k) = e * (d - params->r[i] * x[i] * params->a(i, k));
      }
    }
    return j;
  };
  Point3 box;
  for (int i = 0; i < 3; ++i)
    box[i] = 1.1 * std::exp(p.r[i] - 1.0) / (p.r[i] * p.a(i, i));
  m.box_ = box;
  m.fingerprint_ = "ricker r=" + vec_str(p.r) + " a=" + matrix_str(p.a);
  return m;
}

MapModel MapModel::external(ExternalHooks hooks, Real fd_step) {
  if (!hooks.eval)
    throw Error(Errc::UnsupportedModel, "external model without eval hook");
  MapModel m;
  m.kind_ = ModelKind::External;
  m.mode_ = hooks.jacobian ? JacobianMode::Analytic : JacobianMode::FiniteDifference;
  m.fd_step_ = fd_step;
  m.eval_ = std::move(hooks.eval);
  m.analytic_jacobian_ = std::move(hooks.jacobian);
  m.box_ = hooks.absorbing_box;
  m.fingerprint_ = "external " + hooks.description;
  return m;
}

Point3 MapModel::eval(const Point3& x) const {
  const Point3 y = eval_(x);
  if (!y.allFinite())
    throw Error(Errc::NumericOverflow, "map produced a non-finite value");
  return y;
}

Mat3 MapModel::jacobian(const Point3& x) const {
  Mat3 j;
  if (mode_ == JacobianMode::Analytic && analytic_jacobian_) {
    j = analytic_jacobian_(x);
  } else {
    j = finite_difference_jacobian(x);
  }
  if (!j.allFinite())
    throw Error(Errc::NumericOverflow, "jacobian produced a non-finite value");
  if (std::abs(j.determinant()) < 1e-12)
    throw Error(Errc::SingularJacobian, "|det DP| < 1e-12 at " + vec_str(x));
  return j;
}

Mat3 MapModel::finite_difference_jacobian(const Point3& x) const {
  Mat3 j;
  for (int k = 0; k < 3; ++k) {
    const Real h = fd_step_ * (1.0 + std::abs(x[k]));
    Point3 xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Point3 col = (eval_(xp) - eval_(xm)) / (2.0 * h);
    j.col(k) = col;
  }
  return j;
}

Point3 MapModel::absorbing_box() const {
  if (!box_)
    throw Error(Errc::UnsupportedModel,
                "external model did not declare an absorbing box");
  return *box_;
}

// ---------------------------------------------------------------------------
// Hypothesis checkers
// ---------------------------------------------------------------------------

bool HypothesisReport::has_hard_violation() const {
  for (const auto& f : findings)
    if (f.severity == HypothesisFinding::Severity::Violation) return true;
  return false;
}

void HypothesisReport::finalize() {
  if (has_hard_violation())
    verdict = HypVerdict::Fail;
  else if (!findings.empty())
    verdict = HypVerdict::Inconclusive;
  else
    verdict = HypVerdict::Pass;
}

const char* hyp_verdict_name(HypVerdict v) {
  switch (v) {
    case HypVerdict::Pass: return "pass";
    case HypVerdict::Fail: return "fail";
    case HypVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

HypothesisReport check_h2(const MapModel& model, long sample_budget,
                          std::uint64_t seed) {
  HypothesisReport rep;
  rep.hypothesis = "H2";
  const Point3 box = model.absorbing_box();
  for (SpeciesSubset face : all_faces()) {
    for (long s = 0; s < sample_budget; ++s) {
      Rng rng = Rng::derive(seed, (std::uint64_t(face.mask()) << 32) | std::uint64_t(s));
      const Point3 x = random_face_point(rng, face, box);
      const Point3 y = model.eval(x);
      ++rep.sample_count;
      for (int i = 0; i < 3; ++i) {
        if (!face.contains(i)) {
          const Real v = std::abs(y[i]);
          if (v > kZeroTol) {
            HypothesisFinding f;
            f.severity = v > kZeroTol + kNearBand
                             ? HypothesisFinding::Severity::Violation
                             : HypothesisFinding::Severity::NearThreshold;
            f.face = face;
            f.points = {x};
            f.quantity = "off-face image coordinate " + std::to_string(i + 1);
            f.measured = v;
            f.threshold = kZeroTol;
            rep.findings.push_back(std::move(f));
          }
        } else if (!(y[i] > 0.0)) {
          HypothesisFinding f;
          f.face = face;
          f.points = {x};
          f.quantity = "open-face image coordinate " + std::to_string(i + 1);
          f.measured = y[i];
          f.threshold = 0.0;
          rep.findings.push_back(std::move(f));
        }
      }
    }
  }
  rep.finalize();
  return rep;
}

HypothesisReport check_h3prime(const MapModel& model, long sample_budget,
                               std::uint64_t seed) {
  HypothesisReport rep;
  rep.hypothesis = "H3'";
  const Point3 box = model.absorbing_box();
  for (SpeciesSubset face : all_faces()) {
    for (long s = 0; s < sample_budget; ++s) {
      Rng rng = Rng::derive(seed + 101, (std::uint64_t(face.mask()) << 32) | std::uint64_t(s));
      const Point3 x = random_face_point(rng, face, box);
      ++rep.sample_count;
      Mat3 inv;
      try {
        inv = model.jacobian(x).inverse();
      } catch (const Error& e) {
        HypothesisFinding f;
        f.severity = HypothesisFinding::Severity::NearThreshold;
        f.face = face;
        f.points = {x};
        f.quantity = std::string("jacobian not invertible (") + e.what() + ")";
        rep.findings.push_back(std::move(f));
        continue;
      }
      // Face block of the inverse must be strictly positive.
      for (int i = 0; i < 3; ++i) {
        if (!face.contains(i)) continue;
        for (int j = 0; j < 3; ++j) {
          if (!face.contains(j)) continue;
          const Real v = inv(i, j);
          if (v < kNearBand) {
            HypothesisFinding f;
            f.severity = v <= -kNearBand
                             ? HypothesisFinding::Severity::Violation
                             : HypothesisFinding::Severity::NearThreshold;
            f.face = face;
            f.points = {x};
            f.quantity = "inverse entry (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ")";
            f.measured = v;
            f.threshold = 0.0;
            rep.findings.push_back(std::move(f));
          }
        }
      }
      // Each complementary basis direction must push back into the face:
      // some face row of its inverse column is positive.
      if (face.card() < 3) {
        for (int k = 0; k < 3; ++k) {
          if (face.contains(k)) continue;
          Real best = -std::numeric_limits<Real>::infinity();
          for (int j = 0; j < 3; ++j)
            if (face.contains(j)) best = std::max(best, inv(j, k));
          if (best < kNearBand) {
            HypothesisFinding f;
            f.severity = best <= -kNearBand
                             ? HypothesisFinding::Severity::Violation
                             : HypothesisFinding::Severity::NearThreshold;
            f.face = face;
            f.points = {x};
            f.quantity = "no positive face response to e_" + std::to_string(k + 1);
            f.measured = best;
            f.threshold = 0.0;
            rep.findings.push_back(std::move(f));
          }
        }
      }
    }
  }
  rep.finalize();
  return rep;
}

HypothesisReport check_h4prime(const MapModel& model) {
  HypothesisReport rep;
  rep.hypothesis = "H4'";
  const Point3 box = model.absorbing_box();
  const int scan_points = 1000;
  for (int axis = 0; axis < 3; ++axis) {
    const SpeciesSubset face = SpeciesSubset::single(axis);
    auto g = [&](Real s) {
      Point3 x = Point3::Zero();
      x[axis] = s;
      return model.eval(x)[axis] - s;
    };
    // Sign-change scan on (0, M].
    int sign_changes = 0;
    Real lo = 0, hi = 0;
    Real prev_s = box[axis] * 1.0 / scan_points;
    Real prev_g = g(prev_s);
    for (int k = 2; k <= scan_points; ++k) {
      const Real s = box[axis] * Real(k) / scan_points;
      const Real gs = g(s);
      rep.sample_count++;
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
    if (sign_changes == 0) {
      HypothesisFinding f;
      f.face = face;
      f.quantity = "no axial fixed point found on axis " + std::to_string(axis + 1);
      rep.findings.push_back(std::move(f));
      continue;
    }
    if (sign_changes > 1) {
      HypothesisFinding f;
      f.face = face;
      f.quantity = "multiple axial fixed points on axis " + std::to_string(axis + 1);
      f.measured = Real(sign_changes);
      f.threshold = 1.0;
      rep.findings.push_back(std::move(f));
      continue;
    }
    // Bisection, then a few Newton polish steps on the scalar residual.
    for (int it = 0; it < 80; ++it) {
      const Real mid = 0.5 * (lo + hi);
      if (g(lo) * g(mid) <= 0)
        hi = mid;
      else
        lo = mid;
    }
    Real u = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
      const Real h = 1e-7 * (1.0 + u);
      const Real d = (g(u + h) - g(u - h)) / (2 * h);
      if (std::abs(d) < 1e-14) break;
      u -= g(u) / d;
    }
    Point3 ux = Point3::Zero();
    ux[axis] = u;
    const Mat3 j = model.jacobian(ux);
    const Real deriv = j(axis, axis);
    if (!(deriv > kNearBand && deriv < 1.0 - kNearBand)) {
      HypothesisFinding f;
      f.severity = (deriv > 0.0 && deriv < 1.0)
                       ? HypothesisFinding::Severity::NearThreshold
                       : HypothesisFinding::Severity::Violation;
      f.face = face;
      f.points = {ux};
      f.quantity = "axial derivative outside (0, 1)";
      f.measured = deriv;
      f.threshold = 1.0;
      rep.findings.push_back(std::move(f));
    }
    for (int jdx = 0; jdx < 3; ++jdx) {
      if (jdx == axis) continue;
      const Real cp = j(axis, jdx);
      if (!(cp < -kNearBand)) {
        HypothesisFinding f;
        f.severity = cp < 0.0 ? HypothesisFinding::Severity::NearThreshold
                              : HypothesisFinding::Severity::Violation;
        f.face = face;
        f.points = {ux};
        f.quantity = "cross-partial dP_" + std::to_string(axis + 1) + "/dx_" +
                     std::to_string(jdx + 1) + " not negative";
        f.measured = cp;
        f.threshold = 0.0;
        rep.findings.push_back(std::move(f));
      }
    }
  }
  rep.finalize();
  return rep;
}

HypothesisReport check_h6(const MapModel& model, long pair_budget,
                          std::uint64_t seed) {
  HypothesisReport rep;
  rep.hypothesis = "H6";
  const Point3 box = model.absorbing_box();
  for (SpeciesSubset face : all_faces()) {
    long accepted = 0;
    long attempts = 0;
    const long max_attempts = pair_budget * 50;
    std::uint64_t stream = 0;
    while (accepted < pair_budget && attempts < max_attempts) {
      Rng rng = Rng::derive(seed + 202,
                            (std::uint64_t(face.mask()) << 32) | stream++);
      ++attempts;
      Point3 x = random_face_point(rng, face, box);
      Point3 y = random_face_point(rng, face, box);
      Point3 px = model.eval(x);
      Point3 py = model.eval(y);
      // Require 0 << Px << Py on the face; swap if the pair is ordered the
      // other way.
      bool ok_pos = true, x_lt_y = true, y_lt_x = true;
      for (int i = 0; i < 3; ++i) {
        if (!face.contains(i)) continue;
        if (!(px[i] > kZeroTol && py[i] > kZeroTol)) ok_pos = false;
        if (!(px[i] < py[i])) x_lt_y = false;
        if (!(py[i] < px[i])) y_lt_x = false;
      }
      if (!ok_pos || (!x_lt_y && !y_lt_x)) continue;
      if (y_lt_x) {
        std::swap(x, y);
        std::swap(px, py);
      }
      ++accepted;
      ++rep.sample_count;
      for (int i = 0; i < 3; ++i) {
        if (!face.contains(i)) continue;
        const Real lhs = px[i] / py[i];
        const Real rhs = x[i] / y[i];
        if (lhs < rhs - 1e-10) {
          HypothesisFinding f;
          f.face = face;
          f.points = {x, y};
          f.quantity = "image ratio below pre-image ratio for species " +
                       std::to_string(i + 1);
          f.measured = lhs - rhs;
          f.threshold = -1e-10;
          rep.findings.push_back(std::move(f));
        }
      }
    }
  }
  rep.finalize();
  return rep;
}

}  // namespace cslab
