#include "cslab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cslab/rng.hpp"

namespace cslab {

namespace {

constexpr Real kLeaveOctantTol = 1e-9;

// Species pair (lo, hi) of a 2-face.
std::pair<int, int> face_species(SpeciesSubset face) {
  const auto idx = face.indices();
  return {idx[0], idx[1]};
}

}  // namespace

Point3 FaceCurve::point(int k) const {
  const auto [i, j] = face_species(face);
  const Real tk = t(k);
  Point3 p = Point3::Zero();
  p[i] = rho[k] * (1.0 - tk);
  p[j] = rho[k] * tk;
  return p;
}

Real FaceCurve::interpolate(Real tt) const {
  const Real clamped = std::clamp(tt, 0.0, 1.0);
  const Real pos = clamped * level;
  const int k = std::clamp(int(std::floor(pos)), 0, level - 1);
  const Real f = pos - k;
  return (1.0 - f) * rho[k] + f * rho[k + 1];
}

FaceCurve compute_face_curve(const MapModel& model, SpeciesSubset face, int level,
                             const IterationOpts& opts) {
  if (face.card() != 2)
    throw Error(Errc::FaceMismatch, "face curves need a 2-species face");
  if (level < 1 || level > 1024)
    throw Error(Errc::LevelOutOfRange, "face-curve level must be in [1, 1024]");
  const auto [i, j] = face_species(face);
  const Point3 box = model.absorbing_box();

  FaceCurve curve;
  curve.face = face;
  curve.level = level;
  curve.rho.resize(level + 1);
  // Start on the absorbing-box boundary along each ray of the face.
  for (int k = 0; k <= level; ++k) {
    const Real t = curve.t(k);
    Real r = std::numeric_limits<Real>::infinity();
    if (1.0 - t > 0) r = std::min(r, box[i] / (1.0 - t));
    if (t > 0) r = std::min(r, box[j] / t);
    curve.rho[k] = r;
  }

  std::vector<Real> img_t(level + 1), img_rho(level + 1);
  Eigen::VectorXd next(level + 1);
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    for (int k = 0; k <= level; ++k) {
      const Point3 q = model.eval(curve.point(k));
      if (q.minCoeff() < -kLeaveOctantTol)
        throw Error(Errc::HypothesisViolation, "face iterate left the octant");
      const Real r = q[i] + q[j];
      if (!(r > 0))
        throw Error(Errc::FoldedImage, "face iterate collapsed to the origin");
      img_rho[std::size_t(k)] = r;
      img_t[std::size_t(k)] = q[j] / r;
    }
    for (int k = 0; k < level; ++k)
      if (!(img_t[std::size_t(k)] < img_t[std::size_t(k + 1)]))
        throw Error(Errc::FoldedImage,
                    "pushed-forward face directions are not monotone");
    // Re-grid by linear interpolation of radius over the image parameters.
    int seg = 0;
    for (int k = 0; k <= level; ++k) {
      const Real t = curve.t(k);
      while (seg < level - 1 && img_t[std::size_t(seg + 1)] < t) ++seg;
      const Real t0 = img_t[std::size_t(seg)];
      const Real t1 = img_t[std::size_t(seg + 1)];
      const Real f = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
      next[k] = (1.0 - f) * img_rho[std::size_t(seg)] + f * img_rho[std::size_t(seg + 1)];
    }
    const Real delta = (next - curve.rho).cwiseAbs().maxCoeff();
    curve.rho = next;
    curve.iterations = iter;
    curve.residual = delta;
    if (delta < opts.tol) {
      curve.converged = true;
      break;
    }
  }
  if (!curve.converged && curve.residual > 100.0 * opts.tol)
    throw Error(Errc::NonConvergence,
                "face curve did not converge: last change " +
                    std::to_string(curve.residual));
  return curve;
}

const FaceCurve& SimplexApproximation::face_curve(SpeciesSubset face) const {
  for (const auto& c : face_curves)
    if (c.face == face) return c;
  throw Error(Errc::FaceMismatch, "no face curve for " + face.str());
}

SimplexApproximation compute_surface(const MapModel& model, const DeltaGrid& grid,
                                     const IterationOpts& opts) {
  SimplexApproximation approx;
  approx.model_fingerprint = model.fingerprint();
  approx.opts_used = opts;
  approx.face_curves = {compute_face_curve(model, SpeciesSubset::pair(0, 1),
                                           grid.level, opts),
                        compute_face_curve(model, SpeciesSubset::pair(0, 2),
                                           grid.level, opts),
                        compute_face_curve(model, SpeciesSubset::pair(1, 2),
                                           grid.level, opts)};

  const Point3 box = model.absorbing_box();
  RadialGraph& g = approx.surface;
  g.grid = grid;
  g.rho.resize(grid.node_count());

  // Pinned boundary values from the face curves; the curve parameter runs
  // from the lower to the higher species index of the face.
  auto boundary_value = [&](int k) -> Real {
    const SimplexPoint& y = grid.nodes[std::size_t(k)];
    const SpeciesSubset face = grid.node_face[std::size_t(k)];
    if (face.card() == 1) {
      const int axis = face.indices()[0];
      for (const auto& c : approx.face_curves) {
        if (!c.face.contains(axis)) continue;
        const auto [i, j] = face_species(c.face);
        return c.rho[axis == i ? 0 : c.level];
      }
    }
    const FaceCurve& c = approx.face_curve(face);
    const auto [i, j] = face_species(c.face);
    (void)i;
    return c.interpolate(y[j]);
  };

  // Initial surface: the absorbing-box boundary radially above the attractor.
  for (int k = 0; k < grid.node_count(); ++k) {
    const SimplexPoint& y = grid.nodes[std::size_t(k)];
    if (grid.node_face[std::size_t(k)].card() < 3) {
      g.rho[k] = boundary_value(k);
      continue;
    }
    Real r = std::numeric_limits<Real>::infinity();
    for (int i = 0; i < 3; ++i)
      if (y[i] > 0) r = std::min(r, box[i] / y[i]);
    g.rho[k] = r;
  }

  std::vector<SimplexPoint> img_dirs(static_cast<std::size_t>(grid.node_count()));
  std::vector<Real> img_rho(static_cast<std::size_t>(grid.node_count()));
  Eigen::VectorXd next(grid.node_count());
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    for (int k = 0; k < grid.node_count(); ++k) {
      const Point3 q = model.eval(g.point(k));
      if (q.minCoeff() < -kLeaveOctantTol)
        throw Error(Errc::HypothesisViolation, "surface iterate left the octant");
      const RadialProjection rp = radial_project(q.cwiseMax(0.0));
      img_dirs[std::size_t(k)] = rp.direction;
      img_rho[std::size_t(k)] = rp.radius;
    }
    // A fold shows up as a collapsed or inverted push-forward triangle.
    for (const auto& tr : grid.triangles) {
      const Real a2 = triangle_area2(img_dirs[std::size_t(tr[0])],
                                     img_dirs[std::size_t(tr[1])],
                                     img_dirs[std::size_t(tr[2])]);
      if (a2 < 1e-14)
        throw Error(Errc::FoldedImage,
                    "push-forward triangle degenerated (signed area " +
                        std::to_string(a2) + ")");
    }
    const PushforwardField field(img_dirs, img_rho, grid.triangles);
    for (int k = 0; k < grid.node_count(); ++k) {
      if (grid.node_face[std::size_t(k)].card() < 3) {
        next[k] = boundary_value(k);
        continue;
      }
      const InterpolatedRadius ir = field.interpolate(grid.nodes[std::size_t(k)]);
      if (ir.extrapolated) ++approx.extrapolated_queries;
      next[k] = ir.rho;
    }
    const Real delta = (next - g.rho).cwiseAbs().maxCoeff();
    g.rho = next;
    g.iterations = iter;
    g.last_update = delta;
    g.update_history.push_back(delta);
    if (delta < opts.tol) {
      approx.converged = true;
      break;
    }
  }
  approx.hausdorff_step = g.last_update;
  if (!approx.converged && approx.hausdorff_step > 100.0 * opts.tol)
    throw Error(Errc::NonConvergence,
               "surface did not converge: last change " +
                    std::to_string(approx.hausdorff_step));
  return approx;
}

Real invariance_residual(const MapModel& model, const SimplexApproximation& approx) {
  const RadialGraph& g = approx.surface;
  Real worst = 0;
  for (int k = 0; k < g.grid.node_count(); ++k) {
    const Point3 q = model.eval(g.point(k));
    worst = std::max(worst, graph_distance(g, q));
  }
  return worst;
}

UnorderednessReport unorderedness_check(const SimplexApproximation& approx,
                                        Real margin) {
  UnorderednessReport rep;
  rep.margin_used = margin;
  const RadialGraph& g = approx.surface;
  const int n = g.grid.node_count();
  std::vector<Point3> pts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) pts[std::size_t(k)] = g.point(k);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const Point3 d = pts[std::size_t(b)] - pts[std::size_t(a)];
      ++rep.pairs_checked;
      if (d.minCoeff() > margin) {
        rep.violations.push_back({a, b, d.minCoeff()});
      } else if ((-d).minCoeff() > margin) {
        rep.violations.push_back({b, a, (-d).minCoeff()});
      }
    }
  }
  return rep;
}

AttractionReport attraction_check(const MapModel& model,
                                  const SimplexApproximation& approx, int n_seeds,
                                  int burn_in, std::uint64_t seed) {
  AttractionReport rep;
  rep.seeds = n_seeds;
  rep.burn_in = burn_in;
  const Point3 box = model.absorbing_box();
  const RadialGraph& g = approx.surface;
  Real sum = 0;
  for (int s = 0; s < n_seeds; ++s) {
    Rng rng = Rng::derive(seed + 31337, std::uint64_t(s));
    Point3 x(rng.uniform(1e-3, box[0]), rng.uniform(1e-3, box[1]),
             rng.uniform(1e-3, box[2]));
    for (int it = 0; it < burn_in; ++it) x = model.eval(x);
    const Real d = graph_distance(g, x);
    rep.max_distance = std::max(rep.max_distance, d);
    sum += d;
  }
  rep.mean_distance = n_seeds ? sum / n_seeds : 0.0;
  rep.threshold =
      std::max(2.0 / g.grid.level, 1e-3) * g.mean_radius();
  rep.pass = rep.max_distance < rep.threshold;
  return rep;
}

}  // namespace cslab
