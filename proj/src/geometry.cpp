#include "cslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cslab {

namespace {

constexpr Real kBaryTol = 1e-10;       // point-in-triangle tolerance
constexpr Real kDegenerateArea = 1e-14;
constexpr Real kFaceTol = 1e-12;       // off-face coordinate tolerance

}  // namespace

RadialProjection radial_project(const Point3& x) {
  if (!x.allFinite()) throw Error(Errc::NumericOverflow, "non-finite point");
  if (x.minCoeff() < 0)
    throw Error(Errc::FaceMismatch, "point outside the nonnegative octant");
  if (x.maxCoeff() <= 1e-300)
    throw Error(Errc::ZeroPoint, "cannot project the origin radially");
  const Real rho = x.sum();
  return {x / rho, rho};
}

OrderRelation order_compare(const Point3& p, const Point3& q, SpeciesSubset face) {
  for (int i = 0; i < 3; ++i) {
    if (face.contains(i)) continue;
    if (std::abs(p[i]) > kFaceTol || std::abs(q[i]) > kFaceTol)
      throw Error(Errc::FaceMismatch,
                  "point has a nonzero coordinate outside face " + face.str());
  }
  bool all_leq = true, all_strict = true, any_strict = false, all_eq = true;
  for (int i = 0; i < 3; ++i) {
    if (!face.contains(i)) continue;
    if (p[i] > q[i]) all_leq = false;
    if (p[i] >= q[i]) all_strict = false;
    if (p[i] < q[i]) any_strict = true;
    if (p[i] != q[i]) all_eq = false;
  }
  if (all_eq) return OrderRelation::Equal;
  if (all_strict) return OrderRelation::AllStrict;
  if (all_leq && any_strict) return OrderRelation::LeqStrictSomewhere;
  return OrderRelation::Incomparable;
}

int DeltaGrid::node_index(int i, int j) const {
  // Row i holds level+1-i nodes; rows 0..i-1 precede it.
  return i * (2 * (level + 1) - i + 1) / 2 + j;
}

DeltaGrid make_grid(int level) {
  if (level < 1 || level > 1024)
    throw Error(Errc::LevelOutOfRange, "grid level must be in [1, 1024]");
  DeltaGrid g;
  g.level = level;
  const Real L = Real(level);
  g.nodes.reserve(std::size_t((level + 1) * (level + 2) / 2));
  for (int i = 0; i <= level; ++i) {
    for (int j = 0; j <= level - i; ++j) {
      const int k = level - i - j;
      g.nodes.emplace_back(Real(i) / L, Real(j) / L, Real(k) / L);
      unsigned mask = 0;
      if (i > 0) mask |= 1u;
      if (j > 0) mask |= 2u;
      if (k > 0) mask |= 4u;
      g.node_face.push_back(SpeciesSubset::from_mask(mask));
    }
  }
  for (int i = 0; i < level; ++i) {
    for (int j = 0; j < level - i; ++j) {
      g.triangles.emplace_back(g.node_index(i, j), g.node_index(i + 1, j),
                               g.node_index(i, j + 1));
      if (i + j < level - 1)
        g.triangles.emplace_back(g.node_index(i + 1, j),
                                 g.node_index(i + 1, j + 1),
                                 g.node_index(i, j + 1));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// PushforwardField
// ---------------------------------------------------------------------------

PushforwardField::PushforwardField(std::vector<SimplexPoint> directions,
                                   std::vector<Real> radii,
                                   std::vector<Eigen::Vector3i> triangles)
    : dirs_(std::move(directions)),
      radii_(std::move(radii)),
      tris_(std::move(triangles)) {
  area2_.resize(tris_.size());
  max_area2_ = 0;
  min_area2_ = tris_.empty() ? 0 : std::numeric_limits<Real>::infinity();
  // Bin count ~ sqrt(#triangles) per side keeps a handful of candidates/bin.
  bins_per_side_ = std::max(1, int(std::sqrt(double(tris_.size() + 1))));
  bins_.assign(std::size_t(bins_per_side_) * bins_per_side_, {});
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const auto& tr = tris_[t];
    const SimplexPoint& a = dirs_[tr[0]];
    const SimplexPoint& b = dirs_[tr[1]];
    const SimplexPoint& c = dirs_[tr[2]];
    area2_[t] = triangle_area2(a, b, c);
    max_area2_ = std::max(max_area2_, std::abs(area2_[t]));
    min_area2_ = std::min(min_area2_, area2_[t]);
    const Real pad = 2 * kBaryTol;
    const Real ulo = std::min({a.x(), b.x(), c.x()}) - pad;
    const Real uhi = std::max({a.x(), b.x(), c.x()}) + pad;
    const Real vlo = std::min({a.y(), b.y(), c.y()}) - pad;
    const Real vhi = std::max({a.y(), b.y(), c.y()}) + pad;
    const int bu0 = std::clamp(int(ulo * bins_per_side_), 0, bins_per_side_ - 1);
    const int bu1 = std::clamp(int(uhi * bins_per_side_), 0, bins_per_side_ - 1);
    const int bv0 = std::clamp(int(vlo * bins_per_side_), 0, bins_per_side_ - 1);
    const int bv1 = std::clamp(int(vhi * bins_per_side_), 0, bins_per_side_ - 1);
    for (int bu = bu0; bu <= bu1; ++bu)
      for (int bv = bv0; bv <= bv1; ++bv)
        bins_[std::size_t(bu) * bins_per_side_ + bv].tris.push_back(int(t));
  }
}

int PushforwardField::bin_of(Real u, Real v) const {
  const int bu = std::clamp(int(u * bins_per_side_), 0, bins_per_side_ - 1);
  const int bv = std::clamp(int(v * bins_per_side_), 0, bins_per_side_ - 1);
  return bu * bins_per_side_ + bv;
}

InterpolatedRadius PushforwardField::interpolate(const SimplexPoint& query) const {
  const auto& candidates = bins_[bin_of(query.x(), query.y())].tris;
  for (int t : candidates) {
    const auto& tr = tris_[std::size_t(t)];
    const SimplexPoint& a = dirs_[tr[0]];
    const SimplexPoint& b = dirs_[tr[1]];
    const SimplexPoint& c = dirs_[tr[2]];
    if (std::abs(area2_[std::size_t(t)]) < kDegenerateArea) {
      const Real pad = kBaryTol;
      const bool in_box =
          query.x() >= std::min({a.x(), b.x(), c.x()}) - pad &&
          query.x() <= std::max({a.x(), b.x(), c.x()}) + pad &&
          query.y() >= std::min({a.y(), b.y(), c.y()}) - pad &&
          query.y() <= std::max({a.y(), b.y(), c.y()}) + pad;
      if (in_box)
        throw Error(Errc::DegenerateTriangle,
                    "query falls on a collapsed push-forward triangle");
      continue;
    }
    const Eigen::Vector3d w =
        barycentric_weights(a, b, c, query, area2_[std::size_t(t)]);
    if (w.minCoeff() >= -kBaryTol) {
      // Snap to a coincident source point so exact queries reproduce exactly.
      for (int v = 0; v < 3; ++v)
        if ((dirs_[tr[v]] - query).squaredNorm() < 1e-28)
          return {radii_[tr[v]], false};
      return {w[0] * radii_[tr[0]] + w[1] * radii_[tr[1]] + w[2] * radii_[tr[2]],
              false};
    }
  }
  // Outside every triangle: clamp to the nearest source point.
  int best = 0;
  Real best_d = std::numeric_limits<Real>::infinity();
  for (std::size_t k = 0; k < dirs_.size(); ++k) {
    const Real d = (dirs_[k] - query).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = int(k);
    }
  }
  return {radii_[std::size_t(best)], true};
}

InterpolatedRadius interpolate_pushforward(
    std::span<const SimplexPoint> directions, std::span<const Real> radii,
    std::span<const Eigen::Vector3i> triangles, const SimplexPoint& query) {
  PushforwardField field({directions.begin(), directions.end()},
                         {radii.begin(), radii.end()},
                         {triangles.begin(), triangles.end()});
  return field.interpolate(query);
}

// ---------------------------------------------------------------------------
// RadialGraph
// ---------------------------------------------------------------------------

Real RadialGraph::interpolate(const SimplexPoint& y) const {
  const int L = grid.level;
  // Locate the cell of (y1, y2) in lattice units.
  Real u = y.x() * L;
  Real v = y.y() * L;
  int i = std::clamp(int(std::floor(u)), 0, L - 1);
  int j = std::clamp(int(std::floor(v)), 0, L - 1);
  if (i + j > L - 1) {
    // Rounding pushed the query just outside the simplex; pull it back onto
    // the hypotenuse cell.
    const int over = i + j - (L - 1);
    if (u - i > v - j) {
      i -= std::min(over, i);
    } else {
      j -= std::min(over, j);
    }
    if (i + j > L - 1) j = L - 1 - i;
  }
  const Real fu = u - i;
  const Real fv = v - j;
  int a, b, c;
  if (fu + fv <= 1.0 || i + j == L - 1) {
    a = grid.node_index(i, j);
    b = grid.node_index(i + 1, j);
    c = grid.node_index(i, j + 1);
  } else {
    a = grid.node_index(i + 1, j);
    b = grid.node_index(i + 1, j + 1);
    c = grid.node_index(i, j + 1);
  }
  const Eigen::Vector3d w = barycentric_weights(
      grid.nodes[a], grid.nodes[b], grid.nodes[c], y,
      triangle_area2(grid.nodes[a], grid.nodes[b], grid.nodes[c]));
  return w[0] * rho[a] + w[1] * rho[b] + w[2] * rho[c];
}

Real graph_distance(const RadialGraph& g, const Point3& p) {
  const RadialProjection rp = radial_project(p);
  return std::abs(rp.radius - g.interpolate(rp.direction));
}

}  // namespace cslab
