#ifndef CSLAB_GEOMETRY_HPP_
#define CSLAB_GEOMETRY_HPP_

#include <span>
#include <vector>

#include "cslab/types.hpp"

namespace cslab {

// ---------------------------------------------------------------------------
// Radial projection and partial orders
// ---------------------------------------------------------------------------

struct RadialProjection {
  SimplexPoint direction;  // on the probability simplex
  Real radius;             // 1-norm scale: sum of coordinates
};

// Projects x in C\{0} onto the probability simplex along its ray.
// radius * direction reconstructs x up to rounding.
RadialProjection radial_project(const Point3& x);

enum class OrderRelation {
  Equal,
  LeqStrictSomewhere,  // p <_I q but not p <<_I q
  AllStrict,           // p <<_I q
  Incomparable,        // everything else, including q <= p
};

// Relation of p to q under the face order <=_I. The result is directional:
// call with swapped arguments for the reverse direction. Both points must lie
// on the face H_I^+ (coordinates outside I zero within 1e-12).
OrderRelation order_compare(const Point3& p, const Point3& q, SpeciesSubset face);

// ---------------------------------------------------------------------------
// Triangular grid on the probability simplex
// ---------------------------------------------------------------------------

struct DeltaGrid {
  int level = 0;
  std::vector<SimplexPoint> nodes;          // lexicographic in (i, j)
  std::vector<Eigen::Vector3i> triangles;   // positively oriented in (y1,y2)
  // Support of each node: the face subset it belongs to. Interior nodes map
  // to the full set {1,2,3}; boundary nodes to the face of their zero pattern.
  std::vector<SpeciesSubset> node_face;

  int node_count() const { return int(nodes.size()); }
  int triangle_count() const { return int(triangles.size()); }
  // Index of node (i, j) with barycentric coordinates (i/L, j/L, 1-i/L-j/L).
  int node_index(int i, int j) const;
};

DeltaGrid make_grid(int level);

// ---------------------------------------------------------------------------
// Scalar-generic barycentric helpers in the (y1, y2) chart of the simplex
// ---------------------------------------------------------------------------

// Twice the signed area of triangle (a, b, c) seen in the (y1, y2) chart.
template <typename DA, typename DB, typename DC>
inline typename DA::Scalar triangle_area2(const Eigen::MatrixBase<DA>& a,
                                          const Eigen::MatrixBase<DB>& b,
                                          const Eigen::MatrixBase<DC>& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Barycentric coordinates of q with respect to triangle (a, b, c); the
// returned weights sum to one. `area2` must be the signed area from above.
template <typename DA, typename DB, typename DC, typename DQ>
inline Eigen::Matrix<typename DA::Scalar, 3, 1> barycentric_weights(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
    const Eigen::MatrixBase<DC>& c, const Eigen::MatrixBase<DQ>& q,
    typename DA::Scalar area2) {
  using S = typename DA::Scalar;
  const S wa = ((b.x() - q.x()) * (c.y() - q.y()) -
                (b.y() - q.y()) * (c.x() - q.x())) / area2;
  const S wb = ((c.x() - q.x()) * (a.y() - q.y()) -
                (c.y() - q.y()) * (a.x() - q.x())) / area2;
  return {wa, wb, S(1) - wa - wb};
}

// ---------------------------------------------------------------------------
// Interpolation over a pushed-forward triangulation
// ---------------------------------------------------------------------------

struct InterpolatedRadius {
  Real rho = 0;
  bool extrapolated = false;  // query outside all triangles; nearest value used
};

// Piecewise-linear field over an arbitrary (possibly deformed) triangulation
// of simplex directions. Containment uses a 1e-10 barycentric tolerance and
// ties break on the first triangle in index order. Queries outside every
// triangle fall back to the nearest source point and are flagged.
class PushforwardField {
 public:
  PushforwardField(std::vector<SimplexPoint> directions, std::vector<Real> radii,
                   std::vector<Eigen::Vector3i> triangles);

  InterpolatedRadius interpolate(const SimplexPoint& query) const;

  // Max |signed area2| seen at build time; 0 for an empty triangulation.
  Real max_area2() const { return max_area2_; }
  Real min_area2() const { return min_area2_; }

 private:
  struct Bin {
    std::vector<int> tris;  // ascending triangle indices
  };

  int bin_of(Real u, Real v) const;

  std::vector<SimplexPoint> dirs_;
  std::vector<Real> radii_;
  std::vector<Eigen::Vector3i> tris_;
  std::vector<Real> area2_;
  std::vector<Bin> bins_;
  int bins_per_side_ = 1;
  Real max_area2_ = 0;
  Real min_area2_ = 0;
};

// One-shot form of the above; matches PushforwardField::interpolate exactly.
InterpolatedRadius interpolate_pushforward(
    std::span<const SimplexPoint> directions, std::span<const Real> radii,
    std::span<const Eigen::Vector3i> triangles, const SimplexPoint& query);

// ---------------------------------------------------------------------------
// Radial graphs over the regular grid
// ---------------------------------------------------------------------------

struct RadialGraph {
  DeltaGrid grid;
  Eigen::VectorXd rho;  // positive radius (1-norm scale) per node
  int iterations = 0;
  Real last_update = 0;
  std::vector<Real> update_history;

  Point3 point(int k) const { return rho[k] * grid.nodes[k]; }
  Real mean_radius() const { return rho.size() ? rho.mean() : 0.0; }

  // PL interpolation on the regular grid: O(1) cell lookup, no search.
  Real interpolate(const SimplexPoint& y) const;
};

// 1-norm distance from p to the graph point on p's ray.
Real graph_distance(const RadialGraph& g, const Point3& p);

}  // namespace cslab

#endif  // CSLAB_GEOMETRY_HPP_
