#ifndef CSLAB_SIMPLEX_HPP_
#define CSLAB_SIMPLEX_HPP_

#include <array>
#include <string>
#include <vector>

#include "cslab/models.hpp"

namespace cslab {

struct IterationOpts {
  int max_iters = 500;
  Real tol = 1e-8;  // max node movement at convergence
};

// One-dimensional carrying-simplex face: radius over the edge of the simplex
// between the two axial directions of `face`, parameter t = k/level running
// from the lower species index to the higher one.
struct FaceCurve {
  SpeciesSubset face = SpeciesSubset::pair(0, 1);
  int level = 0;
  Eigen::VectorXd rho;
  int iterations = 0;
  Real residual = 0;
  bool converged = false;

  Real t(int k) const { return Real(k) / Real(level); }
  // Embedded 3D point of node k.
  Point3 point(int k) const;
  // Linear interpolation of the radius at parameter t in [0, 1].
  Real interpolate(Real t) const;
};

FaceCurve compute_face_curve(const MapModel& model, SpeciesSubset face, int level,
                             const IterationOpts& opts = {});

struct SimplexApproximation {
  RadialGraph surface;
  std::array<FaceCurve, 3> face_curves;  // faces {1,2}, {1,3}, {2,3}
  std::string model_fingerprint;
  IterationOpts opts_used;
  Real hausdorff_step = 0;  // last-iteration max node movement
  bool converged = false;
  long extrapolated_queries = 0;

  const FaceCurve& face_curve(SpeciesSubset face) const;
};

// Pushes the absorbing-box boundary surface through the map and re-grids until
// the node movement drops below tol. Boundary nodes are pinned to the face
// curves, which are computed first.
SimplexApproximation compute_surface(const MapModel& model, const DeltaGrid& grid,
                                     const IterationOpts& opts = {});

// One-sided Hausdorff estimate of d(P(S~), S~) in the 1-norm radial scale.
Real invariance_residual(const MapModel& model, const SimplexApproximation& approx);

struct UnorderedPairViolation {
  int node_a = 0;
  int node_b = 0;
  Real margin = 0;  // min componentwise gap of the << relation
};

struct UnorderednessReport {
  std::vector<UnorderedPairViolation> violations;
  long pairs_checked = 0;
  Real margin_used = 0;
};

// Scans all node pairs for << -ordered pairs at the given componentwise margin.
UnorderednessReport unorderedness_check(const SimplexApproximation& approx,
                                        Real margin = 1e-6);

struct AttractionReport {
  int seeds = 0;
  int burn_in = 0;
  Real max_distance = 0;
  Real mean_distance = 0;
  Real threshold = 0;  // max(2/level, 1e-3) * mean surface radius
  bool pass = false;
};

// Iterates random seeds and measures the final graph distance to the surface.
AttractionReport attraction_check(const MapModel& model,
                                  const SimplexApproximation& approx, int n_seeds,
                                  int burn_in, std::uint64_t seed = 0);

}  // namespace cslab

#endif  // CSLAB_SIMPLEX_HPP_
