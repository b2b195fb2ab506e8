#ifndef CSLAB_ANALYSIS_HPP_
#define CSLAB_ANALYSIS_HPP_

#include <optional>
#include <vector>

#include "cslab/simplex.hpp"
#include "cslab/spectra.hpp"

namespace cslab {

// ---------------------------------------------------------------------------
// Convexity of the global attractor (the radial body under the surface)
// ---------------------------------------------------------------------------

enum class ConvexityVerdict { Convex, Nonconvex, Marginal };

enum class ConvexityMethod { MidpointGraph, HullDeviation };

struct ConvexityReport {
  ConvexityMethod method = ConvexityMethod::MidpointGraph;
  // Positive values witness nonconvexity, measured radially in the 1-norm
  // scale (how far a midpoint, or the hull boundary, sits above the surface).
  Real worst_violation = 0;
  // Convexity strength. MidpointGraph: deepest midpoint depth observed below
  // the surface. HullDeviation: negated worst violation.
  Real margin = 0;
  ConvexityVerdict verdict = ConvexityVerdict::Marginal;
  int level = 0;
  long pairs_tested = 0;
  Real tol_c = 0;
};

struct ConvexityOpts {
  Real tol_c = 1e-6;
  long pair_budget = 2000;  // random long-range pairs on top of all grid edges
  Real boundary_band = 0;   // > 0 tests only pairs this close to the boundary
  std::uint64_t seed = 0;
};

// Compares radial midpoints of surface-point pairs against the interpolated
// surface; midpoints radially above the surface witness nonconvexity.
ConvexityReport convexity_midpoint_test(const SimplexApproximation& approx,
                                        const ConvexityOpts& opts = {});

// Cross-validation: radial distance from each surface node to the boundary of
// the convex hull of {surface points, origin}.
ConvexityReport convexity_hull_test(const SimplexApproximation& approx,
                                    const ConvexityOpts& opts = {});

const char* convexity_verdict_name(ConvexityVerdict v);

// Outward-oriented facet of a convex hull: n.x <= offset, |n| = 1.
struct HullFacet {
  Vec3 normal;
  Real offset;
};

// 3D quickhull. Throws HullDegenerate when the cloud is flat within tolerance.
std::vector<HullFacet> convex_hull_facets(const std::vector<Point3>& points);

// ---------------------------------------------------------------------------
// Tangent cones at planar fixed points
// ---------------------------------------------------------------------------

struct ConeSample {
  Vec3 z;  // unit secant direction from the fixed point into the surface
  Real alpha = 0, beta = 0, gamma = 0;  // z = alpha e_k - beta r + gamma w
  Real scale = 0;
};

struct ConeScaleStats {
  Real h = 0;
  int count = 0;
  Real min_beta = 0;
  Real min_beta_over_alpha = 0;  // over samples with alpha > 0.05
  int count_alpha = 0;
  Real min_alpha_over_beta = 0;  // over samples with beta > 0.05
  int count_beta = 0;
  // Same ratio restricted to the off-face samples (alpha > 0.05). In-face
  // secants approximate the excluded tangent directions but still carry
  // beta ~ curvature * h, so the beta filter alone misreads curvature as
  // tangency; the lemma verdicts use this filter instead.
  Real min_alpha_over_beta_nontangent = 0;
};

struct ConeEstimate {
  FixedPointRecord fp;
  Vec3 e_external;  // basis: unit vector of the absent species
  Vec3 r_dir;       // positive Perron eigenvector, embedded in V
  Vec3 w_dir;       // sign-mixed internal eigenvector
  std::vector<ConeSample> samples;
  std::vector<ConeScaleStats> stats;  // coarsest scale first
};

struct ConeOpts {
  Real h0 = 0;       // outermost sampling scale; 0 selects it from the geometry
  int n_dirs = 64;   // deterministic polar directions per scale
  int n_scales = 3;  // dyadic scales h0, h0/2, ...
};

// Samples secant directions of the computed surface in dyadic annuli around a
// planar fixed point and decomposes them in the (e_k, r, w) basis.
ConeEstimate estimate_tangent_cone(const SimplexApproximation& approx,
                                   const SpectrumRecord& spectrum,
                                   const ConeOpts& opts = {});

enum class LemmaVerdict { Consistent, Violated, InsufficientData };

struct LemmaScaleReport {
  Real h = 0;
  LemmaVerdict l1 = LemmaVerdict::InsufficientData;  // min beta >= -eps_cone
  LemmaVerdict l2 = LemmaVerdict::InsufficientData;  // beta/alpha bounded below
  LemmaVerdict l3 = LemmaVerdict::InsufficientData;  // alpha/beta bounded below
};

struct LemmaReport {
  std::vector<LemmaScaleReport> scales;
  // Verdicts over the two finest scales combined.
  LemmaVerdict l1 = LemmaVerdict::InsufficientData;
  LemmaVerdict l2 = LemmaVerdict::InsufficientData;
  LemmaVerdict l3 = LemmaVerdict::InsufficientData;
  bool stable_across_scales = false;
  Real eps_cone = 0;
  Real c_low = 0;
};

LemmaReport lemma_diagnostics(const ConeEstimate& cone, Real eps_cone = 1e-2,
                              Real c_low = 1e-3);

const char* lemma_verdict_name(LemmaVerdict v);

enum class TangencyVerdict { NotTangent, Tangent, Indeterminate };

// The cone spans V together with the face subspace iff some sampled secant
// leaves the face (alpha above the non-tangency cutoff).
TangencyVerdict non_tangency_check(const ConeEstimate& cone);

const char* tangency_verdict_name(TangencyVerdict v);

// ---------------------------------------------------------------------------
// Exponential separation along a face orbit
// ---------------------------------------------------------------------------

struct SeparationFit {
  SpeciesSubset face = SpeciesSubset::pair(0, 1);
  int n_max = 0;
  std::vector<Real> log_ratio;  // log ||J^n v_r|| - log ||J^n v_w||, n = 1..
  Real nu_hat = 0;              // fitted decay rate (positive = separation)
  Real r_squared = 0;
  Point3 start = Point3::Zero();
};

struct SeparationOpts {
  int n_max = 60;
  std::optional<Point3> start_point;  // default: curve node nearest the middle
};

// Propagates unit vectors through chained Jacobians with per-step
// renormalization, accumulating log norms (no under/overflow).
std::vector<Real> propagate_log_ratio(const MapModel& model, Point3 start,
                                      Vec3 v_r, Vec3 v_w, int n_max);

struct LineFit {
  Real slope = 0;
  Real intercept = 0;
  Real r_squared = 0;
};

// Least squares of y against n = 1..y.size().
LineFit fit_line(const std::vector<Real>& y);

SeparationFit exp_separation_diagnostic(const MapModel& model,
                                        const FaceCurve& curve,
                                        const SeparationOpts& opts = {});

}  // namespace cslab

#endif  // CSLAB_ANALYSIS_HPP_
