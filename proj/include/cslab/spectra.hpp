#ifndef CSLAB_SPECTRA_HPP_
#define CSLAB_SPECTRA_HPP_

#include <complex>
#include <optional>
#include <vector>

#include "cslab/models.hpp"

namespace cslab {

struct FixedPointRecord {
  Point3 location = Point3::Zero();  // coordinates outside `face` exactly zero
  SpeciesSubset face = SpeciesSubset::all();
  Real residual = 0;  // ||P(x) - x||
  Mat3 jacobian = Mat3::Zero();
};

struct ExternalEigenvalue {
  int species = 0;  // 0-based index of the absent species
  Real value = 0;
};

// Eigen-structure of the Jacobian at a boundary fixed point, following the
// block form: face block (internal eigenvalues) plus diagonal entries for the
// absent species (external eigenvalues).
struct SpectrumRecord {
  FixedPointRecord fp;
  Real principal = 0;                      // smallest-modulus internal eigenvalue
  std::optional<Real> internal_other;      // planar points only
  std::vector<ExternalEigenvalue> externals;
  Vec3 perron_direction = Vec3::Zero();    // r: positive eigenvector, embedded
  Vec3 tangent_direction = Vec3::Zero();   // w: sign-mixed eigenvector, embedded
  bool degenerate = false;                 // smallest-modulus internal >= 1
  bool marginal = false;                   // |margin| within the margin tolerance

  // min over externals of (external - principal)
  Real margin() const;
};

enum class ClassVerdict { NeatlyEmbeddedPredicted, CriterionFails, Marginal, Degenerate };

struct ClassificationReport {
  std::vector<SpectrumRecord> spectra;
  Real margin_tol = 1e-6;
  ClassVerdict verdict = ClassVerdict::NeatlyEmbeddedPredicted;
  int max_planar_points_on_one_face = 0;
  std::string note;

  Real min_margin() const;
};

const char* class_verdict_name(ClassVerdict v);

// Axial fixed points u_i, one per axis, by bracketed bisection plus Newton
// polish. Throws NoAxialFixedPoint / MultipleRoots when the (H4') scan fails.
std::vector<FixedPointRecord> find_axial_fixed_points(const MapModel& model);

// Planar fixed points on the open 2-face, Newton from an 8x8 seed grid,
// deduplicated at 1e-7. May legitimately be empty.
std::vector<FixedPointRecord> find_planar_fixed_points(const MapModel& model,
                                                       SpeciesSubset face);

// Interior fixed points from a 5x5x5 seed grid; surface spot-checks only.
std::vector<FixedPointRecord> find_interior_fixed_points(const MapModel& model);

// Eigen-structure at an axial or planar fixed point (face != {1,2,3}).
SpectrumRecord boundary_spectrum(const MapModel& model, const FixedPointRecord& fp);

// Evaluates the neat-embedding eigenvalue criterion over all boundary fixed
// points. Periodic points of period >= 2 are not searched; the report says so.
ClassificationReport classify(const MapModel& model, Real margin_tol = 1e-6);

// Debug path: roots of the characteristic cubic with one Newton polish each.
std::array<std::complex<Real>, 3> eigenvalues_cubic(const Mat3& m);

}  // namespace cslab

#endif  // CSLAB_SPECTRA_HPP_
