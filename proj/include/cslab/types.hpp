#ifndef CSLAB_TYPES_HPP_
#define CSLAB_TYPES_HPP_

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace cslab {

using Real = double;

// Points live in the nonnegative octant C, vectors in the tangent space V.
// Both are dense 3-vectors; the aliases keep the affine/linear distinction
// readable at call sites.
using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Barycentric coordinates on the probability 2-simplex (nonnegative, sum 1).
using SimplexPoint = Eigen::Vector3d;

enum class Errc {
  ZeroPoint,
  FaceMismatch,
  LevelOutOfRange,
  DegenerateTriangle,
  NumericOverflow,
  SingularJacobian,
  UnsupportedModel,
  NoAxialFixedPoint,
  MultipleRoots,
  FoldedImage,
  NonConvergence,
  HypothesisViolation,
  NewtonSingular,
  ComplexInternalEigenvalues,
  NonpositiveEigenvalue,
  UnconvergedSurface,
  HullDegenerate,
  InsufficientSamples,
  BasisSingular,
  OrbitHitsFixedPoint,
  ConfigError,
  ProcessError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Nonempty subset of the species indices {0,1,2}. Printed 1-based to match
// the usual ecological numbering.
class SpeciesSubset {
 public:
  static SpeciesSubset all() { return SpeciesSubset(0b111); }
  static SpeciesSubset single(int i) { return SpeciesSubset(1u << check(i)); }
  static SpeciesSubset pair(int i, int j) {
    return SpeciesSubset((1u << check(i)) | (1u << check(j)));
  }
  static SpeciesSubset from_mask(unsigned mask);

  bool contains(int i) const { return (mask_ >> check(i)) & 1u; }
  int card() const;
  unsigned mask() const { return mask_; }

  SpeciesSubset complement() const;

  // Member indices in increasing order; entries past card() are -1.
  std::array<int, 3> indices() const;

  bool operator==(const SpeciesSubset& o) const { return mask_ == o.mask_; }
  bool operator!=(const SpeciesSubset& o) const { return mask_ != o.mask_; }

  std::string str() const;  // e.g. "{1,2}"

 private:
  explicit SpeciesSubset(unsigned mask) : mask_(mask) {}
  static int check(int i) {
    if (i < 0 || i > 2) throw std::out_of_range("species index");
    return i;
  }
  unsigned mask_;
};

}  // namespace cslab

#endif  // CSLAB_TYPES_HPP_
