#include "cslab/types.hpp"

namespace cslab {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::ZeroPoint: return "ZeroPoint";
    case Errc::FaceMismatch: return "FaceMismatch";
    case Errc::LevelOutOfRange: return "LevelOutOfRange";
    case Errc::DegenerateTriangle: return "DegenerateTriangle";
    case Errc::NumericOverflow: return "NumericOverflow";
    case Errc::SingularJacobian: return "SingularJacobian";
    case Errc::UnsupportedModel: return "UnsupportedModel";
    case Errc::NoAxialFixedPoint: return "NoAxialFixedPoint";
    case Errc::MultipleRoots: return "MultipleRoots";
    case Errc::FoldedImage: return "FoldedImage";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::HypothesisViolation: return "HypothesisViolation";
    case Errc::NewtonSingular: return "NewtonSingular";
    case Errc::ComplexInternalEigenvalues: return "ComplexInternalEigenvalues";
    case Errc::NonpositiveEigenvalue: return "NonpositiveEigenvalue";
    case Errc::UnconvergedSurface: return "UnconvergedSurface";
    case Errc::HullDegenerate: return "HullDegenerate";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::BasisSingular: return "BasisSingular";
    case Errc::OrbitHitsFixedPoint: return "OrbitHitsFixedPoint";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ProcessError: return "ProcessError";
  }
  return "UnknownError";
}

SpeciesSubset SpeciesSubset::from_mask(unsigned mask) {
  if (mask == 0 || mask > 0b111)
    throw std::out_of_range("species subset mask must be nonempty in {1..7}");
  return SpeciesSubset(mask);
}

int SpeciesSubset::card() const {
  return int((mask_ & 1u) + ((mask_ >> 1) & 1u) + ((mask_ >> 2) & 1u));
}

SpeciesSubset SpeciesSubset::complement() const {
  unsigned c = (~mask_) & 0b111u;
  if (c == 0) throw Error(Errc::FaceMismatch, "complement of full subset is empty");
  return SpeciesSubset(c);
}

std::array<int, 3> SpeciesSubset::indices() const {
  std::array<int, 3> out{-1, -1, -1};
  int n = 0;
  for (int i = 0; i < 3; ++i)
    if (contains(i)) out[n++] = i;
  return out;
}

std::string SpeciesSubset::str() const {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < 3; ++i) {
    if (!contains(i)) continue;
    if (!first) s += ",";
    s += std::to_string(i + 1);
    first = false;
  }
  s += "}";
  return s;
}

}  // namespace cslab
