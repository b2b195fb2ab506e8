#ifndef CSLAB_IO_HPP_
#define CSLAB_IO_HPP_

#include <string>
#include <vector>

#include "cslab/analysis.hpp"
#include "cslab/config.hpp"
#include "cslab/simplex.hpp"
#include "cslab/spectra.hpp"

namespace cslab {

// Shortest round-trip decimal rendering used by every CSV artifact.
std::string format_real(Real v);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

// CSV with header "y1,y2,y3,rho,x1,x2,x3", one row per surface node.
std::string surface_csv(const RadialGraph& g);
// OBJ mesh with vertices rho*y and 1-indexed grid triangles.
std::string surface_obj(const RadialGraph& g);
// CSV with header "face,t,rho,x1,x2,x3".
std::string face_curves_csv(const SimplexApproximation& approx);
// CSV with header "scale,z1,z2,z3,alpha,beta,gamma".
std::string cone_samples_csv(const ConeEstimate& cone);

Json to_json(const HypothesisReport& rep);
Json to_json(const SpectrumRecord& rec);
Json to_json(const ClassificationReport& rep);
Json to_json(const ConvexityReport& rep);
Json to_json(const ConeEstimate& cone);
Json to_json(const LemmaReport& rep);
Json to_json(const SeparationFit& fit);
Json to_json(const UnorderednessReport& rep);
Json to_json(const AttractionReport& rep);

Json face_json(SpeciesSubset face);  // 1-based species list
Json vec_json(const Vec3& v);

// Artifact sink: collects written files and finishes with a manifest listing
// each file's content hash.
class OutputDir {
 public:
  explicit OutputDir(std::string dir);

  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const Json& j);

  // Writes manifest.json (not listed in itself).
  void finish_manifest(const std::string& command, std::uint64_t config_hash,
                       const std::vector<std::pair<std::string, double>>& timings_ms);

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::uint64_t>> files_;  // name, hash
};

}  // namespace cslab

#endif  // CSLAB_IO_HPP_
