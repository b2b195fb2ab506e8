#ifndef CSLAB_MODELS_HPP_
#define CSLAB_MODELS_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cslab/geometry.hpp"
#include "cslab/types.hpp"

namespace cslab {

// Leslie-Gower competition map: P_i(x) = lambda_i x_i / (1 + (A x)_i).
struct LeslieGowerParams {
  Vec3 lambda;  // intrinsic growth multipliers, each > 1
  Mat3 a;       // competition coefficients, all > 0

  void validate() const;
};

// Ricker competition map: P_i(x) = x_i exp(r_i (1 - (A x)_i)).
struct RickerParams {
  Vec3 r;  // each in (0, 1), so axial derivatives 1 - r_i lie in (0, 1)
  Mat3 a;  // all > 0

  void validate() const;
};

enum class ModelKind { LeslieGower, Ricker, External };
enum class JacobianMode { Analytic, FiniteDifference };

// Hooks for a user-supplied map, either in-process callbacks or the CLI
// plugin subprocess (see external_model.hpp).
struct ExternalHooks {
  std::function<Point3(const Point3&)> eval;
  std::function<Mat3(const Point3&)> jacobian;  // optional; empty = finite diff
  std::optional<Point3> absorbing_box;
  std::string description = "external";
};

// Immutable competitive-map handle. eval/jacobian are pure; concurrent calls
// are safe (the subprocess-backed external kind serializes internally).
class MapModel {
 public:
  static MapModel leslie_gower(const LeslieGowerParams& p,
                               JacobianMode mode = JacobianMode::Analytic,
                               Real fd_step = 1e-6);
  static MapModel ricker(const RickerParams& p,
                         JacobianMode mode = JacobianMode::Analytic,
                         Real fd_step = 1e-6);
  static MapModel external(ExternalHooks hooks, Real fd_step = 1e-6);

  ModelKind kind() const { return kind_; }
  JacobianMode jacobian_mode() const { return mode_; }
  const LeslieGowerParams* leslie_gower_params() const { return lg_.get(); }
  const RickerParams* ricker_params() const { return rk_.get(); }

  Point3 eval(const Point3& x) const;
  Mat3 jacobian(const Point3& x) const;

  // A box [0, M] with P(C cap [0,M]) inside [0,M] and the attractor below it.
  Point3 absorbing_box() const;

  // Central finite differences with per-coordinate step h (1 + |x_i|).
  Mat3 finite_difference_jacobian(const Point3& x) const;

  std::string fingerprint() const { return fingerprint_; }

 private:
  MapModel() = default;

  ModelKind kind_ = ModelKind::External;
  JacobianMode mode_ = JacobianMode::Analytic;
  Real fd_step_ = 1e-6;
  std::shared_ptr<const LeslieGowerParams> lg_;
  std::shared_ptr<const RickerParams> rk_;
  std::function<Point3(const Point3&)> eval_;
  std::function<Mat3(const Point3&)> analytic_jacobian_;  // empty in FD mode
  std::optional<Point3> box_;
  std::string fingerprint_;
};

// ---------------------------------------------------------------------------
// Sampled hypothesis checkers
// ---------------------------------------------------------------------------

enum class HypVerdict { Pass, Fail, Inconclusive };

struct HypothesisFinding {
  enum class Severity { Violation, NearThreshold };
  Severity severity = Severity::Violation;
  SpeciesSubset face = SpeciesSubset::all();
  std::vector<Point3> points;
  std::string quantity;
  Real measured = 0;
  Real threshold = 0;
};

struct HypothesisReport {
  std::string hypothesis;
  long sample_count = 0;
  std::vector<HypothesisFinding> findings;
  HypVerdict verdict = HypVerdict::Pass;

  bool has_hard_violation() const;
  void finalize();  // derives the verdict from the findings
};

// (H2) forward invariance of faces: off-face image coordinates vanish and
// open-face points stay in the open face.
HypothesisReport check_h2(const MapModel& model, long sample_budget,
                          std::uint64_t seed = 0);

// (H3') the face block of DP(x)^{-1} has positive entries, and every
// complementary basis direction feeds back into the face.
HypothesisReport check_h3prime(const MapModel& model, long sample_budget,
                               std::uint64_t seed = 0);

// (H4') unique axial fixed point with derivative in (0,1) and negative
// cross-partials. Scans 1e3 points per axis for sign changes.
HypothesisReport check_h4prime(const MapModel& model);

// (H6) ratio monotonicity along ordered image pairs, by rejection sampling.
HypothesisReport check_h6(const MapModel& model, long pair_budget,
                          std::uint64_t seed = 0);

const char* hyp_verdict_name(HypVerdict v);

}  // namespace cslab

#endif  // CSLAB_MODELS_HPP_
