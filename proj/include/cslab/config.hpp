#ifndef CSLAB_CONFIG_HPP_
#define CSLAB_CONFIG_HPP_

#include <array>
#include <optional>
#include <string>

#include "json.hpp"

#include "cslab/models.hpp"
#include "cslab/simplex.hpp"

namespace cslab {

using Json = nlohmann::ordered_json;

struct AnalysisOpts {
  Real margin_tol = 1e-6;
  Real tol_c = 1e-6;
  Real cone_h0 = 0;  // 0 = choose from the geometry
  int cone_dirs = 64;
  int cone_scales = 3;
  Real eps_cone = 1e-2;
  Real c_low = 1e-3;
  long pair_budget = 2000;
  long sample_budget = 500;
  int n_seeds = 100;
  int burn_in = 200;
  int n_max = 60;
  Real boundary_band = 0;  // 0 = test global convexity
};

struct Range {
  Real lo = 0;
  Real hi = 0;
};

struct SweepSpec {
  int samples = 200;
  std::array<Range, 3> lambda{{{1.5, 4.0}, {1.5, 4.0}, {1.5, 4.0}}};
  Range a_diag{1.0, 1.0};
  Range a_offdiag{0.2, 2.5};
  int workers = 1;
};

struct ModelSpec {
  ModelKind kind = ModelKind::LeslieGower;
  JacobianMode jacobian = JacobianMode::Analytic;
  Real fd_step = 1e-6;
  std::optional<LeslieGowerParams> leslie_gower;
  std::optional<RickerParams> ricker;
  std::string external_command;                // plugin executable
  std::vector<std::string> external_args;
  std::optional<Point3> external_box;          // overrides the plugin's info

  MapModel instantiate() const;
};

struct RunConfig {
  ModelSpec model;
  int level = 32;
  IterationOpts iteration;
  AnalysisOpts analysis;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::optional<SweepSpec> sweep;
  Json canonical;  // validated config with defaults filled in

  void require_surface_level() const;
};

RunConfig parse_config_json(const Json& j);
RunConfig parse_config(const std::string& path);

// Deterministic LG parameter draw for sweep sample `index`.
LeslieGowerParams sweep_sample_params(const SweepSpec& spec, std::uint64_t seed,
                                      int index);

}  // namespace cslab

#endif  // CSLAB_CONFIG_HPP_
