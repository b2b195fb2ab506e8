#include "cslab/config.hpp"

#include <algorithm>
#include <fstream>

#include "cslab/external_model.hpp"
#include "cslab/rng.hpp"

namespace cslab {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(Errc::ConfigError, where + ": " + what);
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = int(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = int(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void reject_unknown_keys(const Json& j, const std::string& where,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return key == k;
        }) != known.end())
      continue;
    std::string best;
    int best_d = 1000;
    for (const char* k : known) {
      const int d = edit_distance(key, k);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    std::string msg = "unknown key \"" + key + "\"";
    if (best_d <= 2) msg += " (did you mean \"" + best + "\"?)";
    fail(where, msg);
  }
}

Real get_positive(const Json& j, const std::string& where, const char* key,
                  Real fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(where + "." + key, "expected a number");
  const Real v = j[key].get<Real>();
  if (!(v > 0)) fail(where + "." + key, "must be > 0");
  return v;
}

long get_count(const Json& j, const std::string& where, const char* key,
               long fallback, long min_value = 1) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(where + "." + key, "expected an integer");
  const long v = j[key].get<long>();
  if (v < min_value)
    fail(where + "." + key, "must be >= " + std::to_string(min_value));
  return v;
}

Vec3 get_vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[std::size_t(i)].is_number()) fail(where, "expected numbers");
    v[i] = j[std::size_t(i)].get<Real>();
  }
  return v;
}

Mat3 get_mat3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected a 3x3 array");
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.row(i) = get_vec3(j[std::size_t(i)], where).transpose();
  return m;
}

Range get_range(const Json& j, const std::string& where) {
  if (j.is_number()) {
    const Real v = j.get<Real>();
    return {v, v};
  }
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(where, "expected a number or [lo, hi]");
  Range r{j[0].get<Real>(), j[1].get<Real>()};
  if (!(r.lo <= r.hi)) fail(where, "range must satisfy lo <= hi");
  return r;
}

ModelSpec parse_model(const Json& j) {
  if (!j.is_object()) fail("model", "expected an object");
  reject_unknown_keys(j, "model",
                      {"type", "lambda", "a", "r", "jacobian", "fd_step",
                       "command", "args", "absorbing_box"});
  if (!j.contains("type") || !j["type"].is_string())
    fail("model.type", "required string");
  const std::string type = j["type"].get<std::string>();

  ModelSpec spec;
  if (j.contains("jacobian")) {
    const std::string mode = j["jacobian"].get<std::string>();
    if (mode == "analytic")
      spec.jacobian = JacobianMode::Analytic;
    else if (mode == "finite_difference")
      spec.jacobian = JacobianMode::FiniteDifference;
    else
      fail("model.jacobian", "must be \"analytic\" or \"finite_difference\"");
  }
  spec.fd_step = get_positive(j, "model", "fd_step", 1e-6);

  if (type == "leslie_gower") {
    spec.kind = ModelKind::LeslieGower;
    if (!j.contains("lambda") || !j.contains("a"))
      fail("model", "leslie_gower needs \"lambda\" and \"a\"");
    LeslieGowerParams p;
    p.lambda = get_vec3(j["lambda"], "model.lambda");
    p.a = get_mat3(j["a"], "model.a");
    p.validate();
    spec.leslie_gower = p;
  } else if (type == "ricker") {
    spec.kind = ModelKind::Ricker;
    if (!j.contains("r") || !j.contains("a"))
      fail("model", "ricker needs \"r\" and \"a\"");
    RickerParams p;
    p.r = get_vec3(j["r"], "model.r");
    p.a = get_mat3(j["a"], "model.a");
    p.validate();
    spec.ricker = p;
  } else if (type == "external") {
    spec.kind = ModelKind::External;
    if (!j.contains("command") || !j["command"].is_string())
      fail("model.command", "external models name their plugin executable");
    spec.external_command = j["command"].get<std::string>();
    if (j.contains("args")) {
      if (!j["args"].is_array()) fail("model.args", "expected an array of strings");
      for (const auto& a : j["args"]) spec.external_args.push_back(a.get<std::string>());
    }
    if (j.contains("absorbing_box"))
      spec.external_box = get_vec3(j["absorbing_box"], "model.absorbing_box");
  } else {
    fail("model.type", "unknown model type \"" + type + "\"");
  }
  return spec;
}

SweepSpec parse_sweep(const Json& j) {
  if (!j.is_object()) fail("sweep", "expected an object");
  reject_unknown_keys(j, "sweep",
                      {"samples", "lambda", "a_diag", "a_offdiag", "workers"});
  SweepSpec spec;
  spec.samples = int(get_count(j, "sweep", "samples", spec.samples));
  if (j.contains("lambda")) {
    const Json& l = j["lambda"];
    if (l.is_array() && l.size() == 3 && l[0].is_array()) {
      for (int i = 0; i < 3; ++i)
        spec.lambda[std::size_t(i)] = get_range(l[std::size_t(i)], "sweep.lambda");
    } else {
      const Range r = get_range(l, "sweep.lambda");
      spec.lambda = {r, r, r};
    }
  }
  if (j.contains("a_diag")) spec.a_diag = get_range(j["a_diag"], "sweep.a_diag");
  if (j.contains("a_offdiag"))
    spec.a_offdiag = get_range(j["a_offdiag"], "sweep.a_offdiag");
  for (const Range& r : spec.lambda)
    if (!(r.lo > 1.0)) fail("sweep.lambda", "ranges must stay > 1");
  if (!(spec.a_diag.lo > 0) || !(spec.a_offdiag.lo > 0))
    fail("sweep", "competition ranges must stay > 0");
  spec.workers = int(get_count(j, "sweep", "workers", spec.workers));
  return spec;
}

}  // namespace

MapModel ModelSpec::instantiate() const {
  switch (kind) {
    case ModelKind::LeslieGower:
      return MapModel::leslie_gower(*leslie_gower, jacobian, fd_step);
    case ModelKind::Ricker:
      return MapModel::ricker(*ricker, jacobian, fd_step);
    case ModelKind::External: {
      MapModel m = external_process_model(external_command, external_args, fd_step);
      if (external_box) {
        ExternalHooks hooks;
        hooks.description = external_command;
        hooks.absorbing_box = external_box;
        hooks.eval = [m](const Point3& x) { return m.eval(x); };
        hooks.jacobian = [m](const Point3& x) { return m.jacobian(x); };
        return MapModel::external(std::move(hooks), fd_step);
      }
      return m;
    }
  }
  throw Error(Errc::UnsupportedModel, "unreachable model kind");
}

void RunConfig::require_surface_level() const {
  if (level < 4)
    throw Error(Errc::ConfigError, "surface commands need grid.level >= 4");
}

RunConfig parse_config_json(const Json& j) {
  if (!j.is_object()) fail("config", "top level must be an object");
  reject_unknown_keys(j, "config",
                      {"model", "grid", "iteration", "analysis", "seed",
                       "output", "sweep"});
  RunConfig cfg;
  if (!j.contains("model")) fail("config", "missing required key \"model\"");
  cfg.model = parse_model(j["model"]);

  if (j.contains("grid")) {
    reject_unknown_keys(j["grid"], "grid", {"level"});
    cfg.level = int(get_count(j["grid"], "grid", "level", cfg.level));
    if (cfg.level > 1024) fail("grid.level", "must be <= 1024");
  }
  if (j.contains("iteration")) {
    const Json& it = j["iteration"];
    reject_unknown_keys(it, "iteration", {"max_iters", "tol"});
    cfg.iteration.max_iters =
        int(get_count(it, "iteration", "max_iters", cfg.iteration.max_iters));
    cfg.iteration.tol = get_positive(it, "iteration", "tol", cfg.iteration.tol);
  }
  if (j.contains("analysis")) {
    const Json& an = j["analysis"];
    reject_unknown_keys(an, "analysis",
                        {"margin_tol", "tol_c", "cone_h0", "cone_dirs",
                         "cone_scales", "eps_cone", "c_low", "pair_budget",
                         "sample_budget", "n_seeds", "burn_in", "n_max",
                         "boundary_band"});
    auto& a = cfg.analysis;
    a.margin_tol = get_positive(an, "analysis", "margin_tol", a.margin_tol);
    a.tol_c = get_positive(an, "analysis", "tol_c", a.tol_c);
    if (an.contains("cone_h0")) {
      a.cone_h0 = an["cone_h0"].get<Real>();
      if (a.cone_h0 < 0) fail("analysis.cone_h0", "must be >= 0 (0 = auto)");
    }
    a.cone_dirs = int(get_count(an, "analysis", "cone_dirs", a.cone_dirs, 8));
    a.cone_scales = int(get_count(an, "analysis", "cone_scales", a.cone_scales, 2));
    a.eps_cone = get_positive(an, "analysis", "eps_cone", a.eps_cone);
    a.c_low = get_positive(an, "analysis", "c_low", a.c_low);
    a.pair_budget = get_count(an, "analysis", "pair_budget", a.pair_budget);
    a.sample_budget = get_count(an, "analysis", "sample_budget", a.sample_budget);
    a.n_seeds = int(get_count(an, "analysis", "n_seeds", a.n_seeds));
    a.burn_in = int(get_count(an, "analysis", "burn_in", a.burn_in));
    a.n_max = int(get_count(an, "analysis", "n_max", a.n_max, 10));
    if (an.contains("boundary_band")) {
      a.boundary_band = an["boundary_band"].get<Real>();
      if (a.boundary_band < 0) fail("analysis.boundary_band", "must be >= 0");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      fail("seed", "expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    reject_unknown_keys(j["output"], "output", {"dir"});
    if (j["output"].contains("dir"))
      cfg.out_dir = j["output"]["dir"].get<std::string>();
  }
  if (j.contains("sweep")) cfg.sweep = parse_sweep(j["sweep"]);

  // Canonical echo of the config with defaults filled, used for hashing.
  Json canon = j;
  canon["grid"] = Json{{"level", cfg.level}};
  canon["iteration"] =
      Json{{"max_iters", cfg.iteration.max_iters}, {"tol", cfg.iteration.tol}};
  canon["seed"] = cfg.seed;
  cfg.canonical = canon;
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config", "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    fail("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

LeslieGowerParams sweep_sample_params(const SweepSpec& spec, std::uint64_t seed,
                                      int index) {
  Rng rng = Rng::derive(seed, 0x53EEBull * std::uint64_t(index + 1));
  LeslieGowerParams p;
  for (int i = 0; i < 3; ++i)
    p.lambda[i] = rng.uniform(spec.lambda[std::size_t(i)].lo,
                              spec.lambda[std::size_t(i)].hi);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const Range& r = (i == k) ? spec.a_diag : spec.a_offdiag;
      p.a(i, k) = rng.uniform(r.lo, r.hi);
    }
  return p;
}

}  // namespace cslab
