#include "cslab/commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "cslab/analysis.hpp"

namespace cslab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a64(cfg.canonical.dump());
}

int worker_count(const RunConfig& cfg) {
  if (const char* env = std::getenv("CSLAB_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  if (cfg.sweep) return std::max(1, cfg.sweep->workers);
  return 1;
}

// Combined verdict of the two convexity methods: agreement wins, any Marginal
// stays Marginal, and a hard disagreement is its own outcome.
std::string combine_convexity(const ConvexityReport& mid, const ConvexityReport& hull,
                              bool* disagree) {
  *disagree = false;
  if (mid.verdict == ConvexityVerdict::Marginal ||
      hull.verdict == ConvexityVerdict::Marginal)
    return "Marginal";
  if (mid.verdict == hull.verdict) return convexity_verdict_name(mid.verdict);
  *disagree = true;
  return "Disagree";
}

ClassificationReport classify_for(const RunConfig& cfg, const MapModel& model) {
  return classify(model, cfg.analysis.margin_tol);
}

ConvexityOpts convexity_opts(const RunConfig& cfg) {
  ConvexityOpts opts;
  opts.tol_c = cfg.analysis.tol_c;
  opts.pair_budget = cfg.analysis.pair_budget;
  opts.boundary_band = cfg.analysis.boundary_band;
  opts.seed = cfg.seed;
  return opts;
}

ConeOpts cone_opts(const RunConfig& cfg) {
  ConeOpts opts;
  opts.h0 = cfg.analysis.cone_h0;
  opts.n_dirs = cfg.analysis.cone_dirs;
  opts.n_scales = cfg.analysis.cone_scales;
  return opts;
}

CommandResult cmd_hypotheses(const RunConfig& cfg, OutputDir& out) {
  const MapModel model = cfg.model.instantiate();
  const long budget = cfg.analysis.sample_budget;
  const HypothesisReport h2 = check_h2(model, budget, cfg.seed);
  const HypothesisReport h3 = check_h3prime(model, budget, cfg.seed);
  const HypothesisReport h4 = check_h4prime(model);
  const HypothesisReport h6 = check_h6(model, budget, cfg.seed);

  Json j;
  j["h2"] = to_json(h2);
  j["h3prime"] = to_json(h3);
  j["h4prime"] = to_json(h4);
  j["h6"] = to_json(h6);
  const bool fail = h2.verdict == HypVerdict::Fail || h3.verdict == HypVerdict::Fail ||
                    h4.verdict == HypVerdict::Fail || h6.verdict == HypVerdict::Fail;
  const bool inconclusive = h2.verdict == HypVerdict::Inconclusive ||
                            h3.verdict == HypVerdict::Inconclusive ||
                            h4.verdict == HypVerdict::Inconclusive ||
                            h6.verdict == HypVerdict::Inconclusive;
  j["overall"] = fail ? "fail" : (inconclusive ? "inconclusive" : "pass");
  out.write_json("hypotheses.json", j);

  CommandResult res;
  res.summary = j;
  res.exit_code = fail ? kExitHypothesis : kExitOk;
  if (fail) res.message = "hypothesis violation detected";
  return res;
}

CommandResult cmd_fixed_points(const RunConfig& cfg, OutputDir& out) {
  const MapModel model = cfg.model.instantiate();
  Json j;
  Json axial = Json::array();
  for (const auto& fp : find_axial_fixed_points(model))
    axial.push_back(Json{{"location", vec_json(fp.location)},
                         {"face", face_json(fp.face)},
                         {"residual", fp.residual}});
  j["axial"] = axial;
  Json planar = Json::array();
  const SpeciesSubset faces2[3] = {SpeciesSubset::pair(0, 1),
                                   SpeciesSubset::pair(0, 2),
                                   SpeciesSubset::pair(1, 2)};
  for (const auto& face : faces2)
    for (const auto& fp : find_planar_fixed_points(model, face))
      planar.push_back(Json{{"location", vec_json(fp.location)},
                            {"face", face_json(fp.face)},
                            {"residual", fp.residual}});
  j["planar"] = planar;
  Json interior = Json::array();
  for (const auto& fp : find_interior_fixed_points(model))
    interior.push_back(Json{{"location", vec_json(fp.location)},
                            {"residual", fp.residual}});
  j["interior"] = interior;
  out.write_json("fixed_points.json", j);
  CommandResult res;
  res.summary = j;
  return res;
}

CommandResult cmd_classify(const RunConfig& cfg, OutputDir& out) {
  const MapModel model = cfg.model.instantiate();
  const ClassificationReport rep = classify_for(cfg, model);
  const Json j = to_json(rep);
  out.write_json("classification.json", j);
  CommandResult res;
  res.summary = j;
  res.message = class_verdict_name(rep.verdict);
  return res;
}

CommandResult cmd_simplex(const RunConfig& cfg, OutputDir& out) {
  cfg.require_surface_level();
  const MapModel model = cfg.model.instantiate();
  const DeltaGrid grid = make_grid(cfg.level);
  const SimplexApproximation approx = compute_surface(model, grid, cfg.iteration);

  out.write("surface.csv", surface_csv(approx.surface));
  out.write("surface.obj", surface_obj(approx.surface));
  out.write("face_curves.csv", face_curves_csv(approx));

  const Real inv_res = invariance_residual(model, approx);
  const UnorderednessReport unord = unorderedness_check(approx);
  const AttractionReport attr = attraction_check(
      model, approx, cfg.analysis.n_seeds, cfg.analysis.burn_in, cfg.seed);

  Json j;
  j["level"] = cfg.level;
  j["iterations"] = approx.surface.iterations;
  j["converged"] = approx.converged;
  j["hausdorff_step"] = approx.hausdorff_step;
  j["mean_radius"] = approx.surface.mean_radius();
  j["invariance_residual"] = inv_res;
  j["extrapolated_queries"] = approx.extrapolated_queries;
  j["unorderedness"] = to_json(unord);
  j["attraction"] = to_json(attr);
  out.write_json("simplex_report.json", j);
  CommandResult res;
  res.summary = j;
  return res;
}

CommandResult cmd_convexity(const RunConfig& cfg, OutputDir& out) {
  cfg.require_surface_level();
  const MapModel model = cfg.model.instantiate();
  const DeltaGrid grid = make_grid(cfg.level);
  const SimplexApproximation approx = compute_surface(model, grid, cfg.iteration);
  const ConvexityOpts opts = convexity_opts(cfg);
  const ConvexityReport mid = convexity_midpoint_test(approx, opts);
  const ConvexityReport hull = convexity_hull_test(approx, opts);
  bool disagree = false;
  Json j;
  j["midpoint"] = to_json(mid);
  j["hull"] = to_json(hull);
  j["combined_verdict"] = combine_convexity(mid, hull, &disagree);
  j["margin"] = mid.margin;
  out.write_json("convexity.json", j);
  CommandResult res;
  res.summary = j;
  res.message = j["combined_verdict"].get<std::string>();
  return res;
}

CommandResult cmd_cone(const RunConfig& cfg, OutputDir& out) {
  cfg.require_surface_level();
  const MapModel model = cfg.model.instantiate();

  std::vector<SpectrumRecord> planar_spectra;
  const SpeciesSubset faces2[3] = {SpeciesSubset::pair(0, 1),
                                   SpeciesSubset::pair(0, 2),
                                   SpeciesSubset::pair(1, 2)};
  for (const auto& face : faces2) {
    const auto planar = find_planar_fixed_points(model, face);
    if (planar.size() >= 10)
      throw Error(Errc::NonConvergence,
                  "degenerate model: a continuum of planar fixed points on " +
                      face.str());
    for (const auto& fp : planar)
      planar_spectra.push_back(boundary_spectrum(model, fp));
  }
  if (planar_spectra.empty())
    throw Error(Errc::InsufficientSamples,
                "no isolated planar fixed point; nothing to sample a cone at");

  const DeltaGrid grid = make_grid(cfg.level);
  const SimplexApproximation approx = compute_surface(model, grid, cfg.iteration);

  Json all = Json::array();
  std::string samples_csv;
  for (const auto& spec : planar_spectra) {
    const ConeEstimate cone = estimate_tangent_cone(approx, spec, cone_opts(cfg));
    const LemmaReport lem =
        lemma_diagnostics(cone, cfg.analysis.eps_cone, cfg.analysis.c_low);
    Json j = to_json(cone);
    j["lemmas"] = to_json(lem);
    j["tangency"] = tangency_verdict_name(non_tangency_check(cone));
    all.push_back(j);
    if (samples_csv.empty())
      samples_csv = cone_samples_csv(cone);
  }
  out.write("cone_samples.csv", samples_csv);
  Json j;
  j["cones"] = all;
  out.write_json("cone.json", j);
  CommandResult res;
  res.summary = j;
  return res;
}

CommandResult cmd_separation(const RunConfig& cfg, OutputDir& out) {
  const MapModel model = cfg.model.instantiate();
  const SpeciesSubset faces2[3] = {SpeciesSubset::pair(0, 1),
                                   SpeciesSubset::pair(0, 2),
                                   SpeciesSubset::pair(1, 2)};
  Json arr = Json::array();
  SeparationOpts opts;
  opts.n_max = cfg.analysis.n_max;
  for (const auto& face : faces2) {
    const FaceCurve curve =
        compute_face_curve(model, face, cfg.level, cfg.iteration);
    const SeparationFit fit = exp_separation_diagnostic(model, curve, opts);
    arr.push_back(to_json(fit));
  }
  Json j;
  j["fits"] = arr;
  out.write_json("separation.json", j);
  CommandResult res;
  res.summary = j;
  return res;
}

std::string csv_quote_flags(const std::string& flags) {
  // flags are semicolon-separated tokens with no commas; emitted verbatim
  return flags;
}

}  // namespace

SweepRow sweep_one(const SweepSpec& spec, const RunConfig& cfg, int index) {
  SweepRow row;
  row.index = index;
  row.params = sweep_sample_params(spec, cfg.seed, index);
  std::vector<std::string> flags;

  const MapModel model = MapModel::leslie_gower(row.params);
  const long budget = cfg.analysis.sample_budget;

  bool hyp_failed = false;
  try {
    const HypothesisReport reports[4] = {check_h2(model, budget, cfg.seed),
                                         check_h3prime(model, budget, cfg.seed),
                                         check_h4prime(model),
                                         check_h6(model, budget, cfg.seed)};
    for (const auto& r : reports) {
      if (r.verdict == HypVerdict::Fail) {
        flags.push_back("hyp_fail:" + r.hypothesis);
        hyp_failed = true;
      } else if (r.verdict == HypVerdict::Inconclusive) {
        flags.push_back("hyp_inconclusive:" + r.hypothesis);
      }
    }
  } catch (const Error& e) {
    flags.push_back(std::string("hyp_error:") + errc_name(e.code()));
    hyp_failed = true;
  }

  if (!hyp_failed) {
    try {
      const DeltaGrid grid = make_grid(cfg.level);
      const SimplexApproximation approx = compute_surface(model, grid, cfg.iteration);
      const ConvexityOpts copts = convexity_opts(cfg);
      const ConvexityReport mid = convexity_midpoint_test(approx, copts);
      const ConvexityReport hull = convexity_hull_test(approx, copts);
      bool disagree = false;
      row.convex_verdict = combine_convexity(mid, hull, &disagree);
      row.convex_margin = mid.margin;
      if (disagree) flags.push_back("convexity_methods_disagree");

      const ClassificationReport cls = classify_for(cfg, model);
      row.classify_verdict = class_verdict_name(cls.verdict);
      row.min_eig_margin = cls.spectra.empty() ? 0.0 : cls.min_margin();

      const Real grid_len = approx.surface.mean_radius() / cfg.level;
      row.convex_with_margin =
          row.convex_verdict == "Convex" && row.convex_margin > 2.0 * grid_len;
      if (row.convex_with_margin &&
          cls.verdict != ClassVerdict::NeatlyEmbeddedPredicted &&
          cls.verdict != ClassVerdict::Marginal) {
        row.counterexample = true;
        flags.push_back("counterexample");
      }
      if (cls.verdict == ClassVerdict::Marginal) flags.push_back("marginal_excluded");

      // Cone diagnostics at the planar fixed points, when any exist.
      bool has_planar = false;
      for (const auto& s : cls.spectra)
        if (s.fp.face.card() == 2) has_planar = true;
      if (!has_planar) {
        flags.push_back("no_planar_fp");
      } else {
        try {
          std::string l1 = "Consistent", l2 = "Consistent", l3 = "Consistent";
          auto worse = [](const std::string& a, const char* b) {
            if (a == "Violated" || std::string(b) == "Violated") return std::string("Violated");
            if (a == "InsufficientData" || std::string(b) == "InsufficientData")
              return std::string("InsufficientData");
            return std::string("Consistent");
          };
          for (const auto& s : cls.spectra) {
            if (s.fp.face.card() != 2) continue;
            const ConeEstimate cone = estimate_tangent_cone(approx, s, cone_opts(cfg));
            const LemmaReport lem =
                lemma_diagnostics(cone, cfg.analysis.eps_cone, cfg.analysis.c_low);
            l1 = worse(l1, lemma_verdict_name(lem.l1));
            l2 = worse(l2, lemma_verdict_name(lem.l2));
            l3 = worse(l3, lemma_verdict_name(lem.l3));
          }
          flags.push_back("cone_l1:" + l1);
          flags.push_back("cone_l2:" + l2);
          flags.push_back("cone_l3:" + l3);
        } catch (const Error& e) {
          flags.push_back(std::string("cone_error:") + errc_name(e.code()));
        }
      }
    } catch (const Error& e) {
      flags.push_back(std::string("surface_error:") + errc_name(e.code()));
    }
  }

  std::string f;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) f += ";";
    f += flags[i];
  }
  row.flags = f;

  std::string csv = std::to_string(index);
  for (int i = 0; i < 3; ++i) csv += "," + format_real(row.params.lambda[i]);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) csv += "," + format_real(row.params.a(i, k));
  csv += "," + row.convex_verdict;
  csv += "," + (row.convex_verdict.empty() ? std::string()
                                           : format_real(row.convex_margin));
  csv += "," + row.classify_verdict;
  csv += "," + (row.classify_verdict.empty() ? std::string()
                                             : format_real(row.min_eig_margin));
  csv += "," + csv_quote_flags(row.flags);
  row.csv_row = csv;
  return row;
}

namespace {

CommandResult cmd_sweep(const RunConfig& cfg, OutputDir& out) {
  if (!cfg.sweep)
    throw Error(Errc::ConfigError, "sweep command needs a \"sweep\" config block");
  cfg.require_surface_level();
  const SweepSpec& spec = *cfg.sweep;

  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.samples));
  std::atomic<int> next{0};
  const int workers = std::min(worker_count(cfg), std::max(1, spec.samples));
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= spec.samples) return;
      rows[std::size_t(i)] = sweep_one(spec, cfg, i);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::string csv =
      "sample,lambda1,lambda2,lambda3,a11,a12,a13,a21,a22,a23,a31,a32,a33,"
      "convex_verdict,convex_margin,classify_verdict,min_eig_margin,flags\n";
  long convex_with_margin = 0, neat = 0, counterexamples = 0, marginal = 0,
       nonconvex = 0, hyp_failed = 0, errors = 0;
  Json counterexample_ids = Json::array();
  for (const auto& row : rows) {
    csv += row.csv_row + "\n";
    if (row.convex_with_margin) {
      ++convex_with_margin;
      if (row.classify_verdict == "NeatlyEmbeddedPredicted") ++neat;
    }
    if (row.counterexample) {
      ++counterexamples;
      counterexample_ids.push_back(row.index);
    }
    if (row.flags.find("marginal_excluded") != std::string::npos) ++marginal;
    if (row.convex_verdict == "Nonconvex") ++nonconvex;
    if (row.flags.find("hyp_fail") != std::string::npos ||
        row.flags.find("hyp_error") != std::string::npos)
      ++hyp_failed;
    if (row.flags.find("surface_error") != std::string::npos) ++errors;
  }
  out.write("sweep.csv", csv);

  Json j;
  j["samples"] = spec.samples;
  j["workers"] = workers;
  j["convex_with_margin"] = convex_with_margin;
  j["convex_with_margin_and_neat"] = neat;
  j["counterexamples"] = counterexamples;
  j["counterexample_samples"] = counterexample_ids;
  j["marginal_classification_excluded"] = marginal;
  j["nonconvex"] = nonconvex;
  j["hypothesis_failed"] = hyp_failed;
  j["surface_errors"] = errors;
  out.write_json("sweep_summary.json", j);

  CommandResult res;
  res.summary = j;
  if (counterexamples > 0) {
    res.message = "theorem sweep found counterexamples";
  }
  return res;
}

}  // namespace

CommandResult run_command(const std::string& command, const RunConfig& cfg) {
  OutputDir out(cfg.out_dir);
  const auto t0 = Clock::now();
  CommandResult res;
  try {
    if (command == "hypotheses")
      res = cmd_hypotheses(cfg, out);
    else if (command == "fixed-points")
      res = cmd_fixed_points(cfg, out);
    else if (command == "classify")
      res = cmd_classify(cfg, out);
    else if (command == "simplex")
      res = cmd_simplex(cfg, out);
    else if (command == "convexity")
      res = cmd_convexity(cfg, out);
    else if (command == "cone")
      res = cmd_cone(cfg, out);
    else if (command == "separation")
      res = cmd_separation(cfg, out);
    else if (command == "sweep")
      res = cmd_sweep(cfg, out);
    else
      throw Error(Errc::ConfigError, "unknown command \"" + command + "\"");
  } catch (const Error& e) {
    res.message = e.what();
    res.exit_code = e.code() == Errc::ConfigError ? kExitConfig : kExitNumerical;
    Json j;
    j["error"] = e.what();
    j["code"] = errc_name(e.code());
    res.summary = j;
    out.write_json("error.json", j);
  }
  out.finish_manifest(command, config_hash(cfg), {{"total", ms_since(t0)}});
  return res;
}

}  // namespace cslab
