#include "cslab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cslab {

std::string format_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string surface_csv(const RadialGraph& g) {
  std::string out = "y1,y2,y3,rho,x1,x2,x3\n";
  for (int k = 0; k < g.grid.node_count(); ++k) {
    const SimplexPoint& y = g.grid.nodes[std::size_t(k)];
    const Point3 x = g.point(k);
    out += format_real(y[0]) + "," + format_real(y[1]) + "," + format_real(y[2]) +
           "," + format_real(g.rho[k]) + "," + format_real(x[0]) + "," +
           format_real(x[1]) + "," + format_real(x[2]) + "\n";
  }
  return out;
}

std::string surface_obj(const RadialGraph& g) {
  std::string out;
  for (int k = 0; k < g.grid.node_count(); ++k) {
    const Point3 x = g.point(k);
    out += "v " + format_real(x[0]) + " " + format_real(x[1]) + " " +
           format_real(x[2]) + "\n";
  }
  for (const auto& t : g.grid.triangles)
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) +
           " " + std::to_string(t[2] + 1) + "\n";
  return out;
}

std::string face_curves_csv(const SimplexApproximation& approx) {
  std::string out = "face,t,rho,x1,x2,x3\n";
  for (const auto& c : approx.face_curves) {
    for (int k = 0; k <= c.level; ++k) {
      const Point3 x = c.point(k);
      out += c.face.str() + "," + format_real(c.t(k)) + "," +
             format_real(c.rho[k]) + "," + format_real(x[0]) + "," +
             format_real(x[1]) + "," + format_real(x[2]) + "\n";
    }
  }
  return out;
}

std::string cone_samples_csv(const ConeEstimate& cone) {
  std::string out = "scale,z1,z2,z3,alpha,beta,gamma\n";
  for (const auto& s : cone.samples)
    out += format_real(s.scale) + "," + format_real(s.z[0]) + "," +
           format_real(s.z[1]) + "," + format_real(s.z[2]) + "," +
           format_real(s.alpha) + "," + format_real(s.beta) + "," +
           format_real(s.gamma) + "\n";
  return out;
}

Json face_json(SpeciesSubset face) {
  Json arr = Json::array();
  for (int i = 0; i < 3; ++i)
    if (face.contains(i)) arr.push_back(i + 1);
  return arr;
}

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Json to_json(const HypothesisReport& rep) {
  Json j;
  j["hypothesis"] = rep.hypothesis;
  j["sample_count"] = rep.sample_count;
  j["verdict"] = hyp_verdict_name(rep.verdict);
  Json v = Json::array();
  for (const auto& f : rep.findings) {
    Json e;
    e["severity"] = f.severity == HypothesisFinding::Severity::Violation
                        ? "violation"
                        : "near_threshold";
    e["face"] = face_json(f.face);
    Json pts = Json::array();
    for (const auto& p : f.points) pts.push_back(vec_json(p));
    e["points"] = pts;
    e["quantity"] = f.quantity;
    e["measured"] = f.measured;
    e["threshold"] = f.threshold;
    v.push_back(e);
  }
  j["violations"] = v;
  return j;
}

Json to_json(const SpectrumRecord& rec) {
  Json j;
  j["location"] = vec_json(rec.fp.location);
  j["face"] = face_json(rec.fp.face);
  j["residual"] = rec.fp.residual;
  j["principal"] = rec.principal;
  if (rec.internal_other)
    j["internal_other"] = *rec.internal_other;
  else
    j["internal_other"] = nullptr;
  Json ext = Json::array();
  for (const auto& e : rec.externals)
    ext.push_back(Json{{"species", e.species + 1}, {"value", e.value}});
  j["externals"] = ext;
  j["margin"] = rec.margin();
  if (rec.degenerate) j["degenerate"] = true;
  if (rec.marginal) j["marginal"] = true;
  return j;
}

Json to_json(const ClassificationReport& rep) {
  Json j;
  j["verdict"] = class_verdict_name(rep.verdict);
  j["margin_tol"] = rep.margin_tol;
  j["note"] = rep.note;
  j["max_planar_points_on_one_face"] = rep.max_planar_points_on_one_face;
  Json pts = Json::array();
  for (const auto& s : rep.spectra) pts.push_back(to_json(s));
  j["fixed_points"] = pts;
  if (!rep.spectra.empty()) j["min_margin"] = rep.min_margin();
  return j;
}

Json to_json(const ConvexityReport& rep) {
  Json j;
  j["method"] = rep.method == ConvexityMethod::MidpointGraph ? "midpoint_graph"
                                                             : "hull_deviation";
  j["worst_violation"] = rep.worst_violation;
  j["margin"] = rep.margin;
  j["verdict"] = convexity_verdict_name(rep.verdict);
  j["level"] = rep.level;
  j["pairs_tested"] = rep.pairs_tested;
  j["tol_c"] = rep.tol_c;
  return j;
}

Json to_json(const ConeEstimate& cone) {
  Json j;
  j["fixed_point"] = vec_json(cone.fp.location);
  j["face"] = face_json(cone.fp.face);
  j["basis"] = Json{{"e_external", vec_json(cone.e_external)},
                    {"r", vec_json(cone.r_dir)},
                    {"w", vec_json(cone.w_dir)}};
  Json st = Json::array();
  for (const auto& s : cone.stats) {
    Json e;
    e["h"] = s.h;
    e["count"] = s.count;
    e["min_beta"] = s.min_beta;
    e["min_beta_over_alpha"] =
        s.count_alpha ? Json(s.min_beta_over_alpha) : Json(nullptr);
    e["count_alpha"] = s.count_alpha;
    e["min_alpha_over_beta"] =
        s.count_beta ? Json(s.min_alpha_over_beta) : Json(nullptr);
    e["count_beta"] = s.count_beta;
    st.push_back(e);
  }
  j["scales"] = st;
  j["sample_count"] = cone.samples.size();
  return j;
}

Json to_json(const LemmaReport& rep) {
  Json j;
  j["eps_cone"] = rep.eps_cone;
  j["c_low"] = rep.c_low;
  j["l1"] = lemma_verdict_name(rep.l1);
  j["l2"] = lemma_verdict_name(rep.l2);
  j["l3"] = lemma_verdict_name(rep.l3);
  j["stable_across_scales"] = rep.stable_across_scales;
  Json sc = Json::array();
  for (const auto& s : rep.scales)
    sc.push_back(Json{{"h", s.h},
                      {"l1", lemma_verdict_name(s.l1)},
                      {"l2", lemma_verdict_name(s.l2)},
                      {"l3", lemma_verdict_name(s.l3)}});
  j["scales"] = sc;
  return j;
}

Json to_json(const SeparationFit& fit) {
  Json j;
  j["face"] = face_json(fit.face);
  j["n_max"] = fit.n_max;
  j["nu_hat"] = fit.nu_hat;
  j["r_squared"] = fit.r_squared;
  j["start"] = vec_json(fit.start);
  Json series = Json::array();
  for (Real v : fit.log_ratio) series.push_back(v);
  j["log_ratio"] = series;
  return j;
}

Json to_json(const UnorderednessReport& rep) {
  Json j;
  j["pairs_checked"] = rep.pairs_checked;
  j["margin"] = rep.margin_used;
  j["violation_count"] = rep.violations.size();
  Json v = Json::array();
  for (const auto& p : rep.violations)
    v.push_back(Json{{"below", p.node_a}, {"above", p.node_b}, {"margin", p.margin}});
  j["violations"] = v;
  return j;
}

Json to_json(const AttractionReport& rep) {
  Json j;
  j["seeds"] = rep.seeds;
  j["burn_in"] = rep.burn_in;
  j["max_distance"] = rep.max_distance;
  j["mean_distance"] = rep.mean_distance;
  j["threshold"] = rep.threshold;
  j["pass"] = rep.pass;
  return j;
}

OutputDir::OutputDir(std::string dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const std::filesystem::path path = std::filesystem::path(dir_) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "cannot write " + path.string());
  out << content;
  out.close();
  files_.emplace_back(name, fnv1a64(content));
}

void OutputDir::write_json(const std::string& name, const Json& j) {
  write(name, j.dump(2) + "\n");
}

void OutputDir::finish_manifest(
    const std::string& command, std::uint64_t config_hash,
    const std::vector<std::pair<std::string, double>>& timings_ms) {
  Json j;
  j["command"] = command;
  j["config_hash"] = hex64(config_hash);
  j["version"] = "0.1.0";
  Json files = Json::array();
  for (const auto& [name, hash] : files_)
    files.push_back(Json{{"path", name}, {"fnv1a64", hex64(hash)}});
  j["artifacts"] = files;
  Json t = Json::object();
  for (const auto& [name, ms] : timings_ms) t[name] = ms;
  j["timings_ms"] = t;
  const std::filesystem::path path = std::filesystem::path(dir_) / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
}

}  // namespace cslab
