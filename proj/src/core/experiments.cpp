#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "core/special.hpp"
#include "json.hpp"

namespace eigenobs {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double wrap(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0.0) r += period;
  return r;
}

double arc_distance(double s1, double s2, double period) {
  const double d = wrap(s1 - s2, period);
  return std::min(d, period - d);
}

// argmin set of the boundary-gradient profile: whole boundary when the
// profile is flat within the configured fraction, else a band above the min
void extract_argmin(const ExperimentConfig& cfg, SweepResult& out) {
  const auto& smp = out.profile.samples;
  if (smp.empty()) fail(ErrorKind::Numeric, "empty boundary profile");
  double mean = 0.0;
  for (const auto& s : smp) mean += s.value;
  mean /= smp.size();
  const double lo = out.profile.min_value, hi = out.profile.max_value;
  out.argmin_whole_boundary = (hi - lo) <= cfg.argmin_flat_frac * mean;
  const double band =
      out.argmin_whole_boundary
          ? hi
          : lo + cfg.argmin_band_frac * (hi - lo);
  for (const auto& s : smp) {
    if (s.value <= band + 1e-300) {
      out.argmin_set.push_back(s.position);
      out.argmin_params.push_back(s.s);
    }
  }
}

struct DiffNorms {
  double h1_full = 0.0, h1_omega = 0.0;
  double l2_full = 0.0, l2_omega = 0.0;
};

DiffNorms difference_norms(const Mesh& mesh, const FieldVector& d,
                           const std::vector<uint8_t>& mask) {
  DiffNorms n;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tv = mesh.tris[t];
    const double area = mesh.triangle_area(t);
    const Vec2 g = p1_gradient(mesh, d, t);
    const double e = dot(g, g) * area;
    const double s = d[tv[0]] + d[tv[1]] + d[tv[2]];
    const double q =
        d[tv[0]] * d[tv[0]] + d[tv[1]] * d[tv[1]] + d[tv[2]] * d[tv[2]];
    const double m = area / 12.0 * (s * s + q);
    const bool dead = mask[tv[0]] && mask[tv[1]] && mask[tv[2]];
    n.h1_full += e;
    n.l2_full += m;
    if (!dead) {
      n.h1_omega += e;
      n.l2_omega += m;
    }
  }
  return n;
}

double boundary_integral_phi0(const Mesh& mesh, const FieldVector& phi0,
                              const std::vector<uint8_t>& mask) {
  // length integral of phi0 over the interface between dead and live cells
  std::map<std::pair<int, int>, std::pair<int, int>> edges;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.tris[t][k], b = mesh.tris[t][(k + 1) % 3];
      auto [it, fresh] = edges.try_emplace(
          std::make_pair(std::min(a, b), std::max(a, b)), t, -1);
      if (!fresh) it->second.second = t;
    }
  auto dead = [&](int t) {
    return mask[mesh.tris[t][0]] && mask[mesh.tris[t][1]] &&
           mask[mesh.tris[t][2]];
  };
  double acc = 0.0;
  for (const auto& [key, cells] : edges) {
    if (cells.second < 0) continue;
    if (dead(cells.first) == dead(cells.second)) continue;
    const double len = dist(mesh.verts[key.first], mesh.verts[key.second]);
    acc += len * 0.5 * (phi0[key.first] + phi0[key.second]);
  }
  return acc;
}

void write_trace_csv(const std::string& path, const OptimizationResult& opt) {
  std::ostringstream os;
  os << "id,anchor_s,cell_count,lambda,cap\n";
  int id = 0;
  for (const auto& c : opt.trace) {
    os << id++ << "," << g17(c.anchor_s) << "," << c.cell_count << ","
       << g17(c.eigenvalue) << "," << g17(c.capacity) << "\n";
  }
  write_text_file(path, os.str());
}

std::string profile_csv(const BoundaryGradientProfile& prof) {
  std::ostringstream os;
  os << "s,grad_estimate\n";
  for (const auto& s : prof.samples)
    os << g17(s.s) << "," << g17(s.value) << "\n";
  return os.str();
}

ordered_json domain_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["kind"] = cfg.domain_kind;
  j["area"] = cfg.domain.area();
  j["boundary_length"] = cfg.domain.boundary_length();
  j["inradius"] = cfg.domain.inradius();
  j["faber_krahn_threshold"] = cfg.domain.faber_krahn_threshold();
  return j;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Resource, "cannot write '" + path + "'");
  out << content;
}

void ensure_outdir(const std::string& outdir) {
  if (outdir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) fail(ErrorKind::Resource, "cannot create '" + outdir + "'");
}

std::string sweep_csv_header() {
  return "eps,lambda0,lambda_eps,lambda_shift,cap,shift_over_cap,cap_over_eps,"
         "shift_over_eps,fb_sqrt_lambda,fb_iqr,fb_min,fb_max,h1_diff_omega,"
         "h1_diff_full,l2_diff_omega,l2_diff_full,l2_over_cap,dist_argmin,"
         "mass_frac,bdry_int_phi0_over_eps,cap_lower_bound,obstacle_area,"
         "width,anchor_s,cell_count\n";
}

std::string sweep_csv_row(const SweepRecord& r) {
  std::ostringstream os;
  os << g17(r.eps) << "," << g17(r.lambda0) << "," << g17(r.lambda_eps) << ","
     << g17(r.lambda_shift) << "," << g17(r.cap) << ","
     << g17(r.shift_over_cap) << "," << g17(r.cap_over_eps) << ","
     << g17(r.shift_over_eps) << "," << g17(r.fb_sqrt_lambda) << ","
     << g17(r.fb_iqr) << "," << g17(r.fb_min) << "," << g17(r.fb_max) << ","
     << g17(r.h1_diff_omega) << "," << g17(r.h1_diff_full) << ","
     << g17(r.l2_diff_omega) << "," << g17(r.l2_diff_full) << ","
     << g17(r.l2_over_cap) << "," << g17(r.dist_argmin) << ","
     << g17(r.mass_frac) << "," << g17(r.bdry_int_phi0_over_eps) << ","
     << g17(r.cap_lower_bound) << "," << g17(r.obstacle_area) << ","
     << g17(r.width) << "," << g17(r.anchor_s) << "," << r.cell_count << "\n";
  return os.str();
}

SlopeEstimate estimate_slope(
    const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 3)
    fail(ErrorKind::Argument, "slope estimation needs at least three points");
  auto sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].first == sorted[i - 1].first)
      fail(ErrorKind::Argument, "slope estimation needs distinct abscissae");

  const size_t m = std::max<size_t>(2, (sorted.size() + 1) / 2);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sx += sorted[i].first;
    sy += sorted[i].second;
    sxx += sorted[i].first * sorted[i].first;
    sxy += sorted[i].first * sorted[i].second;
  }
  const double denom = m * sxx - sx * sx;
  SlopeEstimate est;
  est.method = "least_squares_smallest_half";
  est.slope = (m * sxy - sx * sy) / denom;
  est.intercept = (sy - est.slope * sx) / m;
  double rss = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double r = sorted[i].second - est.slope * sorted[i].first -
                     est.intercept;
    rss += r * r;
  }
  est.residual = std::sqrt(rss / m);
  est.richardson = (sorted[1].second - sorted[0].second) /
                   (sorted[1].first - sorted[0].first);
  return est;
}

ConcentrationReport concentration_report(
    const std::vector<SweepRecord>& records) {
  if (records.empty())
    fail(ErrorKind::Argument, "concentration report needs records");
  ConcentrationReport rep;
  rep.dist_decreasing = true;
  for (size_t i = 0; i < records.size(); ++i) {
    rep.dist_argmin.push_back(records[i].dist_argmin);
    rep.mass_frac.push_back(records[i].mass_frac);
    if (i > 0 && records[i].dist_argmin > records[i - 1].dist_argmin)
      rep.dist_decreasing = false;
  }
  rep.final_mass_frac = records.back().mass_frac;
  return rep;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& outdir) {
  if (cfg.epsilons.empty())
    throw ConfigError(0, "sweep.epsilons", "missing required field");
  ensure_outdir(outdir);

  Mesh mesh = triangulate(cfg.domain, cfg.mesh_h);
  for (int i = 0; i < cfg.refine; ++i) mesh = refine(mesh);
  ObstacleEvaluator ev(mesh, cfg.eigen_tol);

  SweepResult out;
  out.lambda0 = ev.base().lambda;
  out.boundary_length = cfg.domain.boundary_length();
  out.mesh_vertices = mesh.vertex_count();
  out.mesh_triangles = mesh.triangle_count();
  out.profile = boundary_gradient(ev.base(), mesh);
  extract_argmin(cfg, out);
  out.delta = cfg.delta > 0.0
                  ? cfg.delta
                  : 4.0 * cfg.bump_width_for(cfg.epsilons.back());

  std::ofstream csv;
  if (!outdir.empty()) {
    csv.open(outdir + "/sweep.csv", std::ios::binary);
    csv << sweep_csv_header();
    csv.flush();
    write_text_file(outdir + "/profile.csv", profile_csv(out.profile));
  }

  const auto mask0 = outer_mask(mesh);
  int idx = -1;
  for (double eps : cfg.epsilons) {
    ++idx;
    try {
      const double width = cfg.bump_width_for(eps);
      OptimizationResult opt;
      if (cfg.optimizer == "parametric") {
        ParametricSearchParams pp;
        pp.width = width;
        pp.profile = cfg.profile;
        pp.anchor_grid = cfg.anchor_grid;
        pp.search_tol = cfg.search_tol;
        pp.final_tol = cfg.eigen_tol;
        pp.bracket_frac = cfg.bracket_frac;
        opt = parametric_search(ev, cfg.domain, eps, pp);
      } else {
        opt = greedy_freeform(ev, eps, cfg.greedy);
      }
      const ObstacleRegion& region = opt.best.region;
      const auto cls = classify_nodes(mesh, region);
      const auto mask = constrained_mask(mesh, cls);
      const EigenPair pair = cls.obstacle.empty()
                                 ? ev.base()
                                 : ev.solve_constrained(mask, cfg.eigen_tol);

      SweepRecord rec;
      rec.eps = eps;
      rec.lambda0 = out.lambda0;
      rec.lambda_eps = pair.lambda;
      rec.lambda_shift = pair.lambda - out.lambda0;
      rec.cap = opt.best.capacity;
      rec.shift_over_cap =
          rec.cap > 0.0 ? rec.lambda_shift / rec.cap
                        : std::numeric_limits<double>::quiet_NaN();
      rec.cap_over_eps = rec.cap / eps;
      rec.shift_over_eps = rec.lambda_shift / eps;
      if (!cls.obstacle.empty() && !cls.free_boundary.empty()) {
        const auto fb = free_boundary_gradient(pair, mesh, cls);
        rec.fb_sqrt_lambda = fb.median;
        rec.fb_iqr = fb.iqr;
        rec.fb_min = fb.min;
        rec.fb_max = fb.max;
      } else {
        rec.fb_sqrt_lambda = rec.fb_iqr = rec.fb_min = rec.fb_max =
            std::numeric_limits<double>::quiet_NaN();
        out.row_errors.push_back("eps " + g17(eps) +
                                 ": obstacle captured no mesh vertices");
      }
      FieldVector d(pair.field.size());
      for (size_t i = 0; i < d.size(); ++i)
        d[i] = pair.field[i] - ev.base().field[i];
      const auto norms = difference_norms(mesh, d, mask);
      rec.h1_diff_full = norms.h1_full;
      rec.h1_diff_omega = norms.h1_omega;
      rec.l2_diff_full = norms.l2_full;
      rec.l2_diff_omega = norms.l2_omega;
      rec.l2_over_cap = rec.cap > 0.0
                            ? rec.l2_diff_omega / rec.cap
                            : std::numeric_limits<double>::quiet_NaN();
      const auto obs_samples =
          region.boundary_samples(cfg.hausdorff_samples);
      rec.dist_argmin = directed_hausdorff(obs_samples, out.argmin_set);
      double win = 0.0, wtot = 0.0;
      for (const auto& [p, w] : region.mass_points()) {
        wtot += w;
        double dmin = std::numeric_limits<double>::max();
        for (const auto& q : out.argmin_set) dmin = std::min(dmin, dist(p, q));
        if (dmin <= out.delta) win += w;
      }
      rec.mass_frac = wtot > 0.0 ? win / wtot : 0.0;
      rec.bdry_int_phi0_over_eps =
          boundary_integral_phi0(mesh, ev.base().field, mask) / eps;
      rec.cap_lower_bound =
          cls.obstacle.empty()
              ? 0.0
              : capacity_lower_bound(mesh, cls, ev.base().field, eps);
      rec.obstacle_area = region.volume();
      rec.width = region.parametric() ? region.width() : 0.0;
      rec.anchor_s = region.parametric() ? region.anchor_param() : -1.0;
      rec.cell_count = region.parametric()
                           ? 0
                           : static_cast<int>(region.cell_triangles().size());
      out.records.push_back(rec);

      if (!outdir.empty()) {
        csv << sweep_csv_row(rec);
        csv.flush();
        char name[64];
        std::snprintf(name, sizeof name, "/trace_%03d.csv", idx);
        write_trace_csv(outdir + name, opt);
        std::snprintf(name, sizeof name, "/obstacle_%03d.json", idx);
        write_text_file(outdir + name, region.to_json());
      }
    } catch (const Error& e) {
      out.row_errors.push_back("eps " + g17(eps) + ": " + e.what());
    }
  }

  if (out.records.size() >= 3) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : out.records) pts.emplace_back(r.eps, r.lambda_shift);
    out.shift_slope = estimate_slope(pts);
  }
  out.check_outcomes = evaluate_checks(cfg, out);

  if (!outdir.empty()) {
    const auto& checks = out.check_outcomes;
    ordered_json j;
    j["command"] = "sweep";
    j["domain"] = domain_json(cfg);
    j["mesh"] = {{"h", cfg.mesh_h},
                 {"refine", cfg.refine},
                 {"vertices", out.mesh_vertices},
                 {"triangles", out.mesh_triangles}};
    j["lambda0"] = out.lambda0;
    j["optimizer"] = cfg.optimizer;
    j["records"] = out.records.size();
    j["row_errors"] = out.row_errors;
    if (out.records.size() >= 3) {
      j["shift_slope"] = {{"slope", out.shift_slope.slope},
                          {"intercept", out.shift_slope.intercept},
                          {"residual", out.shift_slope.residual},
                          {"richardson", out.shift_slope.richardson},
                          {"method", out.shift_slope.method}};
    }
    if (!out.records.empty()) {
      const auto& last = out.records.back();
      j["final"] = {{"eps", last.eps},
                    {"cap_over_eps", last.cap_over_eps},
                    {"shift_over_cap", last.shift_over_cap},
                    {"fb_sqrt_lambda", last.fb_sqrt_lambda},
                    {"mass_frac", last.mass_frac},
                    {"dist_argmin", last.dist_argmin}};
    }
    j["argmin"] = {{"whole_boundary", out.argmin_whole_boundary},
                   {"points", out.argmin_set.size()},
                   {"delta", out.delta},
                   {"hausdorff_samples", cfg.hausdorff_samples},
                   {"profile_min", out.profile.min_value},
                   {"profile_max", out.profile.max_value}};
    ordered_json jc = ordered_json::array();
    bool all_pass = true;
    for (const auto& c : checks) {
      jc.push_back({{"name", c.name},
                    {"pass", c.pass},
                    {"value", c.value},
                    {"detail", c.detail}});
      all_pass = all_pass && c.pass;
    }
    j["checks"] = jc;
    j["checks_pass"] = all_pass;
    write_text_file(outdir + "/summary.json", j.dump(2) + "\n");
  }
  return out;
}

namespace {

bool trend_nonincreasing(const std::vector<double>& v, double slack,
                         std::string* detail) {
  bool ok = true;
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << " ";
    os << v[i];
    if (i > 0 && !(v[i] <= v[i - 1] * (1.0 + slack) + 1e-300)) ok = false;
    if (!std::isfinite(v[i])) ok = false;
  }
  *detail = os.str();
  return ok;
}

}  // namespace

std::vector<CheckOutcome> evaluate_checks(const ExperimentConfig& cfg,
                                          const SweepResult& sweep) {
  std::vector<CheckOutcome> out;
  const auto& ck = cfg.checks;
  const bool have_records = !sweep.records.empty();

  // reference constant: Bessel oracle on disks, FEM scan otherwise
  double target_m = sweep.profile.min_value;
  if (cfg.domain_kind == "disk")
    target_m = disk_reference(cfg.domain.param_radius()).boundary_gradient;
  const double target_m2 = target_m * target_m;

  auto add = [&](const std::string& name, bool pass, double value,
                 const std::string& detail) {
    out.push_back({name, pass, value, detail});
  };

  if (ck.slope_rtol) {
    const bool have = sweep.records.size() >= 3;
    const double slope = have ? sweep.shift_slope.slope : 0.0;
    const bool pass =
        have && std::abs(slope - target_m2) <= *ck.slope_rtol * target_m2;
    add("shift_slope", pass, slope,
        "target " + g17(target_m2) + " rtol " + g17(*ck.slope_rtol));
  }
  if (ck.cap_rtol && have_records) {
    const double v = sweep.records.back().cap_over_eps;
    add("cap_over_eps", std::isfinite(v) && std::abs(v - target_m2) <=
                            *ck.cap_rtol * target_m2,
        v, "target " + g17(target_m2) + " rtol " + g17(*ck.cap_rtol));
  }
  if (ck.cap_monotone && have_records) {
    std::vector<double> dev;
    for (const auto& r : sweep.records)
      dev.push_back(std::abs(r.cap_over_eps - target_m2));
    std::string detail;
    const bool pass = trend_nonincreasing(dev, ck.trend_slack, &detail);
    add("cap_over_eps_trend", pass, dev.back(), "|cap/eps - target|: " + detail);
  }
  if (ck.stability_lo && ck.stability_hi && have_records) {
    const double v = sweep.records.back().shift_over_cap;
    add("stability_ratio",
        std::isfinite(v) && v >= *ck.stability_lo && v <= *ck.stability_hi, v,
        "window [" + g17(*ck.stability_lo) + ", " + g17(*ck.stability_hi) +
            "]");
  }
  if (ck.l2_over_cap_decreasing && have_records) {
    std::vector<double> v;
    for (const auto& r : sweep.records) v.push_back(r.l2_over_cap);
    std::string detail;
    add("l2_over_cap_trend", trend_nonincreasing(v, ck.trend_slack, &detail),
        v.back(), detail);
  }
  if (ck.fb_rtol && have_records) {
    const double v = sweep.records.back().fb_sqrt_lambda;
    add("fb_sqrt_lambda",
        std::isfinite(v) && std::abs(v - target_m) <= *ck.fb_rtol * target_m,
        v, "target " + g17(target_m) + " rtol " + g17(*ck.fb_rtol));
  }
  if (ck.fb_iqr_decreasing && have_records) {
    std::vector<double> v;
    for (const auto& r : sweep.records) v.push_back(r.fb_iqr);
    std::string detail;
    add("fb_iqr_trend", trend_nonincreasing(v, ck.trend_slack, &detail),
        v.back(), detail);
  }
  if (ck.anchor_arc_frac && have_records) {
    const double s = sweep.records.back().anchor_s;
    double best = std::numeric_limits<double>::max();
    for (double sa : sweep.argmin_params)
      best = std::min(best, arc_distance(s, sa, sweep.boundary_length));
    const bool pass = s >= 0.0 &&
                      best <= *ck.anchor_arc_frac * sweep.boundary_length;
    add("anchor_near_argmin", pass, best,
        "limit " + g17(*ck.anchor_arc_frac * sweep.boundary_length));
  }
  if (ck.mass_frac_min && have_records) {
    const double v = sweep.records.back().mass_frac;
    add("mass_fraction", v >= *ck.mass_frac_min, v,
        "min " + g17(*ck.mass_frac_min));
  }
  if (ck.hausdorff_decreasing && have_records) {
    std::vector<double> v;
    for (const auto& r : sweep.records) v.push_back(r.dist_argmin);
    std::string detail;
    add("dist_argmin_trend", trend_nonincreasing(v, ck.trend_slack, &detail),
        v.back(), detail);
  }
  if (!sweep.row_errors.empty())
    add("row_errors", false, static_cast<double>(sweep.row_errors.size()),
        sweep.row_errors.front());
  return out;
}

SolveOutcome run_solve(const ExperimentConfig& cfg, const std::string& outdir) {
  ensure_outdir(outdir);
  Mesh mesh = triangulate(cfg.domain, cfg.mesh_h);
  for (int i = 0; i < cfg.refine; ++i) mesh = refine(mesh);
  const SparseSym K = assemble_stiffness(mesh);
  const SparseSym M = assemble_mass(mesh);
  const EigenPair pair =
      smallest_eigenpair(K, M, outer_mask(mesh), cfg.eigen_tol);

  SolveOutcome out;
  out.lambda0 = pair.lambda;
  out.residual = pair.residual;
  out.mesh_vertices = mesh.vertex_count();
  out.mesh_triangles = mesh.triangle_count();
  out.profile = boundary_gradient(pair, mesh);
  if (!outdir.empty()) {
    write_text_file(outdir + "/profile.csv", profile_csv(out.profile));
    ordered_json j;
    j["command"] = "solve";
    j["domain"] = domain_json(cfg);
    j["mesh"] = {{"h", cfg.mesh_h},
                 {"refine", cfg.refine},
                 {"vertices", out.mesh_vertices},
                 {"triangles", out.mesh_triangles}};
    j["lambda0"] = out.lambda0;
    j["residual"] = out.residual;
    j["profile"] = {{"min", out.profile.min_value},
                    {"max", out.profile.max_value},
                    {"samples", out.profile.samples.size()}};
    write_text_file(outdir + "/summary.json", j.dump(2) + "\n");
  }
  return out;
}

CapacityOutcome run_capacity(const ExperimentConfig& cfg,
                             const std::string& outdir) {
  if (!(cfg.single_eps > 0.0))
    throw ConfigError(0, "obstacle.eps", "missing or nonpositive");
  ensure_outdir(outdir);
  Mesh mesh = triangulate(cfg.domain, cfg.mesh_h);
  for (int i = 0; i < cfg.refine; ++i) mesh = refine(mesh);
  ObstacleEvaluator ev(mesh, cfg.eigen_tol);

  StraighteningMap map(cfg.domain, cfg.anchor_s);
  BumpObstacleSpec spec;
  spec.anchor_s = cfg.anchor_s;
  spec.width = cfg.bump_width_for(cfg.single_eps);
  spec.profile = cfg.profile;
  spec.target_volume = cfg.single_eps;
  const auto region = ObstacleRegion::bump(spec, map);
  const auto cls = classify_nodes(mesh, region);
  const auto cand = ev.evaluate(region, cfg.eigen_tol);

  CapacityOutcome out;
  out.eps = cfg.single_eps;
  out.cap = cand.capacity;
  out.lambda0 = ev.base().lambda;
  out.lambda_eps = cand.eigenvalue;
  out.stability = out.cap > 0.0
                      ? stability_ratio(out.lambda_eps, out.lambda0, out.cap)
                      : std::numeric_limits<double>::quiet_NaN();
  out.lower_bound = cls.obstacle.empty()
                        ? 0.0
                        : capacity_lower_bound(mesh, cls, ev.base().field,
                                               cfg.single_eps);
  out.obstacle_volume = region.quadrature_volume();
  if (!outdir.empty()) {
    write_text_file(outdir + "/obstacle.json", region.to_json() + "\n");
    ordered_json j;
    j["command"] = "capacity";
    j["domain"] = domain_json(cfg);
    j["eps"] = out.eps;
    j["anchor_s"] = cfg.anchor_s;
    j["width"] = spec.width;
    j["cap"] = out.cap;
    j["lambda0"] = out.lambda0;
    j["lambda_eps"] = out.lambda_eps;
    j["stability_ratio"] = out.stability;
    j["cap_lower_bound"] = out.lower_bound;
    j["obstacle_volume_quadrature"] = out.obstacle_volume;
    write_text_file(outdir + "/summary.json", j.dump(2) + "\n");
  }
  return out;
}

OptimizeOutcome run_optimize(const ExperimentConfig& cfg,
                             const std::string& outdir) {
  double eps = cfg.single_eps;
  if (!(eps > 0.0)) {
    if (cfg.epsilons.empty())
      throw ConfigError(0, "obstacle.eps", "missing required field");
    eps = cfg.epsilons.front();
  }
  ensure_outdir(outdir);
  Mesh mesh = triangulate(cfg.domain, cfg.mesh_h);
  for (int i = 0; i < cfg.refine; ++i) mesh = refine(mesh);
  ObstacleEvaluator ev(mesh, cfg.eigen_tol);

  OptimizeOutcome out;
  out.eps = eps;
  out.lambda0 = ev.base().lambda;
  if (cfg.optimizer == "parametric") {
    ParametricSearchParams pp;
    pp.width = cfg.bump_width_for(eps);
    pp.profile = cfg.profile;
    pp.anchor_grid = cfg.anchor_grid;
    pp.search_tol = cfg.search_tol;
    pp.final_tol = cfg.eigen_tol;
    pp.bracket_frac = cfg.bracket_frac;
    out.result = parametric_search(ev, cfg.domain, eps, pp);
  } else {
    out.result = greedy_freeform(ev, eps, cfg.greedy);
  }
  if (!outdir.empty()) {
    write_trace_csv(outdir + "/trace.csv", out.result);
    write_text_file(outdir + "/obstacle.json",
                    out.result.best.region.to_json() + "\n");
    ordered_json j;
    j["command"] = "optimize";
    j["domain"] = domain_json(cfg);
    j["eps"] = eps;
    j["optimizer"] = cfg.optimizer;
    j["lambda0"] = out.lambda0;
    j["best"] = {{"lambda", out.result.best.eigenvalue},
                 {"cap", out.result.best.capacity},
                 {"anchor_s", out.result.best.anchor_s},
                 {"cell_count", out.result.best.cell_count},
                 {"provenance", out.result.best.provenance}};
    j["evaluations"] = out.result.trace.size();
    j["skipped"] = out.result.skipped.size();
    write_text_file(outdir + "/summary.json", j.dump(2) + "\n");
  }
  return out;
}

ValidateOutcome run_validate(const ExperimentConfig& cfg,
                             const std::string& outdir) {
  ensure_outdir(outdir);
  ValidateOutcome out;
  const double h = cfg.validate_h;
  const double rtol = cfg.validate_rtol;

  auto solve_domain = [&](const Domain& dom, double hh) {
    const Mesh mesh = triangulate(dom, hh);
    const SparseSym K = assemble_stiffness(mesh);
    const SparseSym M = assemble_mass(mesh);
    return smallest_eigenpair(K, M, outer_mask(mesh), 1e-10).lambda;
  };

  const auto dref = disk_reference(1.0);
  const double lam_disk = solve_domain(Domain::disk(1.0), h);
  out.entries.push_back({"disk_lambda0", lam_disk, dref.lambda0,
                         std::abs(lam_disk - dref.lambda0) / dref.lambda0,
                         std::abs(lam_disk - dref.lambda0) <=
                             rtol * dref.lambda0});

  const auto sref = rectangle_reference(1.0, 1.0);
  const Domain sq = Domain::square(1.0);
  const Mesh mesh_h = triangulate(sq, h);
  const Mesh mesh_h2 = refine(mesh_h);
  auto solve_mesh = [&](const Mesh& mesh) {
    const SparseSym K = assemble_stiffness(mesh);
    const SparseSym M = assemble_mass(mesh);
    return smallest_eigenpair(K, M, outer_mask(mesh), 1e-10).lambda;
  };
  const double lam_sq = solve_mesh(mesh_h);
  const double lam_sq2 = solve_mesh(mesh_h2);
  out.entries.push_back({"square_lambda0", lam_sq, sref.lambda0,
                         std::abs(lam_sq - sref.lambda0) / sref.lambda0,
                         std::abs(lam_sq - sref.lambda0) <=
                             rtol * sref.lambda0});
  const double ratio =
      (lam_sq - sref.lambda0) / std::max(lam_sq2 - sref.lambda0, 1e-300);
  out.entries.push_back({"square_error_ratio", ratio, 4.0, ratio,
                         ratio >= cfg.ratio_lo && ratio <= cfg.ratio_hi});

  out.pass = true;
  for (const auto& e : out.entries) out.pass = out.pass && e.pass;

  if (!outdir.empty()) {
    ordered_json j;
    j["command"] = "validate";
    j["h"] = h;
    j["rtol"] = rtol;
    ordered_json entries = ordered_json::array();
    for (const auto& e : out.entries)
      entries.push_back({{"name", e.name},
                         {"value", e.value},
                         {"expected", e.expected},
                         {"error", e.error},
                         {"pass", e.pass}});
    j["entries"] = entries;
    j["pass"] = out.pass;
    write_text_file(outdir + "/summary.json", j.dump(2) + "\n");
  }
  return out;
}

}  // namespace eigenobs
