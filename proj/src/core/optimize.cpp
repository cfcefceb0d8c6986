#include "core/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace eigenobs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0.0) r += period;
  return r;
}

NodeClassification classification_from_verts(const Mesh& mesh,
                                             std::vector<int> obstacle) {
  NodeClassification cls;
  cls.is_obstacle.assign(mesh.vertex_count(), 0);
  std::sort(obstacle.begin(), obstacle.end());
  obstacle.erase(std::unique(obstacle.begin(), obstacle.end()),
                 obstacle.end());
  for (int v : obstacle) cls.is_obstacle[v] = 1;
  cls.obstacle = std::move(obstacle);
  const auto nbrs = mesh.vertex_neighbors();
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.flags[v] != kInterior || cls.is_obstacle[v]) continue;
    bool touches = false;
    for (int w : nbrs[v])
      if (cls.is_obstacle[w]) {
        touches = true;
        break;
      }
    if (touches)
      cls.free_boundary.push_back(v);
    else
      cls.interior.push_back(v);
  }
  return cls;
}

}  // namespace

ObstacleEvaluator::ObstacleEvaluator(const Mesh& mesh, double eigen_tol)
    : mesh_(&mesh), tol_(eigen_tol) {
  K_ = assemble_stiffness(mesh);
  M_ = assemble_mass(mesh);
  outer_ = outer_mask(mesh);
  base_ = smallest_eigenpair(K_, M_, outer_, tol_);
}

EigenPair ObstacleEvaluator::solve_constrained(
    const std::vector<uint8_t>& constrained, double tol) const {
  return smallest_eigenpair(K_, M_, constrained, tol > 0.0 ? tol : tol_);
}

double ObstacleEvaluator::capacity_of(
    const std::vector<int>& obstacle_verts) const {
  if (obstacle_verts.empty()) return 0.0;
  const auto cls = classification_from_verts(*mesh_, obstacle_verts);
  return relative_capacity(*mesh_, cls, K_, base_.field).capacity;
}

ObstacleCandidate ObstacleEvaluator::evaluate(const ObstacleRegion& region,
                                              double tol) const {
  const auto cls = classify_nodes(*mesh_, region);
  ObstacleCandidate cand;
  cand.region = region;
  if (cls.obstacle.empty()) {
    // same constrained set as the base problem
    cand.eigenvalue = base_.lambda;
    cand.capacity = 0.0;
  } else {
    const auto mask = constrained_mask(*mesh_, cls);
    cand.eigenvalue = solve_constrained(mask, tol).lambda;
    cand.capacity = relative_capacity(*mesh_, cls, K_, base_.field).capacity;
  }
  if (region.parametric()) {
    cand.anchor_s = region.anchor_param();
    std::ostringstream os;
    os << "bump s0=" << cand.anchor_s << " r=" << region.width();
    cand.provenance = os.str();
  } else {
    cand.cell_count = static_cast<int>(region.cell_triangles().size());
    cand.provenance = "cells n=" + std::to_string(cand.cell_count);
  }
  return cand;
}

OptimizationResult parametric_search(const ObstacleEvaluator& ev,
                                     const Domain& domain, double eps,
                                     const ParametricSearchParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  if (params.anchor_grid < 2)
    fail(ErrorKind::Argument, "anchor grid needs at least two points");
  const double L = domain.boundary_length();

  OptimizationResult out;
  auto try_anchor = [&](double s,
                        double tol) -> std::optional<ObstacleCandidate> {
    s = wrap(s, L);
    try {
      StraighteningMap map(domain, s);
      BumpObstacleSpec spec;
      spec.anchor_s = s;
      spec.width = params.width;
      spec.profile = params.profile;
      spec.target_volume = eps;
      const auto region = ObstacleRegion::bump(spec, map);
      return ev.evaluate(region, tol);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "anchor " << s << " skipped: " << e.what();
      out.skipped.push_back(os.str());
      return std::nullopt;
    }
  };

  double best_s = 0.0, best_lambda = std::numeric_limits<double>::max();
  for (int i = 0; i < params.anchor_grid; ++i) {
    const double s = L * i / params.anchor_grid;
    auto cand = try_anchor(s, params.search_tol);
    if (!cand) continue;
    out.trace.push_back(*cand);
    if (cand->eigenvalue < best_lambda) {
      best_lambda = cand->eigenvalue;
      best_s = s;
    }
  }
  if (out.trace.empty())
    fail(ErrorKind::Range,
         "parametric search failed at every anchor; enlarge the width");

  // golden-section refinement around the best grid anchor
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_s - L / params.anchor_grid;
  double b = best_s + L / params.anchor_grid;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  auto feval = [&](double s) {
    auto cand = try_anchor(s, params.search_tol);
    if (!cand) return std::numeric_limits<double>::max();
    out.trace.push_back(*cand);
    return cand->eigenvalue;
  };
  double f1 = feval(x1), f2 = feval(x2);
  while (b - a > params.bracket_frac * L) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = feval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = feval(x2);
    }
  }

  // exact re-solve of the winner
  double win_s = best_s;
  double win_lambda = best_lambda;
  for (const auto& c : out.trace)
    if (c.eigenvalue < win_lambda) {
      win_lambda = c.eigenvalue;
      win_s = c.anchor_s;
    }
  auto final_cand = try_anchor(win_s, params.final_tol);
  if (!final_cand)
    fail(ErrorKind::Numeric, "final parametric candidate failed to evaluate");
  out.trace.push_back(*final_cand);
  out.best = *final_cand;
  for (const auto& c : out.trace)
    if (c.eigenvalue < out.best.eigenvalue) out.best = c;
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

OptimizationResult greedy_freeform(const ObstacleEvaluator& ev, double eps,
                                   const GreedyParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  const Mesh& mesh = ev.mesh();
  const int nt = mesh.triangle_count();

  std::vector<double> areas(nt);
  double min_cell = std::numeric_limits<double>::max(), max_cell = 0.0;
  for (int t = 0; t < nt; ++t) {
    areas[t] = mesh.triangle_area(t);
    min_cell = std::min(min_cell, areas[t]);
    max_cell = std::max(max_cell, areas[t]);
  }
  if (eps < min_cell)
    fail(ErrorKind::Argument, "volume budget below one cell area");

  // cell adjacency over shared edges
  std::map<std::pair<int, int>, std::vector<int>> edge_cells;
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.tris[t][k], b = mesh.tris[t][(k + 1) % 3];
      edge_cells[{std::min(a, b), std::max(a, b)}].push_back(t);
    }
  std::vector<std::vector<int>> cell_nbrs(nt);
  for (const auto& [e, cells] : edge_cells)
    if (cells.size() == 2) {
      cell_nbrs[cells[0]].push_back(cells[1]);
      cell_nbrs[cells[1]].push_back(cells[0]);
    }
  std::vector<uint8_t> outer_adjacent(nt, 0);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k)
      if (mesh.flags[mesh.tris[t][k]] != kInterior) outer_adjacent[t] = 1;

  std::vector<uint8_t> in_obstacle(nt, 0);
  std::vector<uint8_t> constrained = outer_mask(mesh);
  std::vector<int> picked;
  double area = 0.0;

  FieldVector field = ev.base().field;
  auto score = [&](int t) {
    const Vec2 g = p1_gradient(mesh, field, t);
    return dot(g, g) * areas[t];
  };
  auto is_candidate = [&](int t) {
    if (in_obstacle[t]) return false;
    if (outer_adjacent[t]) return true;
    for (int u : cell_nbrs[t])
      if (in_obstacle[u]) return true;
    return false;
  };
  auto add_cell = [&](int t) {
    in_obstacle[t] = 1;
    picked.push_back(t);
    area += areas[t];
    for (int k = 0; k < 3; ++k) constrained[mesh.tris[t][k]] = 1;
  };
  auto resolve = [&](double tol) {
    field = ev.solve_constrained(constrained, tol).field;
  };

  int since_resolve = 0;
  while (area < eps) {
    int best = -1;
    double best_score = std::numeric_limits<double>::max();
    for (int t = 0; t < nt; ++t) {
      if (!is_candidate(t)) continue;
      const double sc = score(t);
      if (sc < best_score) {
        best_score = sc;
        best = t;
      }
    }
    if (best < 0)
      fail(ErrorKind::Numeric, "greedy growth ran out of candidate cells");
    add_cell(best);
    if (++since_resolve >= params.resolve_every && area < eps) {
      resolve(params.search_tol);
      since_resolve = 0;
    }
  }

  OptimizationResult out;
  auto snapshot = [&](double tol) {
    EigenPair pair = ev.solve_constrained(constrained, tol);
    return pair.lambda;
  };
  resolve(params.search_tol);
  double lambda = snapshot(params.search_tol);

  // swap-based local search: drop the most expensive boundary cell of the
  // obstacle for the cheapest candidate, keep only improvements
  for (int round = 0; round < params.exchange_rounds; ++round) {
    int rm = -1;
    double rm_score = -1.0;
    for (int t : picked) {
      bool boundary = false;
      for (int u : cell_nbrs[t])
        if (!in_obstacle[u]) {
          boundary = true;
          break;
        }
      if (!boundary) continue;
      const double sc = score(t);
      if (sc > rm_score) {
        rm_score = sc;
        rm = t;
      }
    }
    if (rm < 0) break;
    int add = -1;
    double add_score = std::numeric_limits<double>::max();
    for (int t = 0; t < nt; ++t) {
      if (t == rm || !is_candidate(t)) continue;
      const double na = area - areas[rm] + areas[t];
      if (na < eps || na >= eps + max_cell) continue;
      const double sc = score(t);
      if (sc < add_score) {
        add_score = sc;
        add = t;
      }
    }
    if (add < 0 || add_score >= rm_score) break;

    // apply the swap and rebuild the constraint set
    in_obstacle[rm] = 0;
    in_obstacle[add] = 1;
    std::replace(picked.begin(), picked.end(), rm, add);
    area += areas[add] - areas[rm];
    constrained = outer_mask(mesh);
    for (int t : picked)
      for (int k = 0; k < 3; ++k) constrained[mesh.tris[t][k]] = 1;
    resolve(params.search_tol);
    const double lambda_new = snapshot(params.search_tol);
    if (lambda_new >= lambda) {
      // revert
      in_obstacle[add] = 0;
      in_obstacle[rm] = 1;
      std::replace(picked.begin(), picked.end(), add, rm);
      area += areas[rm] - areas[add];
      constrained = outer_mask(mesh);
      for (int t : picked)
        for (int k = 0; k < 3; ++k) constrained[mesh.tris[t][k]] = 1;
      resolve(params.search_tol);
      break;
    }
    lambda = lambda_new;
  }

  // exact final solve and bookkeeping
  std::sort(picked.begin(), picked.end());
  std::vector<std::array<Vec2, 3>> tris;
  tris.reserve(picked.size());
  for (int t : picked) tris.push_back(mesh.tri_coords(t));
  ObstacleCandidate cand;
  cand.region = ObstacleRegion::cells(std::move(tris));
  const EigenPair final_pair = ev.solve_constrained(constrained, params.final_tol);
  cand.eigenvalue = final_pair.lambda;
  std::vector<int> obstacle_verts;
  for (int t : picked)
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.tris[t][k];
      if (mesh.flags[v] == kInterior) obstacle_verts.push_back(v);
    }
  cand.capacity = ev.capacity_of(obstacle_verts);
  cand.cell_count = static_cast<int>(picked.size());
  cand.provenance = "cells n=" + std::to_string(cand.cell_count);
  out.best = cand;
  out.trace.push_back(cand);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

double penalized_objective(const FieldVector& v, const Mesh& mesh,
                           const SparseSym& stiffness, const SparseSym& mass,
                           const PenaltyParams& params) {
  if (static_cast<int>(v.size()) != mesh.vertex_count())
    fail(ErrorKind::Argument, "field does not match this mesh");
  for (int i = 0; i < mesh.vertex_count(); ++i)
    if (mesh.flags[i] != kInterior && std::abs(v[i]) > 1e-12)
      fail(ErrorKind::Argument, "field must vanish on the outer boundary");
  const double domain_area = mesh.total_area();
  if (!(params.gamma > gamma_threshold(params.lambda_ref, domain_area,
                                       params.eps)))
    fail(ErrorKind::Argument, "penalty weight below the admissible threshold");

  const double energy = stiffness.quadratic_form(v);
  const double m2 = mass.quadratic_form(v);
  double support = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    bool alive = false;
    for (int k = 0; k < 3; ++k)
      if (std::abs(v[mesh.tris[t][k]]) > 1e-12) {
        alive = true;
        break;
      }
    if (alive) support += mesh.triangle_area(t);
  }
  const double norm_defect = std::max(0.0, 1.0 - m2);
  const double support_excess =
      std::max(0.0, support - domain_area + params.eps);
  return energy + params.lambda_ref * norm_defect + params.gamma * support_excess;
}

double gamma_threshold(double lambda, double domain_area, double eps) {
  if (!(domain_area > 0.0)) fail(ErrorKind::Argument, "area must be positive");
  if (!(eps < domain_area))
    fail(ErrorKind::Argument, "eps must be below the domain area");
  return 2.0 * domain_area * lambda * lambda /
         (2.0 * kPi * (domain_area - eps));
}

}  // namespace eigenobs
