#include "core/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "core/special.hpp"

namespace eigenobs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double quantile(const std::vector<double>& sorted, double q) {
  const int n = static_cast<int>(sorted.size());
  if (n == 1) return sorted[0];
  const double pos = q * (n - 1);
  const int lo = static_cast<int>(pos);
  const int hi = std::min(lo + 1, n - 1);
  const double w = pos - lo;
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

EigenPair smallest_eigenpair(const SparseSym& stiffness, const SparseSym& mass,
                             const std::vector<uint8_t>& constrained,
                             double tol, int max_iterations) {
  if (!(tol > 0.0) || !(tol < 1.0))
    fail(ErrorKind::Argument, "eigen tolerance must lie in (0, 1)");
  const int n = stiffness.size();
  if (mass.size() != n || static_cast<int>(constrained.size()) != n)
    fail(ErrorKind::Argument, "dimension mismatch in smallest_eigenpair");
  const SparseSym K = apply_dirichlet(stiffness, constrained);
  const SparseSym M = apply_dirichlet(mass, constrained);

  FieldVector v(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (!constrained[i]) v[i] = 1.0;
  {
    const double mn = std::sqrt(M.quadratic_form(v));
    if (!(mn > 0.0)) fail(ErrorKind::Argument, "free subspace is empty");
    for (double& x : v) x /= mn;
  }

  const double cg_tol = std::min(1e-10, 0.01 * tol);
  double lambda = K.quadratic_form(v);
  double residual = 1.0;
  FieldVector z(n, 0.0), w(n), x0(n, 0.0), r0(n), dz(n);
  bool have_prev = false;
  int it = 0;
  for (; it < max_iterations; ++it) {
    M.matvec(v, w);
    const double wnorm = std::sqrt(vdot(w, w));
    if (have_prev) {
      // warm start from the previous direction, scaled by the eigenvalue
      for (int i = 0; i < n; ++i) x0[i] = v[i] / lambda;
      K.matvec(x0, r0);
      for (int i = 0; i < n; ++i) r0[i] = w[i] - r0[i];
      const double rn = std::sqrt(vdot(r0, r0));
      double tol_eff = cg_tol;
      if (rn > 0.0 && wnorm > 0.0)
        tol_eff = std::clamp(cg_tol * wnorm / rn, 1e-14, 0.5);
      auto [delta, rep] = cg_solve(K, r0, tol_eff);
      (void)rep;
      for (int i = 0; i < n; ++i) z[i] = x0[i] + delta[i];
    } else {
      auto [sol, rep] = cg_solve(K, w, cg_tol);
      (void)rep;
      z = std::move(sol);
      have_prev = true;
    }
    const double mz = std::sqrt(M.quadratic_form(z));
    if (!(mz > 0.0)) fail(ErrorKind::Numeric, "iterate collapsed to zero");
    for (int i = 0; i < n; ++i) v[i] = z[i] / mz;
    const double lambda_new = K.quadratic_form(v);
    // residual in the constrained pencil
    FieldVector kv = K.matvec(v), mv = M.matvec(v);
    double rr = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = kv[i] - lambda_new * mv[i];
      rr += d * d;
    }
    const double mvn = std::sqrt(vdot(mv, mv));
    residual = std::sqrt(rr) / std::max(lambda_new * mvn, 1e-300);
    const bool done = std::abs(lambda_new - lambda) <= tol * lambda_new &&
                      residual <= 10.0 * tol;
    lambda = lambda_new;
    if (done) {
      ++it;
      break;
    }
  }
  if (it >= max_iterations)
    fail(ErrorKind::Numeric, "eigenvalue iteration did not converge");

  double mean = 0.0;
  for (int i = 0; i < n; ++i)
    if (!constrained[i]) mean += v[i];
  if (mean < 0.0)
    for (double& x : v) x = -x;

  EigenPair pair;
  pair.lambda = lambda;
  pair.field = std::move(v);
  pair.residual = residual;
  pair.iterations = it;
  return pair;
}

BoundaryGradientProfile boundary_gradient(const EigenPair& pair,
                                          const Mesh& mesh) {
  if (static_cast<int>(pair.field.size()) != mesh.vertex_count())
    fail(ErrorKind::Argument, "eigenpair does not match this mesh");
  const auto vcells = mesh.vertex_cells();

  // fallback outward normals from the boundary edge loop
  std::vector<Vec2> edge_normal(mesh.vertex_count(), Vec2{0.0, 0.0});
  for (const auto& e : mesh.bedges) {
    const Vec2 d = mesh.verts[e[1]] - mesh.verts[e[0]];
    const Vec2 nrm{d.y, -d.x};  // outward for counterclockwise loops
    edge_normal[e[0]] = edge_normal[e[0]] + nrm;
    edge_normal[e[1]] = edge_normal[e[1]] + nrm;
  }

  BoundaryGradientProfile prof;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.flags[v] == kInterior) continue;
    Vec2 grad{0.0, 0.0};
    double wsum = 0.0;
    for (int t : vcells[v]) {
      const double a = mesh.triangle_area(t);
      grad = grad + a * p1_gradient(mesh, pair.field, t);
      wsum += a;
    }
    if (wsum > 0.0) grad = (1.0 / wsum) * grad;
    Vec2 nrm;
    double s;
    if (mesh.domain && mesh.bparam[v] >= 0.0) {
      s = mesh.bparam[v];
      nrm = mesh.domain->boundary_point(s).normal;
    } else {
      const double nn = norm(edge_normal[v]);
      nrm = nn > 0.0 ? (1.0 / nn) * edge_normal[v] : Vec2{1.0, 0.0};
      s = static_cast<double>(v);
    }
    prof.samples.push_back({s, std::max(0.0, -dot(grad, nrm)), mesh.verts[v]});
  }
  std::sort(prof.samples.begin(), prof.samples.end(),
            [](const auto& a, const auto& b) { return a.s < b.s; });
  prof.min_value = 0.0;
  if (!prof.samples.empty()) {
    prof.argmin_index = 0;
    prof.min_value = prof.samples[0].value;
    prof.max_value = prof.samples[0].value;
    for (int i = 1; i < static_cast<int>(prof.samples.size()); ++i) {
      if (prof.samples[i].value < prof.min_value) {
        prof.min_value = prof.samples[i].value;
        prof.argmin_index = i;
      }
      prof.max_value = std::max(prof.max_value, prof.samples[i].value);
    }
  }
  return prof;
}

FreeBoundaryGradient free_boundary_gradient(const EigenPair& pair,
                                            const Mesh& mesh,
                                            const NodeClassification& cls) {
  if (cls.obstacle.empty())
    fail(ErrorKind::Argument, "free-boundary gradient needs an obstacle");
  if (cls.free_boundary.empty())
    fail(ErrorKind::Argument, "free-boundary vertex set is empty");
  const auto vcells = mesh.vertex_cells();
  double fmax = 0.0;
  for (double x : pair.field) fmax = std::max(fmax, std::abs(x));
  const double positive = 1e-14 * fmax;

  std::vector<double> vals;
  vals.reserve(cls.free_boundary.size());
  for (int v : cls.free_boundary) {
    Vec2 grad{0.0, 0.0};
    double wsum = 0.0;
    for (int t : vcells[v]) {
      bool alive = false;
      for (int k = 0; k < 3; ++k)
        if (pair.field[mesh.tris[t][k]] > positive) {
          alive = true;
          break;
        }
      if (!alive) continue;
      const double a = mesh.triangle_area(t);
      grad = grad + a * p1_gradient(mesh, pair.field, t);
      wsum += a;
    }
    if (wsum > 0.0) vals.push_back(norm((1.0 / wsum) * grad));
  }
  if (vals.empty())
    fail(ErrorKind::Argument, "no live cells around the free boundary");
  std::sort(vals.begin(), vals.end());

  FreeBoundaryGradient fb;
  fb.samples = static_cast<int>(vals.size());
  fb.median = quantile(vals, 0.5);
  fb.min = vals.front();
  fb.max = vals.back();
  fb.iqr = quantile(vals, 0.75) - quantile(vals, 0.25);
  fb.lambda_estimate = fb.median * fb.median;
  return fb;
}

DiskReference disk_reference(double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::Argument, "radius must be positive");
  DiskReference ref;
  const double j01 = bessel_j0_first_zero();
  ref.lambda0 = (j01 / radius) * (j01 / radius);
  const double norm_c =
      std::sqrt(kPi) * radius * std::abs(bessel_j1(j01));
  ref.phi0 = [radius, j01, norm_c](Vec2 p) {
    const double r = norm(p);
    if (r >= radius) return 0.0;
    return bessel_j0(j01 * r / radius) / norm_c;
  };
  ref.boundary_gradient = j01 / (std::sqrt(kPi) * radius * radius);
  return ref;
}

RectangleReference rectangle_reference(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    fail(ErrorKind::Argument, "rectangle sides must be positive");
  RectangleReference ref;
  ref.lambda0 = kPi * kPi * (1.0 / (a * a) + 1.0 / (b * b));
  const double amp = 2.0 / std::sqrt(a * b);
  ref.phi0 = [a, b, amp](Vec2 p) {
    if (p.x <= 0.0 || p.x >= a || p.y <= 0.0 || p.y >= b) return 0.0;
    return amp * std::sin(kPi * p.x / a) * std::sin(kPi * p.y / b);
  };
  return ref;
}

}  // namespace eigenobs
