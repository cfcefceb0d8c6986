#include "core/capacity.hpp"

#include <cmath>

namespace eigenobs {

FieldVector capacitary_potential(const Mesh& mesh,
                                 const NodeClassification& cls,
                                 const SparseSym& stiffness,
                                 const FieldVector& phi0,
                                 LinearSolveReport* report) {
  const int n = mesh.vertex_count();
  if (static_cast<int>(phi0.size()) != n || stiffness.size() != n)
    fail(ErrorKind::Argument, "phi0 does not match this mesh");
  FieldVector bc(n, 0.0);
  for (int v : cls.obstacle) bc[v] = phi0[v];
  if (cls.obstacle.empty()) {
    if (report) *report = LinearSolveReport{0, 0.0, true};
    return bc;  // only the zero boundary data remains
  }
  const auto mask = constrained_mask(mesh, cls);
  FieldVector rhs = stiffness.matvec(bc);
  for (int v = 0; v < n; ++v) rhs[v] = mask[v] ? 0.0 : -rhs[v];
  const SparseSym reduced = apply_dirichlet(stiffness, mask);
  auto [w, rep] = cg_solve(reduced, rhs, 1e-10);
  if (!rep.converged)
    fail(ErrorKind::Numeric, "capacitary potential solve did not converge");
  if (report) *report = rep;
  for (int v = 0; v < n; ++v) w[v] += bc[v];
  return w;
}

CapacityResult relative_capacity(const Mesh& mesh,
                                 const NodeClassification& cls,
                                 const SparseSym& stiffness,
                                 const FieldVector& phi0) {
  CapacityResult res;
  res.potential = capacitary_potential(mesh, cls, stiffness, phi0, &res.report);
  res.capacity = stiffness.quadratic_form(res.potential);
  return res;
}

double stability_ratio(double lambda_e, double lambda0, double cap) {
  if (!(cap > 0.0))
    fail(ErrorKind::Argument, "stability ratio undefined for zero capacity");
  return (lambda_e - lambda0) / cap;
}

double capacity_lower_bound(const Mesh& mesh, const NodeClassification& cls,
                            const FieldVector& phi0, double eps) {
  if (cls.obstacle.empty())
    fail(ErrorKind::Argument, "lower bound needs a non-empty obstacle");
  if (!(eps > 0.0)) fail(ErrorKind::Argument, "eps must be positive");
  const auto mask = constrained_mask(mesh, cls);
  double acc = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    bool covered = true, touches = false;
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.tris[t][k];
      if (!mask[v]) covered = false;
      if (cls.is_obstacle[v]) touches = true;
    }
    if (!covered || !touches) continue;
    const Vec2 g = p1_gradient(mesh, phi0, t);
    acc += dot(g, g) * mesh.triangle_area(t);
  }
  return acc / eps;
}

}  // namespace eigenobs
