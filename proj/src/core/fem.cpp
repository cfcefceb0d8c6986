#include "core/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eigenobs {

SparseSym SparseSym::from_triplets(int n, const std::vector<int>& rows,
                                   const std::vector<int>& cols,
                                   const std::vector<double>& vals) {
  if (rows.size() != cols.size() || rows.size() != vals.size())
    fail(ErrorKind::Argument, "triplet arrays differ in length");
  SparseSym a;
  a.n_ = n;
  std::vector<int> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (rows[x] != rows[y]) return rows[x] < rows[y];
    return cols[x] < cols[y];
  });
  a.ptr_.assign(n + 1, 0);
  int last_r = -1, last_c = -1;
  for (int k : order) {
    const int r = rows[k], c = cols[k];
    if (r < 0 || r >= n || c < 0 || c >= n)
      fail(ErrorKind::Argument, "triplet index out of range");
    if (r == last_r && c == last_c) {
      a.val_.back() += vals[k];
    } else {
      a.col_.push_back(c);
      a.val_.push_back(vals[k]);
      ++a.ptr_[r + 1];
      last_r = r;
      last_c = c;
    }
  }
  for (int r = 0; r < n; ++r) a.ptr_[r + 1] += a.ptr_[r];
  return a;
}

void SparseSym::matvec(const FieldVector& x, FieldVector& y) const {
  if (static_cast<int>(x.size()) != n_)
    fail(ErrorKind::Argument, "dimension mismatch in matvec");
  y.assign(n_, 0.0);
  for (int r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (int k = ptr_[r]; k < ptr_[r + 1]; ++k) acc += val_[k] * x[col_[k]];
    y[r] = acc;
  }
}

FieldVector SparseSym::matvec(const FieldVector& x) const {
  FieldVector y;
  matvec(x, y);
  return y;
}

FieldVector SparseSym::diagonal() const {
  FieldVector d(n_, 0.0);
  for (int r = 0; r < n_; ++r)
    for (int k = ptr_[r]; k < ptr_[r + 1]; ++k)
      if (col_[k] == r) d[r] = val_[k];
  return d;
}

double SparseSym::quadratic_form(const FieldVector& u) const {
  return vdot(u, matvec(u));
}

double SparseSym::max_asymmetry() const {
  double worst = 0.0;
  for (int r = 0; r < n_; ++r) {
    for (int k = ptr_[r]; k < ptr_[r + 1]; ++k) {
      const int c = col_[k];
      if (c < r) continue;
      double sym = 0.0;
      for (int k2 = ptr_[c]; k2 < ptr_[c + 1]; ++k2)
        if (col_[k2] == r) {
          sym = val_[k2];
          break;
        }
      worst = std::max(worst, std::abs(val_[k] - sym));
    }
  }
  return worst;
}

namespace {

std::array<Vec2, 3> edge_vectors(const std::array<Vec2, 3>& c) {
  // b_i = y_j - y_k, c_i = x_k - x_j for cyclic (i, j, k)
  return {Vec2{c[1].y - c[2].y, c[2].x - c[1].x},
          Vec2{c[2].y - c[0].y, c[0].x - c[2].x},
          Vec2{c[0].y - c[1].y, c[1].x - c[0].x}};
}

}  // namespace

SparseSym assemble_stiffness(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  std::vector<int> rows, cols;
  std::vector<double> vals;
  rows.reserve(9 * mesh.tris.size());
  cols.reserve(9 * mesh.tris.size());
  vals.reserve(9 * mesh.tris.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto c = mesh.tri_coords(t);
    const double area = 0.5 * cross(c[1] - c[0], c[2] - c[0]);
    if (!(area > 1e-300))
      fail(ErrorKind::Numeric, "degenerate triangle in stiffness assembly");
    const auto g = edge_vectors(c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        rows.push_back(mesh.tris[t][i]);
        cols.push_back(mesh.tris[t][j]);
        vals.push_back(dot(g[i], g[j]) / (4.0 * area));
      }
  }
  return SparseSym::from_triplets(nv, rows, cols, vals);
}

SparseSym assemble_mass(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  std::vector<int> rows, cols;
  std::vector<double> vals;
  rows.reserve(9 * mesh.tris.size());
  cols.reserve(9 * mesh.tris.size());
  vals.reserve(9 * mesh.tris.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double area = mesh.triangle_area(t);
    if (!(area > 1e-300))
      fail(ErrorKind::Numeric, "degenerate triangle in mass assembly");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        rows.push_back(mesh.tris[t][i]);
        cols.push_back(mesh.tris[t][j]);
        vals.push_back(area / 12.0 * (i == j ? 2.0 : 1.0));
      }
  }
  return SparseSym::from_triplets(nv, rows, cols, vals);
}

SparseSym apply_dirichlet(const SparseSym& op,
                          const std::vector<uint8_t>& constrained) {
  const int n = op.size();
  if (static_cast<int>(constrained.size()) != n)
    fail(ErrorKind::Argument, "constraint mask size mismatch");
  int nfree = 0;
  for (int v = 0; v < n; ++v)
    if (!constrained[v]) ++nfree;
  if (nfree == 0) fail(ErrorKind::Argument, "all vertices constrained");

  std::vector<int> rows, cols;
  std::vector<double> vals;
  rows.reserve(op.val().size());
  cols.reserve(op.val().size());
  vals.reserve(op.val().size());
  for (int r = 0; r < n; ++r) {
    if (constrained[r]) {
      rows.push_back(r);
      cols.push_back(r);
      vals.push_back(1.0);
      continue;
    }
    for (int k = op.ptr()[r]; k < op.ptr()[r + 1]; ++k) {
      const int c = op.col()[k];
      if (constrained[c]) continue;
      rows.push_back(r);
      cols.push_back(c);
      vals.push_back(op.val()[k]);
    }
  }
  return SparseSym::from_triplets(n, rows, cols, vals);
}

std::pair<FieldVector, LinearSolveReport> cg_solve(const SparseSym& op,
                                                   const FieldVector& rhs,
                                                   double tol,
                                                   int max_iterations) {
  const int n = op.size();
  if (static_cast<int>(rhs.size()) != n)
    fail(ErrorKind::Argument, "dimension mismatch in cg_solve");
  if (!(tol > 0.0) || !(tol < 1.0))
    fail(ErrorKind::Argument, "cg tolerance must lie in (0, 1)");
  if (max_iterations <= 0) max_iterations = 10 * n;

  LinearSolveReport rep;
  FieldVector x(n, 0.0);
  const double bnorm = std::sqrt(vdot(rhs, rhs));
  if (bnorm == 0.0) {
    rep.converged = true;
    return {x, rep};
  }
  FieldVector diag = op.diagonal();
  for (double& d : diag) {
    if (!(std::abs(d) > 0.0))
      fail(ErrorKind::Numeric, "zero diagonal in Jacobi preconditioner");
    d = 1.0 / d;
  }
  FieldVector r = rhs;
  FieldVector z(n), p(n), q(n);
  for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
  p = z;
  double rz = vdot(r, z);
  double rnorm = bnorm;
  int it = 0;
  for (; it < max_iterations; ++it) {
    rnorm = std::sqrt(vdot(r, r));
    if (!std::isfinite(rnorm))
      fail(ErrorKind::Numeric, "non-finite residual in cg_solve");
    if (rnorm <= tol * bnorm) break;
    op.matvec(p, q);
    const double pq = vdot(p, q);
    if (!(pq > 0.0))
      fail(ErrorKind::Numeric, "operator not positive definite in cg_solve");
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    const double rz_new = vdot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.iterations = it;
  rep.relative_residual = rnorm / bnorm;
  rep.converged = rep.relative_residual <= tol;
  return {x, rep};
}

double h1_seminorm_sq(const FieldVector& u, const SparseSym& stiffness) {
  if (static_cast<int>(u.size()) != stiffness.size())
    fail(ErrorKind::Argument, "dimension mismatch in h1_seminorm_sq");
  return stiffness.quadratic_form(u);
}

double l2_norm_sq(const FieldVector& u, const SparseSym& mass) {
  if (static_cast<int>(u.size()) != mass.size())
    fail(ErrorKind::Argument, "dimension mismatch in l2_norm_sq");
  return mass.quadratic_form(u);
}

double vdot(const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) fail(ErrorKind::Argument, "dimension mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vec2 p1_gradient(const Mesh& mesh, const FieldVector& u, int tri) {
  const auto c = mesh.tri_coords(tri);
  const double area = 0.5 * cross(c[1] - c[0], c[2] - c[0]);
  const auto g = edge_vectors(c);
  Vec2 grad{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    const double ui = u[mesh.tris[tri][i]];
    grad = grad + (ui / (2.0 * area)) * g[i];
  }
  return grad;
}

}  // namespace eigenobs
