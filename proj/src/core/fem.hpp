#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/mesh.hpp"

namespace eigenobs {

using FieldVector = std::vector<double>;

// Symmetric sparse operator, CSR with the full pattern stored.
class SparseSym {
 public:
  SparseSym() = default;
  static SparseSym from_triplets(int n,
                                 const std::vector<int>& rows,
                                 const std::vector<int>& cols,
                                 const std::vector<double>& vals);

  int size() const { return n_; }
  void matvec(const FieldVector& x, FieldVector& y) const;
  FieldVector matvec(const FieldVector& x) const;
  FieldVector diagonal() const;
  double quadratic_form(const FieldVector& u) const;  // u^T A u
  double max_asymmetry() const;

  const std::vector<int>& ptr() const { return ptr_; }
  const std::vector<int>& col() const { return col_; }
  const std::vector<double>& val() const { return val_; }

 private:
  int n_ = 0;
  std::vector<int> ptr_, col_;
  std::vector<double> val_;
};

// Exact P1 integrals of grad u . grad v; constants lie in the kernel.
SparseSym assemble_stiffness(const Mesh& mesh);
// Consistent P1 mass matrix; u^T M u with u = 1 equals the mesh area.
SparseSym assemble_mass(const Mesh& mesh);

// Symmetric elimination: constrained rows and columns zeroed, unit diagonal.
SparseSym apply_dirichlet(const SparseSym& op,
                          const std::vector<uint8_t>& constrained);

struct LinearSolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients; relative residual measured
// against |rhs|. max_iterations <= 0 means 10 * dimension.
std::pair<FieldVector, LinearSolveReport> cg_solve(const SparseSym& op,
                                                   const FieldVector& rhs,
                                                   double tol,
                                                   int max_iterations = 0);

double h1_seminorm_sq(const FieldVector& u, const SparseSym& stiffness);
double l2_norm_sq(const FieldVector& u, const SparseSym& mass);
double vdot(const FieldVector& a, const FieldVector& b);

// P1 gradient of a vertex field on one triangle.
Vec2 p1_gradient(const Mesh& mesh, const FieldVector& u, int tri);

}  // namespace eigenobs
