#pragma once

#include "core/spectral.hpp"

namespace eigenobs {

struct CapacityResult {
  double capacity = 0.0;
  FieldVector potential;
  LinearSolveReport report;
};

// Capacitary potential: equals phi0 on the obstacle vertices, vanishes on
// the outer boundary, stiffness-harmonic in between (CG tolerance 1e-10).
FieldVector capacitary_potential(const Mesh& mesh,
                                 const NodeClassification& cls,
                                 const SparseSym& stiffness,
                                 const FieldVector& phi0,
                                 LinearSolveReport* report = nullptr);

// Relative capacity of the obstacle vertex set with respect to phi0:
// V^T K V with V the capacitary potential. This is the minimum Dirichlet
// energy among fields agreeing with phi0 on the obstacle and vanishing on
// the outer boundary.
CapacityResult relative_capacity(const Mesh& mesh,
                                 const NodeClassification& cls,
                                 const SparseSym& stiffness,
                                 const FieldVector& phi0);

// (lambda_E - lambda0) / cap; undefined for cap <= 0.
double stability_ratio(double lambda_e, double lambda0, double cap);

// (1/eps) * sum over covered cells of |grad phi0|^2 * cell area, where a
// cell is covered when all three vertices are constrained and at least one
// is an obstacle vertex. The computed capacity always dominates this bound.
double capacity_lower_bound(const Mesh& mesh, const NodeClassification& cls,
                            const FieldVector& phi0, double eps);

}  // namespace eigenobs
