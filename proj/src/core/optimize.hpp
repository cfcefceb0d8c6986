#pragma once

#include <string>
#include <vector>

#include "core/capacity.hpp"
#include "core/geometry.hpp"

namespace eigenobs {

struct ObstacleCandidate {
  ObstacleRegion region;
  double eigenvalue = 0.0;
  double capacity = 0.0;
  double anchor_s = -1.0;  // parametric candidates
  int cell_count = 0;      // free-form candidates
  std::string provenance;
};

struct OptimizationResult {
  ObstacleCandidate best;
  std::vector<ObstacleCandidate> trace;
  std::vector<std::string> skipped;  // anchors that failed volume matching
  double wall_seconds = 0.0;
};

// Shared context for repeated eigenvalue evaluations on one mesh: assembled
// operators and the obstacle-free eigenpair.
class ObstacleEvaluator {
 public:
  ObstacleEvaluator(const Mesh& mesh, double eigen_tol = 1e-9);

  const Mesh& mesh() const { return *mesh_; }
  const SparseSym& stiffness() const { return K_; }
  const SparseSym& mass() const { return M_; }
  const EigenPair& base() const { return base_; }
  double default_tol() const { return tol_; }

  // classify, constrain obstacle + outer boundary, solve, attach capacity
  ObstacleCandidate evaluate(const ObstacleRegion& region,
                             double tol = 0.0) const;
  // low-level variant for callers that maintain vertex sets directly
  EigenPair solve_constrained(const std::vector<uint8_t>& constrained,
                              double tol) const;
  double capacity_of(const std::vector<int>& obstacle_verts) const;

 private:
  const Mesh* mesh_;
  SparseSym K_, M_;
  std::vector<uint8_t> outer_;
  EigenPair base_;
  double tol_;
};

struct ParametricSearchParams {
  double width = 0.1;  // bump width r
  BumpProfile profile = BumpProfile::cos2();
  int anchor_grid = 16;
  double search_tol = 1e-7;  // eigen tolerance while scanning
  double final_tol = 1e-9;   // re-solve tolerance for the winner
  double bracket_frac = 1e-4;
};

// Grid scan over bump anchors followed by golden-section refinement of the
// best anchor; anchors whose volume matching fails are skipped and logged.
OptimizationResult parametric_search(const ObstacleEvaluator& ev,
                                     const Domain& domain, double eps,
                                     const ParametricSearchParams& params);

struct GreedyParams {
  int exchange_rounds = 20;
  int resolve_every = 10;  // eigen re-solve cadence during growth
  double search_tol = 1e-6;
  double final_tol = 1e-9;
};

// Greedy cell growth from the outer boundary: repeatedly add the candidate
// cell with the smallest local Dirichlet energy of the current eigenfield,
// then improve by single-cell swaps.
OptimizationResult greedy_freeform(const ObstacleEvaluator& ev, double eps,
                                   const GreedyParams& params);

struct PenaltyParams {
  double lambda_ref = 0.0;  // reference eigenvalue
  double gamma = 0.0;       // penalty weight; must exceed gamma_threshold
  double eps = 0.0;         // volume budget
};

// v^T K v + lambda [1 - v^T M v]^+ + gamma [area{v != 0} - |D| + eps]^+,
// with the support area measured over cells having any vertex value of
// magnitude above 1e-12 and |D| the mesh polygon area.
double penalized_objective(const FieldVector& v, const Mesh& mesh,
                           const SparseSym& stiffness, const SparseSym& mass,
                           const PenaltyParams& params);

// 2 |D| lambda^2 / (2 pi (|D| - eps)), the planar penalty threshold.
double gamma_threshold(double lambda, double domain_area, double eps);

}  // namespace eigenobs
