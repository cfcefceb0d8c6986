#pragma once

#include <functional>
#include <vector>

#include "core/fem.hpp"

namespace eigenobs {

struct EigenPair {
  double lambda = 0.0;
  FieldVector field;       // mass-normalized, zero at constrained vertices
  double residual = 0.0;   // |K u - lambda M u| / (lambda |M u|)
  int iterations = 0;
};

// Smallest eigenpair of the constrained pencil (K, M) by inverse power
// iteration with inner CG solves. Start vector: all ones on the free
// vertices. Stops when the eigenvalue increment drops below tol * lambda
// and the residual below 10 * tol; the sign is fixed so the mean is
// positive.
EigenPair smallest_eigenpair(const SparseSym& stiffness, const SparseSym& mass,
                             const std::vector<uint8_t>& constrained,
                             double tol, int max_iterations = 500);

struct BoundaryGradientSample {
  double s = 0.0;
  double value = 0.0;  // |dphi/dnu| estimate
  Vec2 position;
};

struct BoundaryGradientProfile {
  std::vector<BoundaryGradientSample> samples;  // sorted by arc parameter
  double min_value = 0.0;
  double max_value = 0.0;
  int argmin_index = -1;
};

// Normal-derivative profile along the outer boundary: at each boundary
// vertex the P1 gradient is area-averaged over the adjacent cells and
// projected on the outward normal.
BoundaryGradientProfile boundary_gradient(const EigenPair& pair,
                                          const Mesh& mesh);

struct FreeBoundaryGradient {
  double lambda_estimate = 0.0;  // median^2
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double iqr = 0.0;  // flatness diagnostic of the constant-gradient condition
  int samples = 0;
};

// |grad phi| sampled at the free-boundary vertices (gradient averaged over
// the adjacent cells that carry a positive value). The median-squared is
// the discrete estimate of the free-boundary constant.
FreeBoundaryGradient free_boundary_gradient(const EigenPair& pair,
                                            const Mesh& mesh,
                                            const NodeClassification& cls);

// Analytic references. The disk eigenfunction is the normalized Bessel
// mode; series truncation keeps the remainder below 1e-12.
struct DiskReference {
  double lambda0 = 0.0;
  double boundary_gradient = 0.0;  // constant |grad phi0| on the circle
  std::function<double(Vec2)> phi0;
};
DiskReference disk_reference(double radius);

struct RectangleReference {
  double lambda0 = 0.0;
  std::function<double(Vec2)> phi0;  // on [0,a] x [0,b]
};
RectangleReference rectangle_reference(double a, double b);

}  // namespace eigenobs
