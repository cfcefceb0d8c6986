#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace eigenobs {

enum class DomainKind { Disk, Ellipse, Square, BoundaryGraph };

struct BoundaryPoint {
  double s = 0.0;  // arc-length parameter
  Vec2 position;
  Vec2 normal;   // unit outward
  Vec2 tangent;  // unit, along increasing s
};

// A smooth planar box D. Disks and ellipses are centered at the origin, the
// square has its corner at the origin. A boundary-graph domain is the region
// above y = g(x) for x in [-width, width], capped by a rectangle of the given
// height; it exists to exercise the boundary-straightening machinery on
// prescribed graphs and is not meshable.
class Domain {
 public:
  static Domain disk(double radius);
  static Domain ellipse(double a, double b);
  static Domain square(double side);
  static Domain boundary_graph(std::function<double(double)> g,
                               std::function<double(double)> dg, double width,
                               double height);

  DomainKind kind() const { return kind_; }
  double area() const { return area_; }
  double boundary_length() const { return boundary_length_; }
  double inradius() const;
  // eps0 = |D| - pi * inradius^2; obstacle volumes above it admit a ball
  // complement, below it the small-volume regime applies.
  double faber_krahn_threshold() const;

  BoundaryPoint boundary_point(double s) const;
  Vec2 project_to_boundary(Vec2 p) const;
  double boundary_param(Vec2 p) const;  // arc parameter of a near-boundary point

  // Level function: > 0 inside, = 0 on the boundary near smooth points.
  // Not a distance. Used by the straightening construction.
  double level(Vec2 p) const;
  Vec2 level_gradient(Vec2 p) const;

  double param_radius() const { return radius_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double param_side() const { return side_; }
  double graph_width() const { return gwidth_; }
  double graph_height() const { return gheight_; }
  double graph_anchor_param() const;  // s of the recentered anchor (0, g(0))

 private:
  Domain() = default;
  void build_ellipse_table();
  double ellipse_speed(double t) const;
  double ellipse_arc_from_angle(double t) const;
  double ellipse_angle_from_arc(double s) const;

  DomainKind kind_ = DomainKind::Disk;
  double area_ = 0.0;
  double boundary_length_ = 0.0;
  double radius_ = 0.0;
  double a_ = 0.0, b_ = 0.0;
  double side_ = 0.0;
  std::function<double(double)> g_, dg_;
  double gwidth_ = 0.0, gheight_ = 0.0;
  // cumulative arc length over uniform angle samples (ellipse),
  // or over uniform x samples of the graph segment (boundary-graph)
  std::shared_ptr<const std::vector<double>> arc_table_;
};

// Local diffeomorphism F flattening the boundary near an anchor point:
// in the anchor frame (tangent e1, inward normal e2) the boundary is the
// graph y2 = g(y1) with g(0) = 0, g'(0) = 0, and
//   F(y) = (y1 - y2 g'(y1), y2 + g(y1)),        DF(0) = Id.
// The validity radius is halved from r0 until round trips G(F(y)) land
// within 1e-8 on a 50 x 50 sample grid of the upper half-ball.
class StraighteningMap {
 public:
  StraighteningMap(const Domain& domain, double s0, double r0 = 0.0);

  const BoundaryPoint& anchor() const { return anchor_; }
  double validity_radius() const { return r1_; }
  double initial_radius() const { return r0_; }

  double graph(double t) const;
  double graph_d1(double t) const;
  double graph_d2(double t) const;

  Vec2 forward(Vec2 y) const;  // F, in world coordinates
  std::optional<Vec2> inverse(Vec2 x) const;
  double jacobian_det(Vec2 y) const;  // det DF = (1 - y2 g''(y1)) + g'(y1)^2

  // sampled sups of |det DF| over the half-ball and |det DG| over its image
  double max_det_forward() const { return max_det_f_; }
  double max_det_inverse() const { return max_det_g_; }

  Vec2 to_local(Vec2 x) const;   // frame coordinates relative to the anchor
  Vec2 to_world(Vec2 y) const;

 private:
  bool validate(double r);
  Domain domain_;
  BoundaryPoint anchor_;
  Vec2 e1_, e2_;
  double r0_ = 0.0, r1_ = 0.0;
  double max_det_f_ = 1.0, max_det_g_ = 1.0;
};

// Reference bump profile h: [-1/2, 1/2] -> [0, 1], extended by zero, with
// closed-form volume V = int h.
struct BumpProfile {
  std::string name;
  std::function<double(double)> h;
  double volume = 0.0;

  static BumpProfile cos2();   // cos^2(pi u), V = 1/2
  static BumpProfile poly4();  // (1 - 4u^2)^2, V = 8/15
  static BumpProfile by_name(const std::string& name);
};

struct BumpObstacleSpec {
  double anchor_s = 0.0;      // s0 on the boundary
  double width = 0.0;         // r
  BumpProfile profile;        // h
  double target_volume = 0.0; // eps

  // admissible eta range is [0, 2*eta_hat); volume matching stays in [0, eta_hat]
  double eta_hat() const;
  double height(double eta, double y1) const;  // (eta / (r V)) h(y1 / r)
};

// R_{r,eta} in straightened coordinates: subgraph of the scaled profile,
// exact area eta.
struct StraightRegion {
  double width = 0.0;  // r
  double eta = 0.0;
  std::function<double(double)> height;  // of y1
  bool contains(Vec2 y) const;
};

StraightRegion bump_region(const BumpObstacleSpec& spec, double eta);

// Area of F(R_{r,eta}) by midpoint quadrature in straightened coordinates
// (200 columns; the Jacobian is linear in y2, so columns integrate exactly).
double mapped_region_area(const BumpObstacleSpec& spec,
                          const StraighteningMap& map, double eta,
                          int columns = 200);

// The unique eta with |F(R_{r,eta})| = eps (relative tolerance 1e-6),
// found by bisection; throws ErrorKind::Range if eps exceeds the volume
// reachable at this width.
double match_volume(const BumpObstacleSpec& spec, const StraighteningMap& map);

// A compact obstacle of prescribed volume: either the parametric boundary
// competitor H_{r,eps} = F(R_{r,eta_eps}) or an explicit union of mesh cells.
class ObstacleRegion {
 public:
  ObstacleRegion() = default;  // empty region (no cells, zero volume)
  static ObstacleRegion bump(const BumpObstacleSpec& spec,
                             const StraighteningMap& map);
  static ObstacleRegion cells(std::vector<std::array<Vec2, 3>> triangles);

  bool parametric() const { return parametric_; }
  bool contains(Vec2 x) const;
  double volume() const { return volume_; }
  // independent membership-grid area check (midpoints of an n x n grid
  // over the bounding box)
  double quadrature_volume(int n = 1024) const;
  std::vector<Vec2> boundary_samples(int n = 512) const;
  // quadrature points with area weights, for concentration metrics
  std::vector<std::pair<Vec2, double>> mass_points() const;
  std::string to_json() const;

  double anchor_param() const;
  double width() const;
  double eta() const;
  const BumpObstacleSpec& spec() const;
  const StraighteningMap& map() const;
  const std::vector<std::array<Vec2, 3>>& cell_triangles() const { return tris_; }

 private:
  bool parametric_ = false;
  double volume_ = 0.0;
  // parametric payload
  std::shared_ptr<const StraighteningMap> map_;
  std::shared_ptr<const BumpObstacleSpec> spec_;
  double eta_ = 0.0;
  Vec2 bound_center_;
  double bound_radius_ = 0.0;
  // free-form payload
  std::vector<std::array<Vec2, 3>> tris_;
};

using PointSet = std::vector<Vec2>;

// sup_{a in A} dist(a, B), exact over the finite samples
double directed_hausdorff(const PointSet& a, const PointSet& b);
// max of the two directed distances
double hausdorff_distance(const PointSet& a, const PointSet& b);

}  // namespace eigenobs
