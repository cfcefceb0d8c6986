#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace eigenobs {

enum VertexFlag : uint8_t { kInterior = 0, kOuterBoundary = 1 };

// Conforming triangulation of a domain. Immutable after construction;
// refinement returns a new mesh.
struct Mesh {
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;    // counterclockwise
  std::vector<std::array<int, 2>> bedges;  // outer boundary, oriented
  std::vector<uint8_t> flags;              // VertexFlag per vertex
  std::vector<double> bparam;              // arc parameter, -1 for interior
  double target_h = 0.0;
  std::shared_ptr<const Domain> domain;

  int vertex_count() const { return static_cast<int>(verts.size()); }
  int triangle_count() const { return static_cast<int>(tris.size()); }
  std::array<Vec2, 3> tri_coords(int t) const {
    return {verts[tris[t][0]], verts[tris[t][1]], verts[tris[t][2]]};
  }
  double triangle_area(int t) const;
  Vec2 centroid(int t) const;
  double total_area() const;
  double max_edge_length() const;
  double min_angle_deg() const;

  // cells incident to each vertex
  std::vector<std::vector<int>> vertex_cells() const;
  // vertex-to-vertex edges
  std::vector<std::vector<int>> vertex_neighbors() const;

  // "mesh v1" text format (debugging / golden tests)
  std::string write_text() const;
  static Mesh read_text(const std::string& text);
};

// Mapped structured triangulation. Max edge <= 1.5 h, boundary vertices on
// the domain boundary, deterministic for fixed inputs. Disk and ellipse use
// a hexagonal ring layout; the square a diagonal grid.
Mesh triangulate(const Domain& domain, double h);

// Uniform 4-way split; new boundary midpoints are projected onto the domain
// boundary.
Mesh refine(const Mesh& mesh);

struct NodeClassification {
  std::vector<int> obstacle;       // vertices inside the obstacle
  std::vector<int> free_boundary;  // non-obstacle vertices touching them
  std::vector<int> interior;       // the rest (outer boundary excluded)
  std::vector<uint8_t> is_obstacle;  // bitmap over all vertices
};

// Vertex classification against an obstacle region. Obstacle membership is
// decided by the region's membership test; free-boundary vertices are the
// non-obstacle vertices sharing an edge with an obstacle vertex.
NodeClassification classify_nodes(const Mesh& mesh,
                                  const ObstacleRegion& region);

// Dirichlet mask: outer boundary plus obstacle vertices.
std::vector<uint8_t> constrained_mask(const Mesh& mesh,
                                      const NodeClassification& cls);
std::vector<uint8_t> outer_mask(const Mesh& mesh);

}  // namespace eigenobs
