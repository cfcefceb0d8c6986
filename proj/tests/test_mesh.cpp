#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "core/mesh.hpp"

using namespace eigenobs;

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_mesh_valid(const Mesh& m) {
  for (int t = 0; t < m.triangle_count(); ++t)
    CHECK(m.triangle_area(t) > 0.0);
  // each boundary edge belongs to exactly one triangle
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& e : m.bedges) {
    const auto key = std::make_pair(std::min(e[0], e[1]), std::max(e[0], e[1]));
    CHECK(count.at(key) == 1);
  }
  // boundary edges close into loops: every boundary vertex has degree 2
  std::map<int, int> deg;
  for (const auto& e : m.bedges) {
    ++deg[e[0]];
    ++deg[e[1]];
  }
  for (const auto& [v, d] : deg) CHECK(d == 2);
  // no duplicated vertices
  std::set<std::pair<double, double>> seen;
  for (const auto& v : m.verts) CHECK(seen.insert({v.x, v.y}).second);
}

}  // namespace

TEST_CASE("structured square mesh counts") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.25);
  CHECK(m.vertex_count() == 25);
  CHECK(m.triangle_count() == 32);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.max_edge_length() <= 1.5 * 0.25);
  CHECK(m.min_angle_deg() >= 20.0);
  check_mesh_valid(m);
}

TEST_CASE("disk mesh: boundary vertices on the circle, area defect O(h^2)") {
  const Domain disk = Domain::disk(1.0);
  for (double h : {0.1, 0.05}) {
    const Mesh m = triangulate(disk, h);
    for (int v = 0; v < m.vertex_count(); ++v)
      if (m.flags[v] == kOuterBoundary)
        CHECK(norm(m.verts[v]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.max_edge_length() <= 1.5 * h);
    CHECK(m.min_angle_deg() >= 20.0);
    CHECK(std::abs(m.total_area() - kPi) < 4.0 * h * h);
    check_mesh_valid(m);
  }
}

TEST_CASE("ellipse mesh respects the same contracts") {
  const Domain ell = Domain::ellipse(2.0, 1.0);
  const Mesh m = triangulate(ell, 0.1);
  for (int v = 0; v < m.vertex_count(); ++v)
    if (m.flags[v] == kOuterBoundary) {
      const Vec2 p = m.verts[v];
      CHECK(p.x * p.x / 4.0 + p.y * p.y ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  CHECK(m.min_angle_deg() >= 20.0);
  CHECK(std::abs(m.total_area() - 2.0 * kPi) < 4.0 * 0.1 * 0.1 * 2.0);
  check_mesh_valid(m);
}

TEST_CASE("refinement splits four ways and projects midpoints") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.25);
  const Mesh r = refine(m);
  CHECK(r.triangle_count() == 4 * m.triangle_count());
  check_mesh_valid(r);

  const Domain disk = Domain::disk(1.0);
  const Mesh dm = triangulate(disk, 0.1);
  const Mesh dr = refine(dm);
  for (int v = 0; v < dr.vertex_count(); ++v)
    if (dr.flags[v] == kOuterBoundary)
      CHECK(norm(dr.verts[v]) == doctest::Approx(1.0).epsilon(1e-10));
  // minimum angle survives boundary projection up to a small distortion
  CHECK(dr.min_angle_deg() >= dm.min_angle_deg() - 2.0);
  check_mesh_valid(dr);
}

TEST_CASE("meshes are deterministic") {
  const Domain disk = Domain::disk(1.0);
  const Mesh a = triangulate(disk, 0.07);
  const Mesh b = triangulate(disk, 0.07);
  CHECK(a.write_text() == b.write_text());
}

TEST_CASE("mesh text format round trips") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.5);
  const std::string text = m.write_text();
  CHECK(text.rfind("mesh v1\n", 0) == 0);
  const Mesh back = Mesh::read_text(text);
  CHECK(back.vertex_count() == m.vertex_count());
  CHECK(back.triangle_count() == m.triangle_count());
  CHECK(back.write_text() == text);
}

TEST_CASE("triangulate rejects bad sizes") {
  const Domain disk = Domain::disk(1.0);
  CHECK_THROWS_AS(triangulate(disk, 0.0), Error);
  CHECK_THROWS_AS(triangulate(disk, 2.0), Error);   // above the inradius
  CHECK_THROWS_AS(triangulate(disk, 5e-4), Error);  // vertex budget
}

TEST_CASE("node classification against a bump obstacle") {
  const Domain disk = Domain::disk(1.0);
  const Mesh m = triangulate(disk, 0.01);
  const StraighteningMap map(disk, 0.0);
  BumpObstacleSpec spec;
  spec.anchor_s = 0.0;
  spec.width = 0.1;
  spec.profile = BumpProfile::cos2();
  spec.target_volume = 0.002;
  const auto region = ObstacleRegion::bump(spec, map);
  const auto cls = classify_nodes(m, region);

  // the three sets partition the non-outer vertices
  int outer = 0;
  for (int v = 0; v < m.vertex_count(); ++v)
    if (m.flags[v] != kInterior) ++outer;
  CHECK(static_cast<int>(cls.obstacle.size() + cls.free_boundary.size() +
                         cls.interior.size()) ==
        m.vertex_count() - outer);
  CHECK(!cls.obstacle.empty());
  // density estimate: vertex count ~ eps / h^2 within a factor of 3
  const double expected = 0.002 / (0.01 * 0.01);
  CHECK(cls.obstacle.size() >= expected / 3.0);
  CHECK(cls.obstacle.size() <= expected * 3.0);
  // obstacle vertices really are members; free-boundary vertices are not
  for (int v : cls.obstacle) CHECK(region.contains(m.verts[v]));
  for (int v : cls.free_boundary) CHECK_FALSE(region.contains(m.verts[v]));
}

TEST_CASE("zero-volume obstacle captures no interior vertices") {
  const Domain disk = Domain::disk(1.0);
  const Mesh m = triangulate(disk, 0.05);
  const StraighteningMap map(disk, 0.0);
  BumpObstacleSpec spec;
  spec.anchor_s = 0.0;
  spec.width = 0.1;
  spec.profile = BumpProfile::cos2();
  spec.target_volume = 0.0;
  const auto region = ObstacleRegion::bump(spec, map);
  const auto cls = classify_nodes(m, region);
  CHECK(cls.obstacle.empty());
}

TEST_CASE("classification is monotone in the region") {
  const Domain disk = Domain::disk(1.0);
  const Mesh m = triangulate(disk, 0.02);
  const StraighteningMap map(disk, 0.0);
  BumpObstacleSpec small, big;
  small.anchor_s = big.anchor_s = 0.0;
  small.width = big.width = 0.15;
  small.profile = big.profile = BumpProfile::cos2();
  small.target_volume = 0.002;
  big.target_volume = 0.004;
  const auto cs = classify_nodes(m, ObstacleRegion::bump(small, map));
  const auto cb = classify_nodes(m, ObstacleRegion::bump(big, map));
  for (int v : cs.obstacle) CHECK(cb.is_obstacle[v]);
}

TEST_CASE("full-cover region classifies every interior vertex") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.25);
  std::vector<std::array<Vec2, 3>> all;
  for (int t = 0; t < m.triangle_count(); ++t) all.push_back(m.tri_coords(t));
  const auto region = ObstacleRegion::cells(std::move(all));
  const auto cls = classify_nodes(m, region);
  CHECK(cls.free_boundary.empty());
  CHECK(cls.interior.empty());
  int interior = 0;
  for (int v = 0; v < m.vertex_count(); ++v)
    if (m.flags[v] == kInterior) ++interior;
  CHECK(static_cast<int>(cls.obstacle.size()) == interior);
}
