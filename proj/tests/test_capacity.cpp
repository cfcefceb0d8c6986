#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "core/capacity.hpp"

using namespace eigenobs;

namespace {

struct Setup {
  Mesh mesh;
  SparseSym K, M;
  EigenPair base;
};

Setup make_setup(const Domain& dom, double h) {
  Setup s;
  s.mesh = triangulate(dom, h);
  s.K = assemble_stiffness(s.mesh);
  s.M = assemble_mass(s.mesh);
  s.base = smallest_eigenpair(s.K, s.M, outer_mask(s.mesh), 1e-10);
  return s;
}

NodeClassification cls_from_verts(const Mesh& mesh, std::vector<int> verts) {
  NodeClassification cls;
  cls.is_obstacle.assign(mesh.vertex_count(), 0);
  for (int v : verts) cls.is_obstacle[v] = 1;
  cls.obstacle = std::move(verts);
  return cls;
}

}  // namespace

TEST_CASE("empty obstacle has zero capacity and zero potential") {
  const Setup s = make_setup(Domain::disk(1.0), 0.1);
  NodeClassification empty;
  empty.is_obstacle.assign(s.mesh.vertex_count(), 0);
  const auto res = relative_capacity(s.mesh, empty, s.K, s.base.field);
  CHECK(res.capacity == 0.0);
  for (double v : res.potential) CHECK(v == 0.0);
}

TEST_CASE("fully constrained interior reproduces phi0") {
  const Setup s = make_setup(Domain::disk(1.0), 0.1);
  std::vector<int> all;
  for (int v = 0; v < s.mesh.vertex_count(); ++v)
    if (s.mesh.flags[v] == kInterior) all.push_back(v);
  const auto cls = cls_from_verts(s.mesh, all);
  const auto V = capacitary_potential(s.mesh, cls, s.K, s.base.field);
  for (int v = 0; v < s.mesh.vertex_count(); ++v)
    CHECK(V[v] == doctest::Approx(s.base.field[v]).epsilon(1e-12));
}

TEST_CASE("potential matches the boundary data and the maximum principle") {
  const Setup s = make_setup(Domain::disk(1.0), 0.05);
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> uv(0, s.mesh.vertex_count() - 1);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<int> verts;
    for (int k = 0; k < 15; ++k) {
      const int v = uv(rng);
      if (s.mesh.flags[v] == kInterior) verts.push_back(v);
    }
    if (verts.empty()) continue;
    const auto cls = cls_from_verts(s.mesh, verts);
    const auto V = capacitary_potential(s.mesh, cls, s.K, s.base.field);
    double data_max = 0.0;
    for (int v : cls.obstacle) {
      CHECK(V[v] == doctest::Approx(s.base.field[v]));
      data_max = std::max(data_max, s.base.field[v]);
    }
    for (int v = 0; v < s.mesh.vertex_count(); ++v) {
      if (s.mesh.flags[v] != kInterior) CHECK(V[v] == 0.0);
      CHECK(V[v] >= -1e-8);
      CHECK(V[v] <= data_max + 1e-8);
    }
  }
}

TEST_CASE("capacity is monotone under obstacle growth") {
  const Setup s = make_setup(Domain::disk(1.0), 0.05);
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> uv(0, s.mesh.vertex_count() - 1);
  for (int pair = 0; pair < 20; ++pair) {
    std::vector<int> small;
    for (int k = 0; k < 10; ++k) {
      const int v = uv(rng);
      if (s.mesh.flags[v] == kInterior) small.push_back(v);
    }
    std::vector<int> big = small;
    for (int k = 0; k < 10; ++k) {
      const int v = uv(rng);
      if (s.mesh.flags[v] == kInterior) big.push_back(v);
    }
    if (small.empty()) continue;
    const double cs =
        relative_capacity(s.mesh, cls_from_verts(s.mesh, small), s.K,
                          s.base.field)
            .capacity;
    const double cb =
        relative_capacity(s.mesh, cls_from_verts(s.mesh, big), s.K,
                          s.base.field)
            .capacity;
    CHECK(cs <= cb + 1e-12);
    // phi0 itself is admissible: cap <= |phi0|_H1^2 = lambda0
    CHECK(cb <= s.base.lambda * (1.0 + 1e-9));
  }
}

TEST_CASE("variational optimality of the capacitary potential") {
  const Setup s = make_setup(Domain::disk(1.0), 0.1);
  std::vector<int> verts;
  for (int v = 0; v < s.mesh.vertex_count(); ++v)
    if (s.mesh.flags[v] == kInterior && norm(s.mesh.verts[v]) > 0.8)
      verts.push_back(v);
  REQUIRE(!verts.empty());
  const auto cls = cls_from_verts(s.mesh, verts);
  const auto res = relative_capacity(s.mesh, cls, s.K, s.base.field);
  const auto mask = constrained_mask(s.mesh, cls);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    FieldVector w(s.mesh.vertex_count(), 0.0);
    for (int v = 0; v < s.mesh.vertex_count(); ++v)
      if (!mask[v]) w[v] = u(rng);
    for (double t : {1e-3, -1e-3}) {
      FieldVector cand = res.potential;
      for (int v = 0; v < s.mesh.vertex_count(); ++v) cand[v] += t * w[v];
      CHECK(s.K.quadratic_form(cand) >= res.capacity - 1e-12);
    }
  }
}

TEST_CASE("stability ratio guards its domain") {
  CHECK_THROWS_AS(stability_ratio(6.0, 5.8, 0.0), Error);
  CHECK(stability_ratio(6.0, 5.8, 0.1) == doctest::Approx(2.0));
  CHECK(stability_ratio(5.8, 5.8, 0.1) == doctest::Approx(0.0));
}

TEST_CASE("capacity dominates the energy captured by covered cells") {
  const Setup s = make_setup(Domain::disk(1.0), 0.02);
  const StraighteningMap map(*s.mesh.domain, 0.0);
  BumpObstacleSpec spec;
  spec.anchor_s = 0.0;
  spec.width = 0.2;
  spec.profile = BumpProfile::cos2();
  spec.target_volume = 0.004;
  const auto region = ObstacleRegion::bump(spec, map);
  const auto cls = classify_nodes(s.mesh, region);
  REQUIRE(!cls.obstacle.empty());
  const auto res = relative_capacity(s.mesh, cls, s.K, s.base.field);
  const double bound =
      capacity_lower_bound(s.mesh, cls, s.base.field, spec.target_volume);
  CHECK(res.capacity / spec.target_volume >= bound - 1e-12);
  CHECK(bound > 0.0);
}

TEST_CASE("lower bound vanishes where the ground state is flat") {
  const Setup s = make_setup(Domain::disk(1.0), 0.05);
  // a small patch at the center, where the gradient of phi0 vanishes
  std::vector<int> verts;
  for (int v = 0; v < s.mesh.vertex_count(); ++v)
    if (s.mesh.flags[v] == kInterior && norm(s.mesh.verts[v]) < 0.1)
      verts.push_back(v);
  REQUIRE(!verts.empty());
  const auto cls = cls_from_verts(s.mesh, verts);
  const double bound = capacity_lower_bound(s.mesh, cls, s.base.field, 0.03);
  CHECK(bound < 0.05 * s.base.lambda);  // tiny against the natural scale
}
