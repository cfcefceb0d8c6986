#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/fem.hpp"

using namespace eigenobs;

namespace {
constexpr double kPi = 3.14159265358979323846;

Mesh reference_triangle() {
  Mesh m;
  m.verts = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.tris = {{0, 1, 2}};
  m.bedges = {{0, 1}, {1, 2}, {2, 0}};
  m.flags = {kOuterBoundary, kOuterBoundary, kOuterBoundary};
  m.bparam = {-1.0, -1.0, -1.0};
  m.target_h = 1.0;
  return m;
}

// Fourier series for -lap u = 1 on the unit square, u = 0 on the boundary
double poisson_square(double x, double y) {
  double s = 0.0;
  for (int m = 1; m < 400; m += 2)
    for (int n = 1; n < 400; n += 2)
      s += 16.0 / (kPi * kPi * kPi * kPi * m * n * (m * m + n * n)) *
           std::sin(m * kPi * x) * std::sin(n * kPi * y);
  return s;
}

}  // namespace

TEST_CASE("element stiffness on the reference triangle") {
  const Mesh m = reference_triangle();
  const SparseSym K = assemble_stiffness(m);
  const double expected[3][3] = {
      {1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      FieldVector ei(3, 0.0), ej(3, 0.0);
      ei[i] = 1.0;
      ej[j] = 1.0;
      CHECK(vdot(ei, K.matvec(ej)) ==
            doctest::Approx(expected[i][j]).epsilon(1e-14));
    }
}

TEST_CASE("element mass on the reference triangle") {
  const Mesh m = reference_triangle();
  const SparseSym M = assemble_mass(m);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      FieldVector ei(3, 0.0), ej(3, 0.0);
      ei[i] = 1.0;
      ej[j] = 1.0;
      const double expected = (0.5 / 12.0) * (i == j ? 2.0 : 1.0);
      CHECK(vdot(ei, M.matvec(ej)) ==
            doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("constants in the stiffness kernel, areas in the mass form") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.1);
  const SparseSym K = assemble_stiffness(m);
  const SparseSym M = assemble_mass(m);
  const FieldVector ones(m.vertex_count(), 1.0);
  CHECK(std::abs(h1_seminorm_sq(ones, K)) < 1e-10);
  CHECK(l2_norm_sq(ones, M) == doctest::Approx(1.0).epsilon(1e-10));

  // u = x has unit Dirichlet energy on the unit square
  FieldVector ux(m.vertex_count());
  for (int v = 0; v < m.vertex_count(); ++v) ux[v] = m.verts[v].x;
  CHECK(h1_seminorm_sq(ux, K) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK(K.max_asymmetry() < 1e-12);
  CHECK(M.max_asymmetry() < 1e-12);
}

TEST_CASE("mass form reproduces the disk area up to the polygon defect") {
  const Domain disk = Domain::disk(1.0);
  const Mesh m = triangulate(disk, 0.05);
  const SparseSym M = assemble_mass(m);
  const FieldVector ones(m.vertex_count(), 1.0);
  CHECK(l2_norm_sq(ones, M) ==
        doctest::Approx(kPi).epsilon(4.0 * 0.05 * 0.05 / kPi));
}

TEST_CASE("dirichlet elimination") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.25);
  const SparseSym K = assemble_stiffness(m);

  // empty constraint set leaves the operator unchanged
  const std::vector<uint8_t> none(m.vertex_count(), 0);
  const SparseSym K0 = apply_dirichlet(K, none);
  FieldVector probe(m.vertex_count());
  for (int v = 0; v < m.vertex_count(); ++v) probe[v] = std::sin(v + 1.0);
  const FieldVector y0 = K.matvec(probe), y1 = K0.matvec(probe);
  for (int v = 0; v < m.vertex_count(); ++v)
    CHECK(y0[v] == doctest::Approx(y1[v]).epsilon(1e-15));

  const auto mask = outer_mask(m);
  const SparseSym Kd = apply_dirichlet(K, mask);
  CHECK(Kd.max_asymmetry() < 1e-12);
  for (int v = 0; v < m.vertex_count(); ++v)
    if (mask[v]) {
      FieldVector e(m.vertex_count(), 0.0);
      e[v] = 1.0;
      const FieldVector row = Kd.matvec(e);
      for (int w = 0; w < m.vertex_count(); ++w)
        CHECK(row[w] == doctest::Approx(w == v ? 1.0 : 0.0));
    }

  const std::vector<uint8_t> all(m.vertex_count(), 1);
  CHECK_THROWS_AS(apply_dirichlet(K, all), Error);
}

TEST_CASE("cg solves the trivial cases") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.25);
  const SparseSym K = assemble_stiffness(m);
  const SparseSym Kd = apply_dirichlet(K, outer_mask(m));

  const FieldVector zero(m.vertex_count(), 0.0);
  auto [x, rep] = cg_solve(Kd, zero, 1e-12);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  for (double v : x) CHECK(v == 0.0);

  CHECK_THROWS_AS(cg_solve(Kd, zero, 2.0), Error);
}

TEST_CASE("poisson problem on the unit square against the series") {
  const Domain sq = Domain::square(1.0);
  const Mesh m = triangulate(sq, 0.02);
  const SparseSym K = assemble_stiffness(m);
  const SparseSym M = assemble_mass(m);
  const auto mask = outer_mask(m);
  const SparseSym Kd = apply_dirichlet(K, mask);
  FieldVector ones(m.vertex_count(), 1.0);
  FieldVector rhs = M.matvec(ones);
  for (int v = 0; v < m.vertex_count(); ++v)
    if (mask[v]) rhs[v] = 0.0;
  auto [u, rep] = cg_solve(Kd, rhs, 1e-12);
  REQUIRE(rep.converged);
  CHECK(rep.relative_residual <= 1e-12);

  int center = -1;
  for (int v = 0; v < m.vertex_count(); ++v)
    if (dist(m.verts[v], {0.5, 0.5}) < 1e-12) center = v;
  REQUIRE(center >= 0);
  // frozen from the series oracle
  CHECK(u[center] == doctest::Approx(0.07367135320686473).epsilon(0.0272));
  CHECK(std::abs(u[center] - poisson_square(0.5, 0.5)) < 2e-3);
}
