#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "core/capacity.hpp"
#include "core/special.hpp"
#include "core/spectral.hpp"

using namespace eigenobs;

namespace {
constexpr double kPi = 3.14159265358979323846;

EigenPair solve_domain(const Domain& dom, double h, double tol = 1e-10,
                       Mesh* keep = nullptr) {
  Mesh mesh = triangulate(dom, h);
  const SparseSym K = assemble_stiffness(mesh);
  const SparseSym M = assemble_mass(mesh);
  EigenPair pair = smallest_eigenpair(K, M, outer_mask(mesh), tol);
  if (keep) *keep = std::move(mesh);
  return pair;
}

}  // namespace

TEST_CASE("analytic references") {
  const auto disk = disk_reference(1.0);
  CHECK(disk.lambda0 == doctest::Approx(5.783185962946783).epsilon(1e-12));
  CHECK(disk.boundary_gradient ==
        doctest::Approx(1.3567775299013787).epsilon(1e-12));
  // the reference eigenfunction is L2-normalized: check by quadrature
  double mass = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) / n;
    const double v = disk.phi0({r, 0.0});
    mass += v * v * 2.0 * kPi * r / n;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

  const auto rect = rectangle_reference(2.0, 1.0);
  CHECK(rect.lambda0 == doctest::Approx(12.337005501361698).epsilon(1e-12));
  CHECK(rectangle_reference(1.0, 1.0).lambda0 ==
        doctest::Approx(19.739208802178716).epsilon(1e-12));
  // scaling: lambda over a radius-2 disk is a quarter of the unit value
  CHECK(disk_reference(2.0).lambda0 ==
        doctest::Approx(disk.lambda0 / 4.0).epsilon(1e-12));
}

TEST_CASE("smallest eigenpair on the unit disk at h = 0.02") {
  Mesh mesh;
  const EigenPair pair = solve_domain(Domain::disk(1.0), 0.02, 1e-10, &mesh);
  const auto ref = disk_reference(1.0);
  CHECK(std::abs(pair.lambda - ref.lambda0) <= 0.005 * ref.lambda0);
  // mass normalization
  const SparseSym M = assemble_mass(mesh);
  CHECK(l2_norm_sq(pair.field, M) == doctest::Approx(1.0).epsilon(1e-10));
  // discrete ground state is nonnegative after sign fixing
  double lowest = 0.0;
  for (double v : pair.field) lowest = std::min(lowest, v);
  CHECK(lowest >= -1e-10);
  // Rayleigh identity against the analytic eigenvalue
  const SparseSym K = assemble_stiffness(mesh);
  CHECK(h1_seminorm_sq(pair.field, K) ==
        doctest::Approx(ref.lambda0 * l2_norm_sq(pair.field, M))
            .epsilon(0.005));
}

TEST_CASE("smallest eigenpair on the unit square at h = 0.02") {
  const EigenPair pair = solve_domain(Domain::square(1.0), 0.02);
  const double exact = 19.739208802178716;
  CHECK(std::abs(pair.lambda - exact) <= 0.005 * exact);
}

TEST_CASE("eigenvalue error contracts at the expected order on the square") {
  const double exact = 19.739208802178716;
  const Domain sq = Domain::square(1.0);
  const Mesh m1 = triangulate(sq, 0.1);
  const Mesh m2 = refine(m1);
  auto lam = [](const Mesh& m) {
    const SparseSym K = assemble_stiffness(m);
    const SparseSym M = assemble_mass(m);
    return smallest_eigenpair(K, M, outer_mask(m), 1e-11).lambda;
  };
  const double e1 = lam(m1) - exact;
  const double e2 = lam(m2) - exact;
  CHECK(e1 > 0.0);  // conforming elements approach from above
  CHECK(e2 > 0.0);
  const double ratio = e1 / e2;
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}

TEST_CASE("constraining extra vertices raises the eigenvalue") {
  const Domain disk = Domain::disk(1.0);
  const Mesh mesh = triangulate(disk, 0.05);
  const SparseSym K = assemble_stiffness(mesh);
  const SparseSym M = assemble_mass(mesh);
  auto base = outer_mask(mesh);
  const EigenPair p0 = smallest_eigenpair(K, M, base, 1e-10);

  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> uv(0, mesh.vertex_count() - 1);
  auto grown = base;
  double prev = p0.lambda;
  for (int round = 0; round < 4; ++round) {
    for (int k = 0; k < 12; ++k) grown[uv(rng)] = 1;
    const EigenPair p = smallest_eigenpair(K, M, grown, 1e-10);
    CHECK(p.lambda >= prev - 1e-9 * prev);
    prev = p.lambda;
  }
}

TEST_CASE("boundary gradient of the disk ground state is flat") {
  Mesh mesh;
  const EigenPair pair = solve_domain(Domain::disk(1.0), 0.01, 1e-10, &mesh);
  const auto prof = boundary_gradient(pair, mesh);
  const auto ref = disk_reference(1.0);
  REQUIRE(!prof.samples.empty());
  for (const auto& s : prof.samples)
    CHECK(std::abs(s.value - ref.boundary_gradient) <=
          0.03 * ref.boundary_gradient);
  CHECK(prof.min_value > 0.0);
}

TEST_CASE("boundary gradient of the ellipse dips at the major axis ends") {
  Mesh mesh;
  const EigenPair pair =
      solve_domain(Domain::ellipse(2.0, 1.0), 0.02, 1e-10, &mesh);
  const auto prof = boundary_gradient(pair, mesh);
  const double L = mesh.domain->boundary_length();
  // global minimum sits at one of the two major-axis endpoints (s = 0, L/2)
  const auto& best = prof.samples[prof.argmin_index];
  const double d0 = std::min(best.s, L - best.s);
  const double dhalf = std::abs(best.s - 0.5 * L);
  CHECK(std::min(d0, dhalf) <= 0.02 * L);
  // and the two endpoints carry near-equal values (mesh symmetry)
  double v0 = 0.0, vhalf = 0.0, b0 = 1e9, bh = 1e9;
  for (const auto& s : prof.samples) {
    const double da = std::min(s.s, L - s.s);
    const double db = std::abs(s.s - 0.5 * L);
    if (da < b0) {
      b0 = da;
      v0 = s.value;
    }
    if (db < bh) {
      bh = db;
      vhalf = s.value;
    }
  }
  CHECK(v0 == doctest::Approx(vhalf).epsilon(0.02));
  CHECK(prof.min_value > 0.0);
}

TEST_CASE("free-boundary gradient requires an obstacle") {
  Mesh mesh;
  const EigenPair pair = solve_domain(Domain::disk(1.0), 0.05, 1e-9, &mesh);
  NodeClassification empty;
  empty.is_obstacle.assign(mesh.vertex_count(), 0);
  CHECK_THROWS_AS(free_boundary_gradient(pair, mesh, empty), Error);
}

TEST_CASE("free-boundary gradient near an obstacle tracks the local slope") {
  const Domain disk = Domain::disk(1.0);
  const Mesh mesh = triangulate(disk, 0.02);
  const StraighteningMap map(disk, 0.0);
  BumpObstacleSpec spec;
  spec.anchor_s = 0.0;
  spec.width = 0.2;
  spec.profile = BumpProfile::cos2();
  spec.target_volume = 0.004;
  const auto region = ObstacleRegion::bump(spec, map);
  const auto cls = classify_nodes(mesh, region);
  REQUIRE(!cls.obstacle.empty());
  const SparseSym K = assemble_stiffness(mesh);
  const SparseSym M = assemble_mass(mesh);
  const auto mask = constrained_mask(mesh, cls);
  const EigenPair pair = smallest_eigenpair(K, M, mask, 1e-10);
  const auto fb = free_boundary_gradient(pair, mesh, cls);
  CHECK(fb.samples > 0);
  CHECK(fb.median > 0.0);
  CHECK(fb.lambda_estimate == doctest::Approx(fb.median * fb.median));
  CHECK(fb.min <= fb.median);
  CHECK(fb.median <= fb.max);
  // strictly positive estimate, comfortably above zero (no degeneracy)
  CHECK(fb.median > 0.3);
}

TEST_CASE("eigen solver rejects bad tolerances") {
  const Domain sq = Domain::square(1.0);
  const Mesh mesh = triangulate(sq, 0.25);
  const SparseSym K = assemble_stiffness(mesh);
  const SparseSym M = assemble_mass(mesh);
  CHECK_THROWS_AS(smallest_eigenpair(K, M, outer_mask(mesh), 0.0), Error);
  CHECK_THROWS_AS(smallest_eigenpair(K, M, outer_mask(mesh), 1.5), Error);
}
