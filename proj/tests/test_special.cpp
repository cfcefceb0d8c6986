#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/special.hpp"

using namespace eigenobs;

TEST_CASE("series values match handbook constants") {
  CHECK(bessel_j0(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bessel_j0(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-14));
  CHECK(bessel_j1(0.0) == doctest::Approx(0.0));
  CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-14));
}

TEST_CASE("first zero of J0") {
  const double j01 = bessel_j0_first_zero();
  CHECK(j01 == doctest::Approx(2.4048255576957724).epsilon(1e-14));
  CHECK(std::abs(bessel_j0(j01)) < 1e-14);
  CHECK(j01 * j01 == doctest::Approx(5.783185962946783).epsilon(1e-13));
  // normalization constant used by the disk reference
  CHECK(bessel_j1(j01) == doctest::Approx(0.5191474972894669).epsilon(1e-13));
}

TEST_CASE("series stay accurate across the range used by the project") {
  // derivative identity J0' = -J1, via central differences
  for (double x : {0.5, 1.5, 3.0, 5.0, 7.5}) {
    const double d = 1e-6;
    const double fd = (bessel_j0(x + d) - bessel_j0(x - d)) / (2.0 * d);
    CHECK(fd == doctest::Approx(-bessel_j1(x)).epsilon(1e-8));
  }
}
