#include "core/special.hpp"

#include <cmath>

#include "core/common.hpp"

namespace eigenobs {

double bessel_j0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-16 * (1.0 + std::abs(sum))) break;
  }
  return sum;
}

double bessel_j1(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-16 * (1.0 + std::abs(sum))) break;
  }
  return sum;
}

double bessel_j0_first_zero() {
  // J0(2) > 0 > J0(3); bisect to full double precision.
  double lo = 2.0, hi = 3.0;
  double flo = bessel_j0(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = bessel_j0(mid);
    if ((flo > 0.0) == (fm > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace eigenobs
