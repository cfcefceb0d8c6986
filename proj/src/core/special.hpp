#pragma once

namespace eigenobs {

// Bessel functions of the first kind, evaluated by their power series.
// Accurate to ~1e-15 for |x| <= 8, which covers every argument this
// project produces (j_{0,1} * r/R with r <= R).
double bessel_j0(double x);
double bessel_j1(double x);

// First positive zero of J0, from bisection on the series.
double bessel_j0_first_zero();

}  // namespace eigenobs
