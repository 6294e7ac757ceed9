#pragma once

#include <functional>

namespace mmcool::specfun {

// sin(x)/x with the removable singularity at 0.
double sinc(double x);

// Bessel function of the first kind, order 1. Odd in x.
double bessel_j1(double x);

// Struve function of order 1, for x >= 0. Even in x.
double struve_h1(double x);

// First positive zero of J1.
inline constexpr double bessel_j1_first_zero = 3.8317059702075123156;

// Integral over T in [0, 2pi] of sin(a + b sin T) cos^2 T, evaluated in closed
// form as (2 pi / b) sin(a) J1(b). b must be >= 0.
double spatial_average_integral(double a, double b);

// Fixed-order periodic trapezoid rule on [0, 2pi). Spectrally accurate for
// smooth periodic integrands.
struct QuadratureSpec {
  int nodes = 512;
};

double periodic_trapezoid(const std::function<double(double)>& f, QuadratureSpec spec = {});

}  // namespace mmcool::specfun
