#include "mmcool/specfun.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace mmcool::specfun {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Below this the ascending series are summed in long double; above it the
// asymptotic expansions are accurate to ~exp(-2x).
constexpr double kSeriesLimit = 16.0;

long double j1_series(long double x) {
  const long double q = 0.25L * x * x;
  long double term = 0.5L * x;
  long double sum = term;
  for (int k = 0; k < 200; ++k) {
    term *= -q / static_cast<long double>((k + 1) * (k + 2));
    sum += term;
    if (std::fabs(term) < 1e-24L * std::fabs(sum) && k > x) break;
  }
  return sum;
}

long double h1_series(long double x) {
  const long double q = 0.25L * x * x;
  // (x/2)^2 / (Gamma(3/2) Gamma(5/2)) = 2 x^2 / (3 pi)
  long double term = 2.0L * x * x / (3.0L * static_cast<long double>(kPi));
  long double sum = term;
  for (int k = 0; k < 200; ++k) {
    term *= -q / ((k + 1.5L) * (k + 2.5L));
    sum += term;
    if (std::fabs(term) < 1e-24L * std::fabs(sum) && k > x) break;
  }
  return sum;
}

struct Hankel {
  double j1;
  double y1;
};

// Hankel expansion for order 1, truncated at the smallest term.
Hankel hankel_asymptotic(double x) {
  constexpr double mu = 4.0;
  double b = 1.0;
  double p = 1.0;
  double q = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = b * (mu - odd * odd) / (k * 8.0 * x);
    if (std::fabs(next) >= std::fabs(b) || std::fabs(next) < 1e-18) break;
    b = next;
    // a_k / x^k enters P with sign (-1)^(k/2) for even k, Q with (-1)^((k-1)/2) for odd k.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * b;
    } else {
      q += sign * b;
    }
  }
  const double chi = x - 0.75 * kPi;
  const double amp = std::sqrt(2.0 / (kPi * x));
  const double c = std::cos(chi);
  const double s = std::sin(chi);
  return {amp * (p * c - q * s), amp * (p * s + q * c)};
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// H1(x) - Y1(x) = (2/pi) int_0^inf exp(-u) sqrt(1 + u^2/x^2) du, truncated at
// u = 40 where the weight is below 5e-18.
double struve_minus_y1(double x) {
  constexpr int panels = 20;
  constexpr double length = 40.0;
  constexpr double h = length / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = (i + 0.5) * h;
    for (std::size_t j = 0; j < kGlNodes.size(); ++j) {
      const double u = mid + 0.5 * h * kGlNodes[j];
      const double r = u / x;
      sum += kGlWeights[j] * std::exp(-u) * std::sqrt(1.0 + r * r);
    }
  }
  return (2.0 / kPi) * 0.5 * h * sum;
}

}  // namespace

double sinc(double x) {
  if (std::fabs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double bessel_j1(double x) {
  if (x < 0.0) return -bessel_j1(-x);
  if (x <= kSeriesLimit) return static_cast<double>(j1_series(x));
  return hankel_asymptotic(x).j1;
}

double struve_h1(double x) {
  if (x < 0.0) x = -x;
  if (x <= kSeriesLimit) return static_cast<double>(h1_series(x));
  return hankel_asymptotic(x).y1 + struve_minus_y1(x);
}

double spatial_average_integral(double a, double b) {
  if (b < 0.0) throw std::invalid_argument("spatial_average_integral: b must be >= 0");
  if (b < 1e-6) {
    // sin(a + b sinT) = sin a + b cos a sinT + O(b^2); the sinT cos^2T term
    // integrates to zero, the b^2 term is -sin(a) b^2 pi / 8.
    return kPi * std::sin(a) * (1.0 - b * b / 8.0);
  }
  // The cos(a) sin(b sinT) cos^2T part is odd in T and integrates to zero over
  // a full period, so H1 does not contribute here.
  return (2.0 * kPi / b) * std::sin(a) * bessel_j1(b);
}

double periodic_trapezoid(const std::function<double(double)>& f, QuadratureSpec spec) {
  if (spec.nodes < 64 || spec.nodes % 2 != 0) {
    throw std::invalid_argument("QuadratureSpec.nodes must be even and >= 64");
  }
  const double h = 2.0 * kPi / spec.nodes;
  double sum = 0.0;
  double comp = 0.0;
  for (int i = 0; i < spec.nodes; ++i) {
    const double y = f(i * h) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum * h;
}

}  // namespace mmcool::specfun
