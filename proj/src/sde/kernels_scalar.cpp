#include <cmath>

#include "kernels_internal.hpp"

namespace mmcool::kernels {
namespace {

template <bool Rotate>
FieldSums sums_scalar(const Geometry& g, double x, double* a_re, double* a_im, const double* r_re,
                      const double* r_im, double* profile) {
  const double q = g.q_ref + x * g.inv_c;
  const double kx = g.k0 * x;
  FieldSums out;
  for (std::size_t k = 0; k < g.n; ++k) {
    double ar = a_re[k];
    double ai = a_im[k];
    if constexpr (Rotate) {
      const double nr = ar * r_re[k] - ai * r_im[k];
      const double ni = ar * r_im[k] + ai * r_re[k];
      a_re[k] = ar = nr;
      a_im[k] = ai = ni;
    }
    const double d = g.detunings[k];
    const double theta = kx - d * q;
    const double f = std::sin(theta);
    const double df = (g.k0 - d * g.inv_c) * std::cos(theta);
    if (profile) profile[k] = f;
    out.e_re += ar * f;
    out.e_im += ai * f;
    out.de_re += ar * df;
    out.de_im += ai * df;
    out.s += f * f;
  }
  return out;
}

FieldSums evaluate(const Geometry& g, double x, const double* a_re, const double* a_im,
                   double* profile) {
  return sums_scalar<false>(g, x, const_cast<double*>(a_re), const_cast<double*>(a_im), nullptr,
                            nullptr, profile);
}

FieldSums rotate_evaluate(const Geometry& g, double x, double* a_re, double* a_im,
                          const double* r_re, const double* r_im, double* profile) {
  return sums_scalar<true>(g, x, a_re, a_im, r_re, r_im, profile);
}

void kick_rotate(std::size_t n, double* a_re, double* a_im, const double* profile, double c_re,
                 double c_im, const double* r_re, const double* r_im) {
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a_re[k] + profile[k] * c_re;
    const double ai = a_im[k] + profile[k] * c_im;
    a_re[k] = ar * r_re[k] - ai * r_im[k];
    a_im[k] = ar * r_im[k] + ai * r_re[k];
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::Scalar, "scalar", &evaluate, &rotate_evaluate,
                                 &kick_rotate};
  return table;
}

}  // namespace mmcool::kernels
