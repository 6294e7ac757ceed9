#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace mmcool::kernels {
namespace {

// The phasor (cos theta_k, sin theta_k) is advanced four modes at a time by
// exp(i 4 psi) and re-seeded from exact sin/cos every kReseed blocks, which
// keeps the recurrence error near 1e-15.
constexpr std::size_t kReseed = 16;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

template <bool Rotate>
FieldSums sums_avx2(const Geometry& g, double x, double* a_re, double* a_im, const double* r_re,
                    const double* r_im, double* profile) {
  const double q = g.q_ref + x * g.inv_c;
  const double kx = g.k0 * x;
  const double theta0 = kx - g.delta0 * q;
  const double psi = g.spacing * q;
  const __m256d c4 = _mm256_set1_pd(std::cos(4.0 * psi));
  const __m256d s4 = _mm256_set1_pd(std::sin(4.0 * psi));
  const __m256d k0v = _mm256_set1_pd(g.k0);
  const __m256d inv_c = _mm256_set1_pd(g.inv_c);

  __m256d e_re = _mm256_setzero_pd();
  __m256d e_im = _mm256_setzero_pd();
  __m256d de_re = _mm256_setzero_pd();
  __m256d de_im = _mm256_setzero_pd();
  __m256d ss = _mm256_setzero_pd();
  __m256d cv = _mm256_setzero_pd();
  __m256d sv = _mm256_setzero_pd();

  const std::size_t blocks = g.n / 4;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t k = 4 * b;
    if (b % kReseed == 0) {
      alignas(32) double cs[4];
      alignas(32) double sn[4];
      for (int l = 0; l < 4; ++l) {
        const double th = theta0 + static_cast<double>(k + l) * psi;
        cs[l] = std::cos(th);
        sn[l] = std::sin(th);
      }
      cv = _mm256_load_pd(cs);
      sv = _mm256_load_pd(sn);
    } else {
      const __m256d nc = _mm256_fmsub_pd(cv, c4, _mm256_mul_pd(sv, s4));
      const __m256d ns = _mm256_fmadd_pd(sv, c4, _mm256_mul_pd(cv, s4));
      cv = nc;
      sv = ns;
    }
    __m256d ar = _mm256_loadu_pd(a_re + k);
    __m256d ai = _mm256_loadu_pd(a_im + k);
    if constexpr (Rotate) {
      const __m256d rr = _mm256_loadu_pd(r_re + k);
      const __m256d ri = _mm256_loadu_pd(r_im + k);
      const __m256d nr = _mm256_fmsub_pd(ar, rr, _mm256_mul_pd(ai, ri));
      const __m256d ni = _mm256_fmadd_pd(ar, ri, _mm256_mul_pd(ai, rr));
      ar = nr;
      ai = ni;
      _mm256_storeu_pd(a_re + k, ar);
      _mm256_storeu_pd(a_im + k, ai);
    }
    const __m256d d = _mm256_loadu_pd(g.detunings + k);
    const __m256d df = _mm256_mul_pd(_mm256_fnmadd_pd(d, inv_c, k0v), cv);
    if (profile) _mm256_storeu_pd(profile + k, sv);
    e_re = _mm256_fmadd_pd(ar, sv, e_re);
    e_im = _mm256_fmadd_pd(ai, sv, e_im);
    de_re = _mm256_fmadd_pd(ar, df, de_re);
    de_im = _mm256_fmadd_pd(ai, df, de_im);
    ss = _mm256_fmadd_pd(sv, sv, ss);
  }

  FieldSums out{hsum(e_re), hsum(e_im), hsum(de_re), hsum(de_im), hsum(ss)};
  for (std::size_t k = 4 * blocks; k < g.n; ++k) {
    double ar = a_re[k];
    double ai = a_im[k];
    if constexpr (Rotate) {
      const double nr = ar * r_re[k] - ai * r_im[k];
      const double ni = ar * r_im[k] + ai * r_re[k];
      a_re[k] = ar = nr;
      a_im[k] = ai = ni;
    }
    const double th = theta0 + static_cast<double>(k) * psi;
    const double f = std::sin(th);
    const double dfk = (g.k0 - g.detunings[k] * g.inv_c) * std::cos(th);
    if (profile) profile[k] = f;
    out.e_re += ar * f;
    out.e_im += ai * f;
    out.de_re += ar * dfk;
    out.de_im += ai * dfk;
    out.s += f * f;
  }
  return out;
}

FieldSums evaluate(const Geometry& g, double x, const double* a_re, const double* a_im,
                   double* profile) {
  return sums_avx2<false>(g, x, const_cast<double*>(a_re), const_cast<double*>(a_im), nullptr,
                          nullptr, profile);
}

FieldSums rotate_evaluate(const Geometry& g, double x, double* a_re, double* a_im,
                          const double* r_re, const double* r_im, double* profile) {
  return sums_avx2<true>(g, x, a_re, a_im, r_re, r_im, profile);
}

void kick_rotate(std::size_t n, double* a_re, double* a_im, const double* profile, double c_re,
                 double c_im, const double* r_re, const double* r_im) {
  const __m256d cr = _mm256_set1_pd(c_re);
  const __m256d ci = _mm256_set1_pd(c_im);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d f = _mm256_loadu_pd(profile + k);
    const __m256d ar = _mm256_fmadd_pd(f, cr, _mm256_loadu_pd(a_re + k));
    const __m256d ai = _mm256_fmadd_pd(f, ci, _mm256_loadu_pd(a_im + k));
    const __m256d rr = _mm256_loadu_pd(r_re + k);
    const __m256d ri = _mm256_loadu_pd(r_im + k);
    _mm256_storeu_pd(a_re + k, _mm256_fmsub_pd(ar, rr, _mm256_mul_pd(ai, ri)));
    _mm256_storeu_pd(a_im + k, _mm256_fmadd_pd(ar, ri, _mm256_mul_pd(ai, rr)));
  }
  for (; k < n; ++k) {
    const double ar = a_re[k] + profile[k] * c_re;
    const double ai = a_im[k] + profile[k] * c_im;
    a_re[k] = ar * r_re[k] - ai * r_im[k];
    a_im[k] = ar * r_im[k] + ai * r_re[k];
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Backend::Avx2, "avx2", &evaluate, &rotate_evaluate,
                                 &kick_rotate};
  return table;
}

}  // namespace mmcool::kernels
