#pragma once

#include <cstddef>
#include <string>

// Inner loops over the field modes. The scalar table is the reference; the
// AVX2 table produces the same results to rounding (different summation
// order and a phasor recurrence instead of per-mode sin/cos).
namespace mmcool::kernels {

// Mode k has detuning delta0 - k * spacing and phase
//   theta_k = k0 x - Delta_k (q_ref + x / c)
// for a position x measured from the anchor node.
struct Geometry {
  std::size_t n = 0;
  const double* detunings = nullptr;
  double delta0 = 0.0;
  double spacing = 0.0;
  double k0 = 1.0;
  double q_ref = 0.0;
  double inv_c = 0.0;
};

struct FieldSums {
  double e_re = 0.0;
  double e_im = 0.0;
  double de_re = 0.0;
  double de_im = 0.0;
  double s = 0.0;  // sum of f_k^2
};

// Sums over modes of alpha_k f_k, alpha_k f_k', f_k^2 at x. Writes f_k to
// profile when profile is non-null.
using EvaluateFn = FieldSums (*)(const Geometry& g, double x, const double* a_re,
                                 const double* a_im, double* profile);

// alpha_k <- r_k alpha_k, then the same sums as EvaluateFn on the rotated
// amplitudes. profile is required.
using RotateEvaluateFn = FieldSums (*)(const Geometry& g, double x, double* a_re, double* a_im,
                                       const double* r_re, const double* r_im, double* profile);

// alpha_k <- r_k (alpha_k + f_k c).
using KickRotateFn = void (*)(std::size_t n, double* a_re, double* a_im, const double* profile,
                              double c_re, double c_im, const double* r_re, const double* r_im);

enum class Backend { Auto, Scalar, Avx2 };

struct KernelTable {
  Backend backend = Backend::Scalar;
  const char* name = "scalar";
  EvaluateFn evaluate = nullptr;
  RotateEvaluateFn rotate_evaluate = nullptr;
  KickRotateFn kick_rotate = nullptr;
};

const KernelTable& scalar_kernels();
// Null when the AVX2 variants were not compiled in.
const KernelTable* avx2_kernels();

bool cpu_has_avx2();

// Auto picks AVX2 when compiled in and supported by the CPU, unless the
// MMCOOL_KERNELS environment variable says "scalar". Requesting Avx2 on a
// machine without it throws.
const KernelTable& select(Backend requested = Backend::Auto);

Backend parse_backend(const std::string& name);

}  // namespace mmcool::kernels
