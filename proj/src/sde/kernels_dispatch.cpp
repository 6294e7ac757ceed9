#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace mmcool::kernels {

const KernelTable* avx2_kernels() {
#if defined(MMCOOL_HAVE_AVX2)
  return &avx2_table();
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() {
#if defined(MMCOOL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend parse_backend(const std::string& name) {
  if (name == "auto") return Backend::Auto;
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  throw std::invalid_argument("unknown kernel backend '" + name + "' (auto, scalar, avx2)");
}

const KernelTable& select(Backend requested) {
  if (requested == Backend::Auto) {
    if (const char* env = std::getenv("MMCOOL_KERNELS"); env && *env) {
      requested = parse_backend(env);
    }
  }
  switch (requested) {
    case Backend::Scalar:
      return scalar_kernels();
    case Backend::Avx2:
      if (avx2_kernels() && cpu_has_avx2()) return *avx2_kernels();
      throw std::runtime_error("AVX2 kernels requested but not available on this build/CPU");
    case Backend::Auto:
      break;
  }
  if (avx2_kernels() && cpu_has_avx2()) return *avx2_kernels();
  return scalar_kernels();
}

}  // namespace mmcool::kernels
