#pragma once

#include "mmcool/kernels.hpp"

namespace mmcool::kernels {

#if defined(MMCOOL_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace mmcool::kernels
