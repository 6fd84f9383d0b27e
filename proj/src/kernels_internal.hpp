#pragma once

#include "ffd/kernels.hpp"

namespace ffd::kernels::detail {

#if defined(FFD_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif
#if defined(FFD_HAVE_NEON_TU)
const KernelTable& neon_table();
#endif

}  // namespace ffd::kernels::detail
