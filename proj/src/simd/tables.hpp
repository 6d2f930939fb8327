#pragma once

#include "hivmob/simd.hpp"

namespace hivmob::simd::detail {

#if defined(HIVMOB_WITH_AVX2)
// Defined in kernels_avx2.cpp, the only translation unit compiled with -mavx2 -mfma.
const KernelTable& avx2_table_impl();
#endif

}  // namespace hivmob::simd::detail
