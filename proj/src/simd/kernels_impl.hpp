#pragma once

#include "dipswitch/simd/kernels.hpp"

namespace dipswitch::simd::detail {

// Defined in their own translation units so each can be compiled with the
// matching target flags.
extern const KernelTable kScalarTable;
#if defined(DIPSWITCH_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(DIPSWITCH_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace dipswitch::simd::detail
