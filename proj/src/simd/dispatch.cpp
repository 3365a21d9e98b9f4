#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace dipswitch::simd {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() noexcept { return detail::kScalarTable; }

const KernelTable* kernels_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return &detail::kScalarTable;
    case Isa::Avx2:
#if defined(DIPSWITCH_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &detail::kAvx2Table;
#endif
      return nullptr;
    case Isa::Neon:
#if defined(DIPSWITCH_HAVE_NEON)
      return &detail::kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

namespace {

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("DIPSWITCH_ISA")) {
    const std::string_view name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == to_string(isa)) {
        if (const KernelTable* t = kernels_for(isa)) return *t;
      }
    }
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const KernelTable* t = kernels_for(isa)) return *t;
  }
  return detail::kScalarTable;
}

}  // namespace

namespace {

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{&select()};
  return table;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

bool force(Isa isa) noexcept {
  const KernelTable* t = kernels_for(isa);
  if (!t) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace dipswitch::simd
