#pragma once

// Data-parallel inner loops shared by the eigensolver and the thermal
// partial trace. Each kernel has a scalar reference implementation and
// optional AVX2+FMA (x86-64) and NEON (aarch64) variants. The variant is
// picked once at first use from the CPU's capabilities, or forced with the
// DIPSWITCH_ISA environment variable (scalar | avx2 | neon).

#include <cstddef>
#include <span>
#include <string_view>

namespace dipswitch::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  /// sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_k w[k] * a[k] * b[k]
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  /// y[k] += alpha * x[k]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// Plane rotation of two rows: (x, y) <- (c x - s y, s x + c y).
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
};

/// Reference implementation; always available.
const KernelTable& scalar_kernels() noexcept;

/// Table for the requested ISA, or nullptr when it was not compiled in or
/// the running CPU lacks the instructions.
const KernelTable* kernels_for(Isa isa) noexcept;

/// Table selected for this process.
const KernelTable& active() noexcept;

/// Switches the process-wide table; false if `isa` is unavailable. Meant for
/// equivalence tests, not for use while other threads are computing.
bool force(Isa isa) noexcept;

// Convenience wrappers over active().

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
  return active().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  active().rotate(x.data(), y.data(), c, s, x.size());
}

}  // namespace dipswitch::simd
