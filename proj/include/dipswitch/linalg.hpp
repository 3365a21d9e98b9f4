#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dipswitch::linalg {

using cplx = std::complex<double>;

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
/// `vectors` is row-major n x n with eigenvector m stored in column m, so
/// row p holds component p of every eigenvector contiguously.
struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;  ///< empty when vectors were not requested

  double component(std::size_t p, std::size_t m) const noexcept { return vectors[p * n + m]; }
};

/// Components smaller than this are skipped when fixing an eigenvector's sign.
inline constexpr double kSignThreshold = 1e-9;

/// Householder reduction to tridiagonal form followed by implicit QL.
/// Each eigenvector's first component above kSignThreshold is made positive.
/// Throws Error(InvalidInput) when `a` is not symmetric to 1e-12 relative to
/// its largest entry, Error(NoConvergence) if QL stalls.
SymmetricEigen eigh(std::span<const double> a, std::size_t n, bool want_vectors = true);

/// Eigenpairs of a complex Hermitian matrix by cyclic Jacobi rotations;
/// meant for the 4 x 4 two-qubit problems. Row-major input, eigenvalues
/// ascending, eigenvector m in column m.
struct HermitianEigen {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<cplx> vectors;
};

HermitianEigen eigh_hermitian(std::span<const cplx> a, std::size_t n);

}  // namespace dipswitch::linalg
