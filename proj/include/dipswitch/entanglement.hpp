#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>

#include "dipswitch/spectral.hpp"

namespace dipswitch {

using cplx = std::complex<double>;
using Matrix4 = std::array<cplx, 16>;  ///< row-major, basis |00>,|01>,|10>,|11>

/// Validated two-qubit density matrix. The first qubit slot is the
/// lower-indexed dipole of the pair.
class TwoQubitDensity {
 public:
  static constexpr double kHermitianTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-12;
  /// Eigenvalues in [-kClampTolerance, 0) are treated as zero.
  static constexpr double kClampTolerance = 1e-10;

  /// Throws Error(InvalidDensity) unless rho is Hermitian, unit trace and
  /// positive semidefinite within the tolerances above.
  explicit TwoQubitDensity(const Matrix4& rho, std::pair<std::size_t, std::size_t> pair = {0, 1});

  const Matrix4& matrix() const noexcept { return rho_; }
  cplx operator()(std::size_t a, std::size_t b) const noexcept { return rho_[a * 4 + b]; }
  std::pair<std::size_t, std::size_t> pair() const noexcept { return pair_; }

  /// Eigenvalues (ascending, clamped at zero) and eigenvectors of rho.
  const std::array<double, 4>& eigenvalues() const noexcept { return evals_; }
  const Matrix4& eigenvectors() const noexcept { return evecs_; }

 private:
  Matrix4 rho_;
  std::pair<std::size_t, std::size_t> pair_;
  std::array<double, 4> evals_{};
  Matrix4 evecs_{};
};

/// Partial trace of a normalized real pure state over every dipole except i and j.
TwoQubitDensity reduce_to_pair(std::span<const double> state, std::size_t i, std::size_t j);

/// Weights below this fraction of the largest Gibbs weight are skipped.
inline constexpr double kWeightCutoff = 1e-16;

/// Pair reduction of a thermal state, summed over eigenpairs directly from
/// the spectral form.
TwoQubitDensity reduce_to_pair(const ThermalState& state, std::size_t i, std::size_t j);

/// (sigma_y x sigma_y) rho* (sigma_y x sigma_y)
TwoQubitDensity spin_flip(const TwoQubitDensity& rho);

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), l the decreasing
/// eigenvalues of sqrt(sqrt(rho) rho~ sqrt(rho)).
double concurrence(const TwoQubitDensity& rho);

}  // namespace dipswitch
