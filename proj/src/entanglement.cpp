#include "dipswitch/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "dipswitch/error.hpp"
#include "dipswitch/linalg.hpp"
#include "dipswitch/simd/kernels.hpp"

namespace dipswitch {

namespace {

std::pair<std::size_t, std::size_t> ordered_pair(std::size_t i, std::size_t j, std::size_t n) {
  if (i == j) throw Error(ErrorCode::InvalidPair, "pair indices must differ");
  if (i >= n || j >= n) {
    std::ostringstream msg;
    msg << "pair (" << i + 1 << ", " << j + 1 << ") out of range for " << n << " dipoles";
    throw Error(ErrorCode::InvalidPair, msg.str());
  }
  return {std::min(i, j), std::max(i, j)};
}

// Every mask with bits lo and hi cleared, ascending.
template <class F>
void for_each_rest(int n, std::size_t lo, std::size_t hi, F&& f) {
  const Mask count = Mask{1} << (n - 2);
  for (Mask r = 0; r < count; ++r) {
    // Spread r's bits around the two holes.
    const Mask low = r & ((Mask{1} << lo) - 1);
    Mask rest = low | ((r >> lo) << (lo + 1));
    const Mask low2 = rest & ((Mask{1} << hi) - 1);
    rest = low2 | ((rest >> hi) << (hi + 1));
    f(rest);
  }
}

std::array<Mask, 4> pair_states(Mask rest, std::size_t lo, std::size_t hi) {
  const Mask a = Mask{1} << hi;  // second slot
  const Mask b = Mask{1} << lo;  // first slot
  return {rest, rest | a, rest | b, rest | a | b};
}

int dipoles_for_dimension(std::size_t dim) {
  if (dim < 4 || !std::has_single_bit(dim)) {
    throw Error(ErrorCode::InvalidInput, "state length must be a power of two covering at least two dipoles");
  }
  return std::countr_zero(dim);
}

}  // namespace

TwoQubitDensity::TwoQubitDensity(const Matrix4& rho, std::pair<std::size_t, std::size_t> pair)
    : rho_(rho), pair_(pair) {
  cplx trace = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    trace += rho_[a * 4 + a];
    for (std::size_t b = 0; b < 4; ++b) {
      if (!std::isfinite(rho_[a * 4 + b].real()) || !std::isfinite(rho_[a * 4 + b].imag())) {
        throw Error(ErrorCode::InvalidDensity, "density matrix has non-finite entries");
      }
      if (std::abs(rho_[a * 4 + b] - std::conj(rho_[b * 4 + a])) > kHermitianTolerance) {
        throw Error(ErrorCode::InvalidDensity, "density matrix is not Hermitian");
      }
    }
  }
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    std::ostringstream msg;
    msg << "density matrix trace " << trace.real() << " differs from 1";
    throw Error(ErrorCode::InvalidDensity, msg.str());
  }
  const auto eig = linalg::eigh_hermitian(rho_, 4);
  for (std::size_t m = 0; m < 4; ++m) {
    if (eig.values[m] < -kClampTolerance) {
      std::ostringstream msg;
      msg << "density matrix has eigenvalue " << eig.values[m];
      throw Error(ErrorCode::InvalidDensity, msg.str());
    }
    evals_[m] = std::max(0.0, eig.values[m]);
  }
  std::copy(eig.vectors.begin(), eig.vectors.end(), evecs_.begin());
}

TwoQubitDensity reduce_to_pair(std::span<const double> state, std::size_t i, std::size_t j) {
  const int n = dipoles_for_dimension(state.size());
  const auto [lo, hi] = ordered_pair(i, j, static_cast<std::size_t>(n));
  double norm2 = 0.0;
  for (double a : state) norm2 += a * a;
  if (std::abs(norm2 - 1.0) > 1e-10) throw Error(ErrorCode::InvalidInput, "state is not normalized");

  std::array<double, 16> acc{};
  for_each_rest(n, lo, hi, [&](Mask rest) {
    const auto s = pair_states(rest, lo, hi);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) acc[a * 4 + b] += state[s[a]] * state[s[b]];
  });
  Matrix4 rho{};
  for (std::size_t k = 0; k < 16; ++k) rho[k] = acc[k];
  return TwoQubitDensity(rho, {lo, hi});
}

TwoQubitDensity reduce_to_pair(const ThermalState& state, std::size_t i, std::size_t j) {
  const SpectralDecomposition& spec = state.decomposition();
  const BasisLayout& layout = spec.layout();
  if (!spec.has_vectors()) throw Error(ErrorCode::InvalidInput, "thermal state needs eigenvectors");
  const int n = layout.dipoles();
  if (n < 2) throw Error(ErrorCode::InvalidPair, "pair reduction needs at least two dipoles");
  const auto [lo, hi] = ordered_pair(i, j, static_cast<std::size_t>(n));

  // Only eigenpairs above the cutoff contribute. In-block weights are
  // non-increasing, so the retained set is a prefix of each block.
  double wmax = 0.0;
  for (std::size_t b = 0; b < spec.blocks().size(); ++b)
    for (double w : state.block_weights(b)) wmax = std::max(wmax, w);
  std::vector<std::size_t> kept(spec.blocks().size(), 0);
  for (std::size_t b = 0; b < kept.size(); ++b) {
    const auto w = state.block_weights(b);
    std::size_t k = 0;
    while (k < w.size() && w[k] >= kWeightCutoff * wmax) ++k;
    kept[b] = k;
  }

  const auto& kernels = simd::active();
  std::array<double, 16> acc{};
  for_each_rest(n, lo, hi, [&](Mask rest) {
    const auto s = pair_states(rest, lo, hi);
    std::array<int, 4> blk;
    std::array<std::uint32_t, 4> pos;
    for (std::size_t a = 0; a < 4; ++a) {
      blk[a] = layout.block_of(s[a]);
      pos[a] = layout.position(s[a]);
    }
    for (std::size_t a = 0; a < 4; ++a) {
      if (blk[a] < 0) continue;
      const std::size_t b_idx = static_cast<std::size_t>(blk[a]);
      const std::size_t keep = kept[b_idx];
      if (keep == 0) continue;
      const auto& block = spec.blocks()[b_idx];
      const std::size_t d = block.values.size();
      const double* w = state.block_weights(b_idx).data();
      const double* row_a = &block.vectors[pos[a] * d];
      for (std::size_t b = a; b < 4; ++b) {
        if (blk[b] != blk[a]) continue;
        const double* row_b = &block.vectors[pos[b] * d];
        acc[a * 4 + b] += kernels.weighted_dot(w, row_a, row_b, keep);
      }
    }
  });
  // Renormalize by the retained weight so truncation cannot leak into the trace.
  const double trace = acc[0] + acc[5] + acc[10] + acc[15];
  if (!(trace > 0.0)) throw Error(ErrorCode::InvalidDensity, "thermal reduction has zero trace");
  Matrix4 rho{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a; b < 4; ++b) rho[a * 4 + b] = rho[b * 4 + a] = acc[a * 4 + b] / trace;
  return TwoQubitDensity(rho, {lo, hi});
}

TwoQubitDensity spin_flip(const TwoQubitDensity& rho) {
  // sigma_y x sigma_y = [[0,0,0,-1],[0,0,1,0],[0,1,0,0],[-1,0,0,0]]:
  // entry (a, b) of the product is s(a) s(b) conj(rho(3-a, 3-b)).
  constexpr std::array<double, 4> sign{-1.0, 1.0, 1.0, -1.0};
  Matrix4 out{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) out[a * 4 + b] = sign[a] * sign[b] * std::conj(rho(3 - a, 3 - b));
  return TwoQubitDensity(out, rho.pair());
}

namespace {

// Entries outside the diagonal and anti-diagonal are exactly zero.
bool is_x_shaped(const TwoQubitDensity& rho) {
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      if (a != b && a + b != 3 && rho(a, b) != cplx(0.0)) return false;
  return true;
}

}  // namespace

double concurrence(const TwoQubitDensity& rho) {
  if (is_x_shaped(rho)) {
    // Closed form for X states. Populations enter only through products of
    // non-negative diagonals, so nothing cancels near rank deficiency.
    const double p00 = std::max(0.0, rho(0, 0).real()), p01 = std::max(0.0, rho(1, 1).real());
    const double p10 = std::max(0.0, rho(2, 2).real()), p11 = std::max(0.0, rho(3, 3).real());
    const double c = 2.0 * std::max({0.0, std::abs(rho(1, 2)) - std::sqrt(p00 * p11),
                                     std::abs(rho(0, 3)) - std::sqrt(p01 * p10)});
    return std::clamp(c, 0.0, 1.0);
  }
  // With rho = sum_k v_k v_k^dagger, the lambdas are the singular values of
  // tau = V^T (sigma_y x sigma_y) V. They are read off as the eigenvalues
  // +-sigma of [[0, tau], [tau^dagger, 0]], so no square root of a rounded
  // eigenvalue is ever taken.
  constexpr std::array<double, 4> sign{-1.0, 1.0, 1.0, -1.0};
  const auto& vec = rho.eigenvectors();
  const auto& val = rho.eigenvalues();
  Matrix4 v{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t k = 0; k < 4; ++k) v[a * 4 + k] = vec[a * 4 + k] * std::sqrt(val[k]);
  std::vector<cplx> aug(64, 0.0);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t l = 0; l < 4; ++l) {
      cplx t = 0.0;
      for (std::size_t a = 0; a < 4; ++a) t += sign[a] * v[a * 4 + k] * v[(3 - a) * 4 + l];
      aug[k * 8 + 4 + l] = t;
      aug[(4 + l) * 8 + k] = std::conj(t);
    }
  const auto eig = linalg::eigh_hermitian(aug, 8);

  std::array<double, 4> lambda{};
  for (std::size_t m = 0; m < 4; ++m) lambda[m] = std::max(0.0, eig.values[7 - m]);
  const double c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
  return std::clamp(c, 0.0, 1.0);
}

}  // namespace dipswitch
