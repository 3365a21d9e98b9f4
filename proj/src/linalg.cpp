#include "dipswitch/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dipswitch/error.hpp"
#include "dipswitch/simd/kernels.hpp"

namespace dipswitch::linalg {

namespace {

struct Reflector {
  std::vector<double> v;
  double tau = 0.0;
};

// Top-down Householder: step k annihilates row/column k beyond the first
// off-diagonal. The matrix is kept in full symmetric storage so every update
// runs along contiguous rows.
std::vector<Reflector> tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& diag,
                                      std::vector<double>& off) {
  const auto& k_ = simd::active();
  std::vector<Reflector> reflectors;
  reflectors.reserve(n > 2 ? n - 2 : 0);
  diag.assign(n, 0.0);
  off.assign(n, 0.0);
  std::vector<double> p;
  std::vector<double> w;

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double* x = &a[k * n + k + 1];
    const double x0 = x[0];
    const double tail = k_.dot(x + 1, x + 1, m - 1);
    Reflector r;
    if (tail == 0.0) {
      off[k] = x0;
      reflectors.push_back(std::move(r));
      continue;
    }
    const double alpha = -std::copysign(std::sqrt(x0 * x0 + tail), x0);
    r.v.assign(x, x + m);
    r.v[0] -= alpha;
    r.tau = 2.0 / (tail + r.v[0] * r.v[0]);

    // p = tau B v,  w = p - (tau/2)(v.p) v,  B -= v w^T + w v^T
    p.resize(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = r.tau * k_.dot(&a[(k + 1 + i) * n + k + 1], r.v.data(), m);
    const double kappa = 0.5 * r.tau * k_.dot(r.v.data(), p.data(), m);
    w = p;
    k_.axpy(-kappa, r.v.data(), w.data(), m);
    for (std::size_t i = 0; i < m; ++i) {
      double* row = &a[(k + 1 + i) * n + k + 1];
      k_.axpy(-r.v[i], w.data(), row, m);
      k_.axpy(-w[i], r.v.data(), row, m);
    }
    off[k] = alpha;
    reflectors.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] = a[i * n + i];
  if (n >= 2) off[n - 2] = a[(n - 2) * n + n - 1];
  off[n - 1] = 0.0;
  return reflectors;
}

// Q^T = H_{n-3} ... H_0, built row-major so the rows are Q's columns.
std::vector<double> accumulate_transposed(const std::vector<Reflector>& reflectors, std::size_t n) {
  const auto& k_ = simd::active();
  std::vector<double> qt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) qt[i * n + i] = 1.0;
  std::vector<double> u(n);
  for (std::size_t k = 0; k < reflectors.size(); ++k) {
    const Reflector& r = reflectors[k];
    if (r.tau == 0.0) continue;
    const std::size_t m = r.v.size();
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) k_.axpy(r.v[i], &qt[(k + 1 + i) * n], u.data(), n);
    for (std::size_t i = 0; i < m; ++i) k_.axpy(-r.tau * r.v[i], u.data(), &qt[(k + 1 + i) * n], n);
  }
  return qt;
}

// Implicit QL with Wilkinson-style shifts on the tridiagonal (diag, off),
// where off[i] couples i and i+1. Rotations are applied to rows of zt.
void tridiagonal_ql(std::vector<double>& diag, std::vector<double>& off, std::vector<double>* zt, std::size_t n) {
  const auto& k_ = simd::active();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxIterations = 60;

  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iterations++ == kMaxIterations) {
        throw Error(ErrorCode::NoConvergence, "tridiagonal QL iteration did not converge");
      }
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * off[i];
        const double b = c * off[i];
        r = std::hypot(f, g);
        off[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          off[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
        if (zt) {
          // (z_i, z_{i+1}) <- (c z_i - s z_{i+1}, s z_i + c z_{i+1})
          k_.rotate(&(*zt)[i * n], &(*zt)[(i + 1) * n], c, s, n);
        }
      }
      if (underflow) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace

SymmetricEigen eigh(std::span<const double> a, std::size_t n, bool want_vectors) {
  if (a.size() != n * n) throw Error(ErrorCode::InvalidInput, "matrix size does not match n x n");
  double scale = 0.0;
  for (double v : a) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
    scale = std::max(scale, std::abs(v));
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a[i * n + j] - a[j * n + i]) > tol) {
        throw Error(ErrorCode::InvalidInput, "matrix is not symmetric");
      }

  SymmetricEigen out;
  out.n = n;
  if (n == 0) return out;

  // Symmetrize so both triangles carry the same rounding.
  std::vector<double> work(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) work[i * n + j] = 0.5 * (a[i * n + j] + a[j * n + i]);

  std::vector<double> diag;
  std::vector<double> off;
  const auto reflectors = tridiagonalize(work, n, diag, off);
  std::vector<double> zt;
  if (want_vectors) zt = accumulate_transposed(reflectors, n);
  tridiagonal_ql(diag, off, want_vectors ? &zt : nullptr, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

  out.values.resize(n);
  for (std::size_t m = 0; m < n; ++m) out.values[m] = diag[order[m]];
  if (!want_vectors) return out;

  out.vectors.resize(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    const double* row = &zt[order[m] * n];
    double sign = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (std::abs(row[p]) > kSignThreshold) {
        sign = row[p] < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t p = 0; p < n; ++p) out.vectors[p * n + m] = sign * row[p];
  }
  return out;
}

HermitianEigen eigh_hermitian(std::span<const cplx> a_in, std::size_t n) {
  if (a_in.size() != n * n) throw Error(ErrorCode::InvalidInput, "matrix size does not match n x n");
  std::vector<cplx> a(a_in.begin(), a_in.end());
  // Hermitian part only.
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = a[i * n + i].real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx h = 0.5 * (a[i * n + j] + std::conj(a[j * n + i]));
      a[i * n + j] = h;
      a[j * n + i] = std::conj(h);
    }
  }
  std::vector<cplx> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  const auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a[i * n + j]);
    return s;
  };
  double total = 0.0;
  for (const cplx& z : a) total += std::norm(z);

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_norm() <= 1e-30 * std::max(total, 1e-300)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = std::abs(a[p * n + q]);
        if (g == 0.0) continue;
        // Phase q so that a_pq becomes real and positive.
        const cplx u = a[p * n + q] / g;
        const cplx uc = std::conj(u);
        for (std::size_t r = 0; r < n; ++r) {
          a[r * n + q] *= uc;
          v[r * n + q] *= uc;
        }
        for (std::size_t r = 0; r < n; ++r) a[q * n + r] *= u;

        // Real Jacobi rotation in the (p, q) plane.
        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const cplx arp = a[r * n + p];
          const cplx arq = a[r * n + q];
          a[r * n + p] = c * arp - s * arq;
          a[r * n + q] = s * arp + c * arq;
          const cplx vrp = v[r * n + p];
          const cplx vrq = v[r * n + q];
          v[r * n + p] = c * vrp - s * vrq;
          v[r * n + q] = s * vrp + c * vrq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const cplx apr = a[p * n + r];
          const cplx aqr = a[q * n + r];
          a[p * n + r] = c * apr - s * aqr;
          a[q * n + r] = s * apr + c * aqr;
        }
        a[p * n + q] = a[q * n + p] = 0.0;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x].real() < a[y * n + y].real(); });
  HermitianEigen out;
  out.n = n;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    out.values[m] = a[order[m] * n + order[m]].real();
    for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + m] = v[r * n + order[m]];
  }
  return out;
}

}  // namespace dipswitch::linalg
