#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace dipswitch::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vfmaq_f64(acc0, vmulq_f64(vld1q_f64(w + k), vld1q_f64(a + k)), vld1q_f64(b + k));
    acc1 = vfmaq_f64(acc1, vmulq_f64(vld1q_f64(w + k + 2), vld1q_f64(a + k + 2)),
                     vld1q_f64(b + k + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) acc += w[k] * a[k] * b[k];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), va, vld1q_f64(x + k)));
  for (; k < n; ++k) y[k] += alpha * x[k];
}

void rotate(double* x, double* y, double c, double s, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t xk = vld1q_f64(x + k);
    const float64x2_t yk = vld1q_f64(y + k);
    vst1q_f64(x + k, vfmsq_f64(vmulq_f64(vc, xk), vs, yk));
    vst1q_f64(y + k, vfmaq_f64(vmulq_f64(vc, yk), vs, xk));
  }
  for (; k < n; ++k) {
    const double xk = x[k];
    const double yk = y[k];
    x[k] = c * xk - s * yk;
    y[k] = s * xk + c * yk;
  }
}

}  // namespace

const KernelTable kNeonTable{Isa::Neon, &dot, &weighted_dot, &axpy, &rotate};

}  // namespace dipswitch::simd::detail
