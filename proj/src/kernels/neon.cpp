#include "spacedec/kernels.h"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace spacedec::kernels::detail {
namespace {

void sampled_dot(const double* L, const double* R, Index r, const std::int32_t* rows,
                 const std::int32_t* cols, Index count, double* out) {
  for (Index k = 0; k < count; ++k) {
    const double* a = L + static_cast<Index>(rows[k]) * r;
    const double* b = R + static_cast<Index>(cols[k]) * r;
    float64x2_t acc = vdupq_n_f64(0.0);
    Index j = 0;
    for (; j + 2 <= r; j += 2) acc = vfmaq_f64(acc, vld1q_f64(a + j), vld1q_f64(b + j));
    double tail = 0.0;
    for (; j < r; ++j) tail += a[j] * b[j];
    out[k] = vaddvq_f64(acc) + tail;
  }
}

void row_dots(const double* A, const double* B, Index m, Index s, double* out) {
  Index i0 = 0;
  for (; i0 + 2 <= m; i0 += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (Index j = 0; j < s; ++j)
      acc = vfmaq_f64(acc, vld1q_f64(A + j * m + i0), vld1q_f64(B + j * m + i0));
    vst1q_f64(out + i0, acc);
  }
  for (Index i = i0; i < m; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < s; ++j) acc += A[j * m + i] * B[j * m + i];
    out[i] = acc;
  }
}

double hadamard_residual(const double* X, const double* P, Index n, double* grad) {
  float64x2_t acc = vdupq_n_f64(0.0);
  Index i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(X + i);
    const float64x2_t res = vsubq_f64(vmulq_f64(x, x), vld1q_f64(P + i));
    acc = vfmaq_f64(acc, res, res);
    vst1q_f64(grad + i, vmulq_f64(vmulq_n_f64(x, 2.0), res));
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double res = X[i] * X[i] - P[i];
    tail += res * res;
    grad[i] = 2.0 * X[i] * res;
  }
  return 0.5 * (vaddvq_f64(acc) + tail);
}

void hadamard_hess(const double* X, const double* P, const double* eta, Index n, double* out) {
  Index i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(X + i);
    const float64x2_t e = vld1q_f64(eta + i);
    const float64x2_t xx = vmulq_f64(x, x);
    const float64x2_t lhs = vmulq_f64(vmulq_n_f64(e, 2.0), vsubq_f64(xx, vld1q_f64(P + i)));
    vst1q_f64(out + i, vfmaq_f64(lhs, vmulq_n_f64(xx, 4.0), e));
  }
  for (; i < n; ++i) {
    const double xx = X[i] * X[i];
    out[i] = 2.0 * eta[i] * (xx - P[i]) + 4.0 * xx * eta[i];
  }
}

} // namespace

const Table& neon_table() {
  static const Table t{sampled_dot, row_dots, hadamard_residual, hadamard_hess};
  return t;
}

} // namespace spacedec::kernels::detail
#endif
