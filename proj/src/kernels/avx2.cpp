#include "spacedec/kernels.h"

#include <immintrin.h>

namespace spacedec::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void sampled_dot(const double* L, const double* R, Index r, const std::int32_t* rows,
                 const std::int32_t* cols, Index count, double* out) {
  for (Index k = 0; k < count; ++k) {
    const double* a = L + static_cast<Index>(rows[k]) * r;
    const double* b = R + static_cast<Index>(cols[k]) * r;
    __m256d acc = _mm256_setzero_pd();
    Index j = 0;
    for (; j + 4 <= r; j += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc);
    double tail = 0.0;
    for (; j < r; ++j) tail += a[j] * b[j];
    out[k] = hsum(acc) + tail;
  }
}

void row_dots(const double* A, const double* B, Index m, Index s, double* out) {
  Index i0 = 0;
  for (; i0 + 4 <= m; i0 += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (Index j = 0; j < s; ++j)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(A + j * m + i0), _mm256_loadu_pd(B + j * m + i0), acc);
    _mm256_storeu_pd(out + i0, acc);
  }
  for (Index i = i0; i < m; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < s; ++j) acc += A[j * m + i] * B[j * m + i];
    out[i] = acc;
  }
}

double hadamard_residual(const double* X, const double* P, Index n, double* grad) {
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  Index i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(X + i);
    const __m256d res = _mm256_fmsub_pd(x, x, _mm256_loadu_pd(P + i));
    acc = _mm256_fmadd_pd(res, res, acc);
    _mm256_storeu_pd(grad + i, _mm256_mul_pd(_mm256_mul_pd(two, x), res));
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double res = X[i] * X[i] - P[i];
    tail += res * res;
    grad[i] = 2.0 * X[i] * res;
  }
  return 0.5 * (hsum(acc) + tail);
}

void hadamard_hess(const double* X, const double* P, const double* eta, Index n, double* out) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d four = _mm256_set1_pd(4.0);
  Index i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(X + i);
    const __m256d e = _mm256_loadu_pd(eta + i);
    const __m256d xx = _mm256_mul_pd(x, x);
    const __m256d lhs = _mm256_mul_pd(_mm256_mul_pd(two, e), _mm256_sub_pd(xx, _mm256_loadu_pd(P + i)));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_mul_pd(four, xx), e, lhs));
  }
  for (; i < n; ++i) {
    const double xx = X[i] * X[i];
    out[i] = 2.0 * eta[i] * (xx - P[i]) + 4.0 * xx * eta[i];
  }
}

} // namespace

const Table& avx2_table() {
  static const Table t{sampled_dot, row_dots, hadamard_residual, hadamard_hess};
  return t;
}

} // namespace spacedec::kernels::detail
