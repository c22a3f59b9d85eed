#include "spacedec/kernels.h"

namespace spacedec::kernels::detail {
namespace {

void sampled_dot(const double* L, const double* R, Index r, const std::int32_t* rows,
                 const std::int32_t* cols, Index count, double* out) {
  for (Index k = 0; k < count; ++k) {
    const double* a = L + static_cast<Index>(rows[k]) * r;
    const double* b = R + static_cast<Index>(cols[k]) * r;
    double acc = 0.0;
    for (Index j = 0; j < r; ++j) acc += a[j] * b[j];
    out[k] = acc;
  }
}

void row_dots(const double* A, const double* B, Index m, Index s, double* out) {
  for (Index i = 0; i < m; ++i) out[i] = 0.0;
  for (Index j = 0; j < s; ++j) {
    const double* a = A + j * m;
    const double* b = B + j * m;
    for (Index i = 0; i < m; ++i) out[i] += a[i] * b[i];
  }
}

double hadamard_residual(const double* X, const double* P, Index n, double* grad) {
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double res = X[i] * X[i] - P[i];
    acc += res * res;
    grad[i] = 2.0 * X[i] * res;
  }
  return 0.5 * acc;
}

void hadamard_hess(const double* X, const double* P, const double* eta, Index n, double* out) {
  for (Index i = 0; i < n; ++i) {
    const double xx = X[i] * X[i];
    out[i] = 2.0 * eta[i] * (xx - P[i]) + 4.0 * xx * eta[i];
  }
}

} // namespace

const Table& scalar_table() {
  static const Table t{sampled_dot, row_dots, hadamard_residual, hadamard_hess};
  return t;
}

} // namespace spacedec::kernels::detail
