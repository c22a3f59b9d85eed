#pragma once

#include <cstdint>

#include "spacedec/types.h"

// Data-parallel inner loops with a scalar reference path and SIMD variants
// selected at runtime. SPACEDEC_SIMD=scalar in the environment pins the
// reference path.
namespace spacedec::kernels {

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
// Overrides the dispatch choice; throws InvalidInput if the ISA is unavailable.
void force_isa(Isa isa);
void reset_isa();

// out[k] = <L.row(rows[k]), R.row(cols[k])> for row-major L (.. x r), R (.. x r).
void sampled_dot(const double* L, const double* R, Index r, const std::int32_t* rows,
                 const std::int32_t* cols, Index count, double* out);

// out[i] = sum_j A(i,j) B(i,j) for column-major m x s operands.
void row_dots(const double* A, const double* B, Index m, Index s, double* out);

// res = X.*X - P; grad = 2 X.*res; returns 0.5 * sum(res.^2).
double hadamard_residual(const double* X, const double* P, Index n, double* grad);

// out = 2 eta.*(X.*X - P) + 4 X.*X.*eta
void hadamard_hess(const double* X, const double* P, const double* eta, Index n, double* out);

namespace detail {

struct Table {
  void (*sampled_dot)(const double*, const double*, Index, const std::int32_t*,
                      const std::int32_t*, Index, double*);
  void (*row_dots)(const double*, const double*, Index, Index, double*);
  double (*hadamard_residual)(const double*, const double*, Index, double*);
  void (*hadamard_hess)(const double*, const double*, const double*, Index, double*);
};

const Table& scalar_table();
#if defined(SPACEDEC_HAVE_AVX2)
const Table& avx2_table();
#endif
#if defined(SPACEDEC_HAVE_NEON)
const Table& neon_table();
#endif

} // namespace detail

} // namespace spacedec::kernels
