#pragma once

#include "spacedec/types.h"

namespace spacedec::linalg {

struct SvdFactors {
  Matrix U;  // m x s, orthonormal columns
  Vector S;  // nonincreasing
  Matrix V;  // n x s, orthonormal columns
};

SvdFactors thin_svd(const Matrix& A);

// Best Frobenius approximation of rank at most k.
Matrix truncate_rank(const Matrix& A, Index k);

// W = L (L^T L)^{-1/2}; L must have full column rank.
Matrix polar_factor(const Matrix& L);

Matrix qr_orthonormalize(const Matrix& A);

Matrix sym_part(const Matrix& M);

// sigma_i counts iff sigma_i > tol * sigma_1. A negative tol selects
// max(m, n) * eps.
double default_rank_tolerance(Index m, Index n);
Index numerical_rank(const Vector& S, Index m, Index n, double rel_tol = -1.0);

// Orthonormal basis of the orthogonal complement of range(V), V orthonormal.
Matrix orthonormal_complement(const Matrix& V);

// Principal square root and inverse square root of an SPD matrix.
Matrix spd_sqrt(const Matrix& M);
Matrix spd_inv_sqrt(const Matrix& M);

bool all_finite(const Matrix& A);

} // namespace spacedec::linalg
