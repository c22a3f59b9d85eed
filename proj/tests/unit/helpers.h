#pragma once

#include <Eigen/Dense>

#include "spacedec/types.h"

namespace spacedec::test {

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max(1.0, b.norm());
  return (a - b).norm() / scale;
}

inline double orth_err(const Matrix& Q) {
  const Matrix D = Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols());
  return D.norm();
}

// Spectral norm via the largest singular value.
inline double spectral(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
}

} // namespace spacedec::test
