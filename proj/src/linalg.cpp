#include "spacedec/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>
#include <Eigen/QR>
#include <Eigen/Eigenvalues>

#include "spacedec/error.h"

namespace spacedec::linalg {

bool all_finite(const Matrix& A) { return A.allFinite(); }

SvdFactors thin_svd(const Matrix& A) {
  if (!A.allFinite()) throw Error(ErrorCode::InvalidInput, "thin_svd: non-finite entries");
  SvdFactors f;
  const Index s = std::min(A.rows(), A.cols());
  if (s == 0) {
    f.U = Matrix(A.rows(), 0);
    f.S = Vector(0);
    f.V = Matrix(A.cols(), 0);
    return f;
  }
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.U = svd.matrixU();
  f.S = svd.singularValues();
  f.V = svd.matrixV();
  return f;
}

Matrix truncate_rank(const Matrix& A, Index k) {
  if (k < 0 || k > std::min(A.rows(), A.cols()))
    throw Error(ErrorCode::InvalidInput, "truncate_rank: k out of range");
  if (k == 0) return Matrix::Zero(A.rows(), A.cols());
  const SvdFactors f = thin_svd(A);
  return f.U.leftCols(k) * f.S.head(k).asDiagonal() * f.V.leftCols(k).transpose();
}

Matrix polar_factor(const Matrix& L) {
  if (!L.allFinite()) throw Error(ErrorCode::InvalidInput, "polar_factor: non-finite entries");
  if (L.cols() > L.rows()) throw Error(ErrorCode::RankDeficient, "polar_factor: more columns than rows");
  if (L.cols() == 0) return L;
  const SvdFactors f = thin_svd(L);
  if (!(f.S(f.S.size() - 1) > 1e-12 * f.S(0)))
    throw Error(ErrorCode::RankDeficient, "polar_factor: input lacks full column rank");
  return f.U * f.V.transpose();
}

Matrix qr_orthonormalize(const Matrix& A) {
  if (!A.allFinite()) throw Error(ErrorCode::InvalidInput, "qr_orthonormalize: non-finite entries");
  if (A.cols() > A.rows()) throw Error(ErrorCode::RankDeficient, "qr_orthonormalize: more columns than rows");
  Eigen::HouseholderQR<Matrix> qr(A);
  const Matrix R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  Matrix Q = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
  for (Index j = 0; j < A.cols(); ++j) {
    const double d = R(j, j);
    if (!(std::abs(d) > 1e-12 * scale))
      throw Error(ErrorCode::RankDeficient, "qr_orthonormalize: input lacks full column rank");
    // sign fix so that R has a positive diagonal
    if (d < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

Matrix sym_part(const Matrix& M) {
  if (M.rows() != M.cols()) throw Error(ErrorCode::InvalidInput, "sym_part: matrix is not square");
  return 0.5 * (M + M.transpose());
}

double default_rank_tolerance(Index m, Index n) {
  return static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();
}

Index numerical_rank(const Vector& S, Index m, Index n, double rel_tol) {
  if (S.size() == 0 || S(0) <= 0.0) return 0;
  const double tol = (rel_tol < 0 ? default_rank_tolerance(m, n) : rel_tol) * S(0);
  Index s = 0;
  while (s < S.size() && S(s) > tol) ++s;
  return s;
}

Matrix orthonormal_complement(const Matrix& V) {
  const Index n = V.rows(), r = V.cols();
  if (r == n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(V);
  const Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  return Q.rightCols(n - r);
}

Matrix spd_sqrt(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  return es.operatorSqrt();
}

Matrix spd_inv_sqrt(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  return es.operatorInverseSqrt();
}

} // namespace spacedec::linalg
