#include "spacedec/variational.h"

#include <string>

#include "spacedec/error.h"

namespace spacedec::variational {
namespace {

void require_feasible(const Matrix& X, const ConstraintManifold& manifold, double* out = nullptr) {
  if (X.rows() != manifold.rows())
    throw Error(ErrorCode::InvalidInput, "variational: X row count does not match the constraint");
  const double feas = manifold.feasibility_violation(X);
  if (out) *out = feas;
  if (feas > 1e-8)
    throw Error(ErrorCode::InfeasiblePoint, "constraint residual " + std::to_string(feas) + " exceeds 1e-8");
}

RankInfo restrict_rank(const RankInfo& info, Index s) {
  RankInfo out = info;
  out.s = s;
  return out;
}

// Shared second and third summands. Ucols/Vcols span the detected row and
// column spaces.
void fill_common(const RankInfo& info, const Matrix& E, ConeParts& parts) {
  const Index s = info.s;
  const Matrix U = info.svd.U.leftCols(s);
  const Matrix V = info.svd.V.leftCols(s);
  const Matrix EV = E * V;
  // P_U E P_{V-perp} = U U^T (E - E V V^T)
  const Matrix E_Vperp = E - EV * V.transpose();
  parts.column_part = U * (U.transpose() * E_Vperp);
  const Matrix rest = E_Vperp - parts.column_part;
  const Index k = std::min(info.r - s, std::min(E.rows(), E.cols()));
  parts.rank_increase = k > 0 ? linalg::truncate_rank(rest, k) : Matrix::Zero(E.rows(), E.cols());
}

} // namespace

RankInfo analyze_rank(const Matrix& X, Index r, double rel_tol) {
  if (r < 0 || r > std::min(X.rows(), X.cols()))
    throw Error(ErrorCode::InvalidInput, "analyze_rank: rank bound out of range");
  RankInfo info;
  info.r = r;
  info.svd = linalg::thin_svd(X);
  info.s = linalg::numerical_rank(info.svd.S, X.rows(), X.cols(), rel_tol);
  if (info.s > r)
    throw Error(ErrorCode::InfeasiblePoint, "numerical rank " + std::to_string(info.s) +
                                                " exceeds the bound " + std::to_string(r));
  return info;
}

ConeParts tangent_cone_parts_lowrank(const RankInfo& info, const Matrix& E) {
  ConeParts parts;
  const Matrix V = info.svd.V.leftCols(info.s);
  parts.row_part = (E * V) * V.transpose();
  fill_common(info, E, parts);
  return parts;
}

ConeParts tangent_cone_parts_intersection(const RankInfo& info, const Matrix& E,
                                          const ConstraintManifold& manifold) {
  ConeParts parts;
  const Index s = info.s;
  const Matrix V = info.svd.V.leftCols(s);
  // H = U Sigma lies on H^s whenever X = H V^T lies on H.
  const Matrix H = info.svd.U.leftCols(s) * info.svd.S.head(s).asDiagonal();
  parts.row_part = manifold.project_tangent(H, E * V) * V.transpose();
  fill_common(info, E, parts);
  return parts;
}

Matrix project_tangent_cone_lowrank(const Matrix& X, const Matrix& E, Index r, double rel_tol) {
  if (X.rows() != E.rows() || X.cols() != E.cols())
    throw Error(ErrorCode::InvalidInput, "project_tangent_cone_lowrank: shape mismatch");
  return tangent_cone_parts_lowrank(analyze_rank(X, r, rel_tol), E).sum();
}

Matrix project_tangent_cone_intersection(const Matrix& X, const Matrix& E, Index r,
                                         const ConstraintManifold& manifold, double rel_tol) {
  if (X.rows() != E.rows() || X.cols() != E.cols())
    throw Error(ErrorCode::InvalidInput, "project_tangent_cone_intersection: shape mismatch");
  require_feasible(X, manifold);
  return tangent_cone_parts_intersection(analyze_rank(X, r, rel_tol), E, manifold).sum();
}

Matrix project_tangent_constraint(const Matrix& X, const Matrix& E,
                                  const ConstraintManifold& manifold, double rel_tol) {
  const linalg::SvdFactors f = linalg::thin_svd(X);
  const Index s = linalg::numerical_rank(f.S, X.rows(), X.cols(), rel_tol);
  const Matrix V = f.V.leftCols(s);
  const Matrix H = f.U.leftCols(s) * f.S.head(s).asDiagonal();
  const Matrix EV = E * V;
  return manifold.project_tangent(H, EV) * V.transpose() + (E - EV * V.transpose());
}

double stationarity_measure(const Matrix& X, const Matrix& egrad, Index r,
                            const ConstraintManifold& manifold, double rel_tol) {
  return project_tangent_cone_intersection(X, -egrad, r, manifold, rel_tol).norm();
}

StationarityReport certify(const Matrix& X, const Matrix& egrad, Index r,
                           const ConstraintManifold& manifold, double rel_tol) {
  if (X.rows() != egrad.rows() || X.cols() != egrad.cols())
    throw Error(ErrorCode::InvalidInput, "certify: X and gradient shapes differ");
  StationarityReport rep;
  require_feasible(X, manifold, &rep.feasibility);
  const RankInfo info = analyze_rank(X, r, rel_tol);
  rep.detected_rank = info.s;
  rep.rank_bound = r;
  const Matrix negE = -egrad;
  rep.at_detected_rank = tangent_cone_parts_intersection(info, negE, manifold).sum().norm();
  if (info.s == r) {
    rep.at_forced_rank = rep.at_detected_rank;
  } else {
    // The top-r factor U_r Sigma_r still represents X on H^r.
    manifold.require_nonempty(r);
    rep.at_forced_rank =
        tangent_cone_parts_intersection(restrict_rank(info, r), negE, manifold).sum().norm();
  }
  return rep;
}

bool check_rank_deficient_stationarity(const Matrix& X, const Matrix& egrad,
                                       const ConstraintManifold& manifold, double tol,
                                       double rel_tol) {
  require_feasible(X, manifold);
  return project_tangent_constraint(X, -egrad, manifold, rel_tol).norm() <= tol;
}

} // namespace spacedec::variational
