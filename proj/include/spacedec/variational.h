#pragma once

#include "spacedec/constraint_manifold.h"
#include "spacedec/linalg.h"

namespace spacedec::variational {

struct RankInfo {
  Index s = 0;  // detected numerical rank
  Index r = 0;  // rank bound
  linalg::SvdFactors svd;
};

// rel_tol < 0 selects the linalg default max(m, n) * eps.
RankInfo analyze_rank(const Matrix& X, Index r, double rel_tol = -1.0);

// Three mutually orthogonal summands of a tangent cone projection:
// the row-space part (E P_V, or its constrained version), P_U E P_{V-perp},
// and the rank-increasing truncation of P_{U-perp} E P_{V-perp}.
struct ConeParts {
  Matrix row_part;
  Matrix column_part;
  Matrix rank_increase;
  Matrix sum() const { return row_part + column_part + rank_increase; }
};

ConeParts tangent_cone_parts_lowrank(const RankInfo& info, const Matrix& E);
ConeParts tangent_cone_parts_intersection(const RankInfo& info, const Matrix& E,
                                          const ConstraintManifold& manifold);

Matrix project_tangent_cone_lowrank(const Matrix& X, const Matrix& E, Index r,
                                    double rel_tol = -1.0);
// Throws InfeasiblePoint when the constraint residual of X exceeds 1e-8.
Matrix project_tangent_cone_intersection(const Matrix& X, const Matrix& E, Index r,
                                         const ConstraintManifold& manifold,
                                         double rel_tol = -1.0);

// P_{T_X H}(E) through the split P_T(E V) V^T + E (I - V V^T) with V the
// right singular vectors of X at its numerical rank.
Matrix project_tangent_constraint(const Matrix& X, const Matrix& E,
                                  const ConstraintManifold& manifold, double rel_tol = -1.0);

double stationarity_measure(const Matrix& X, const Matrix& egrad, Index r,
                            const ConstraintManifold& manifold, double rel_tol = -1.0);

struct StationarityReport {
  Index detected_rank = 0;
  Index rank_bound = 0;
  double at_detected_rank = 0.0;
  double at_forced_rank = 0.0;
  double feasibility = 0.0;
};

// Measures at the detected rank s and with the top-r singular triplets
// treated as a rank-r point; the cone projection is discontinuous in s.
StationarityReport certify(const Matrix& X, const Matrix& egrad, Index r,
                           const ConstraintManifold& manifold, double rel_tol = -1.0);

// True iff ||P_{T_X H}(-egrad)|| <= tol; meant for points with rank < r.
bool check_rank_deficient_stationarity(const Matrix& X, const Matrix& egrad,
                                       const ConstraintManifold& manifold, double tol,
                                       double rel_tol = -1.0);

} // namespace spacedec::variational
