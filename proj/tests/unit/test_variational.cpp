#include <cmath>

#include <gtest/gtest.h>

#include "helpers.h"
#include "spacedec/error.h"
#include "spacedec/linalg.h"
#include "spacedec/problems.h"
#include "spacedec/solvers.h"
#include "spacedec/space_decoupling.h"
#include "spacedec/variational.h"

using namespace spacedec;
using namespace spacedec::variational;

namespace {

// X = U diag(sv) V^T with random orthonormal U, V
Matrix with_singular_values(Index m, Index n, const std::vector<double>& sv, Rng& rng) {
  const Index k = static_cast<Index>(sv.size());
  const Matrix U = linalg::qr_orthonormalize(rng.gaussian(m, k));
  const Matrix V = linalg::qr_orthonormalize(rng.gaussian(n, k));
  Vector s(k);
  for (Index i = 0; i < k; ++i) s(i) = sv[static_cast<size_t>(i)];
  return U * s.asDiagonal() * V.transpose();
}

// rank s point of H: H V^T with H feasible of s columns
Matrix feasible_point(const ConstraintManifold& mf, Index n, Index s, Rng& rng) {
  const Matrix H = mf.random_point(s, rng);
  return H * linalg::qr_orthonormalize(rng.gaussian(n, s)).transpose();
}

// orthogonal projection onto the span of embedded M_h tangents at a full
// rank point, which span the tangent space of the rank-r stratum
Matrix span_projection(const MhPoint& p, const Matrix& E, Rng& rng) {
  const Index dim = mh::dimension(p.manifold(), p.n(), p.r());
  Matrix B(p.m() * p.n(), dim + 10);
  for (Index k = 0; k < B.cols(); ++k) {
    const Matrix eta = mh::embed_tangent(p, mh::random_tangent(p, rng)).first;
    B.col(k) = Eigen::Map<const Vector>(eta.data(), eta.size());
  }
  const auto sv = linalg::thin_svd(B);
  const Index rank = linalg::numerical_rank(sv.S, B.rows(), B.cols(), 1e-10);
  const Matrix Q = sv.U.leftCols(rank);
  const Vector e = Eigen::Map<const Vector>(E.data(), E.size());
  const Vector pe = Q * (Q.transpose() * e);
  return Eigen::Map<const Matrix>(pe.data(), p.m(), p.n());
}

} // namespace

TEST(AnalyzeRank, DetectsRank) {
  Rng rng(1);
  const Matrix X = with_singular_values(6, 5, {3, 2}, rng);
  const RankInfo info = analyze_rank(X, 3);
  EXPECT_EQ(info.s, 2);
  EXPECT_EQ(info.r, 3);
  EXPECT_EQ(analyze_rank(Matrix::Zero(4, 4), 2).s, 0);
  // sigma_2 / sigma_1 = 1e-20 is below max(m, n) eps
  EXPECT_EQ(analyze_rank(with_singular_values(6, 5, {1, 1e-20}, rng), 3).s, 1);
  EXPECT_EQ(analyze_rank(with_singular_values(6, 5, {1, 1e-6}, rng), 3, 1e-5).s, 1);
}

TEST(LowRankCone, FullRankIsFixedRankTangent) {
  Rng rng(2);
  const Matrix X = with_singular_values(7, 6, {3, 2, 1}, rng);
  const Matrix E = rng.gaussian(7, 6);
  const auto sv = linalg::thin_svd(X);
  const Matrix PU = sv.U.leftCols(3) * sv.U.leftCols(3).transpose();
  const Matrix PV = sv.V.leftCols(3) * sv.V.leftCols(3).transpose();
  const Matrix oracle = PU * E + E * PV - PU * E * PV;
  EXPECT_LE(test::rel_err(project_tangent_cone_lowrank(X, E, 3), oracle), 1e-12);
}

TEST(LowRankCone, ZeroPointGivesBestRankR) {
  Rng rng(3);
  const Matrix E = rng.gaussian(6, 5);
  EXPECT_LE(test::rel_err(project_tangent_cone_lowrank(Matrix::Zero(6, 5), E, 2), linalg::truncate_rank(E, 2)), 1e-12);
}

TEST(LowRankCone, PartsOrthogonalAndProjectionMinimal) {
  Rng rng(4);
  const Matrix X = with_singular_values(8, 7, {2, 1}, rng);
  const RankInfo info = analyze_rank(X, 4);
  const Matrix E = rng.gaussian(8, 7);
  const ConeParts parts = tangent_cone_parts_lowrank(info, E);
  const double scale = E.squaredNorm();
  EXPECT_LE(std::abs(parts.row_part.cwiseProduct(parts.column_part).sum()), 1e-12 * scale);
  EXPECT_LE(std::abs(parts.row_part.cwiseProduct(parts.rank_increase).sum()), 1e-12 * scale);
  EXPECT_LE(std::abs(parts.column_part.cwiseProduct(parts.rank_increase).sum()), 1e-12 * scale);
  const Matrix P = parts.sum();
  // cone: <E - P, P> = 0
  EXPECT_LE(std::abs((E - P).cwiseProduct(P).sum()), 1e-12 * scale);
  for (int k = 0; k < 50; ++k) {
    const Matrix Y = tangent_cone_parts_lowrank(info, rng.gaussian(8, 7)).sum() * std::abs(rng.normal());
    EXPECT_LE((E - P).norm(), (E - Y).norm() + 1e-12);
  }
  // P_{U-perp} E P_{V-perp} truncated to rank r - s = 2
  EXPECT_LE(linalg::numerical_rank(linalg::thin_svd(parts.rank_increase).S, 8, 7), 2);
}

TEST(IntersectionCone, EuclideanAgreesWithLowRank) {
  Rng rng(5);
  const auto eu = ConstraintManifold::euclidean(9);
  for (int k = 0; k < 50; ++k) {
    const Index s = 1 + k % 4;
    const Matrix X = feasible_point(eu, 8, s, rng);
    const Matrix E = rng.gaussian(9, 8);
    const Matrix a = project_tangent_cone_intersection(X, E, 4, eu);
    const Matrix b = project_tangent_cone_lowrank(X, E, 4);
    EXPECT_LE((a - b).norm(), 1e-12 * std::max(1.0, E.norm()));
  }
}

TEST(IntersectionCone, TangentToConstraintAndMinimal) {
  Rng rng(6);
  for (const char* key : {"oblique", "fsphere", "stiefel:4x2"}) {
    const auto mf = ConstraintManifold::parse(key, 8);
    for (Index s : {2, 3}) {
      const Matrix X = feasible_point(mf, 7, s, rng);
      const RankInfo info = analyze_rank(X, 4);
      ASSERT_EQ(info.s, s) << key;
      const Matrix E = rng.gaussian(8, 7);
      const ConeParts parts = tangent_cone_parts_intersection(info, E, mf);
      const Matrix P = parts.sum();
      EXPECT_LE(mf.tangent_violation(X, P), 1e-10) << key;
      EXPECT_LE(std::abs((E - P).cwiseProduct(P).sum()), 1e-10 * E.squaredNorm()) << key;
      EXPECT_LE(test::rel_err(P, project_tangent_cone_intersection(X, E, 4, mf)), 1e-14);
      for (int k = 0; k < 30; ++k) {
        const Matrix Y = tangent_cone_parts_intersection(info, rng.gaussian(8, 7), mf).sum();
        EXPECT_LE((E - P).norm(), (E - Y).norm() + 1e-12) << key;
      }
    }
  }
}

TEST(IntersectionCone, FullRankMatchesTangentSpan) {
  Rng rng(7);
  for (const char* key : {"euclidean", "oblique", "fsphere", "stiefel:3x2"}) {
    const auto mf = ConstraintManifold::parse(key, 6);
    const MhPoint p = mh::random_point(mf, 5, 3, 0.5, 8);
    const Matrix E = rng.gaussian(6, 5);
    const Matrix oracle = span_projection(p, E, rng);
    EXPECT_LE(test::rel_err(project_tangent_cone_intersection(p.X_dense(), E, 3, mf), oracle), 1e-9) << key;
  }
}

TEST(IntersectionCone, RejectsInfeasible) {
  Rng rng(9);
  const auto ob = ConstraintManifold::oblique(5);
  const Matrix X = 1.1 * feasible_point(ob, 4, 2, rng);
  try {
    project_tangent_cone_intersection(X, rng.gaussian(5, 4), 3, ob);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasiblePoint);
  }
}

TEST(ConstraintTangent, MatchesSplit) {
  Rng rng(10);
  const auto ob = ConstraintManifold::oblique(6);
  const Matrix H = ob.random_point(6, rng);
  const Matrix E = rng.gaussian(6, 6);
  // full rank X = H: the split reduces to P_T(E)
  EXPECT_LE(test::rel_err(project_tangent_constraint(H, E, ob), ob.project_tangent(H, E)), 1e-12);
}

TEST(Certify, ZeroGradientAndRankDeficient) {
  Rng rng(11);
  const auto ob = ConstraintManifold::oblique(6);
  const Matrix X = feasible_point(ob, 5, 2, rng);
  const auto rep = certify(X, Matrix::Zero(6, 5), 3, ob);
  EXPECT_EQ(rep.detected_rank, 2);
  EXPECT_EQ(rep.rank_bound, 3);
  EXPECT_EQ(rep.at_detected_rank, 0.0);
  EXPECT_LE(rep.feasibility, 1e-12);
  EXPECT_TRUE(check_rank_deficient_stationarity(X, Matrix::Zero(6, 5), ob, 1e-12));
  EXPECT_FALSE(check_rank_deficient_stationarity(X, rng.gaussian(6, 5), ob, 1e-12));
  const Matrix G = rng.gaussian(6, 5);
  EXPECT_NEAR(stationarity_measure(X, G, 3, ob), project_tangent_cone_intersection(X, -G, 3, ob).norm(), 1e-12);
}

TEST(Certify, ConvergedSolutionsAreStationary) {
  for (const char* key : {"euclidean", "oblique", "fsphere"}) {
    QuarticObjective f(7, 6, 12);
    const auto mf = ConstraintManifold::parse(key, 7);
    SolverConfig cfg = SolverConfig::rtr_defaults();
    cfg.grad_tol = 1e-10;
    cfg.max_iters = 500;
    const SolveReport rep = solve_rtr(f, mh::random_point(mf, 6, 3, 10.0, 13), cfg);
    ASSERT_EQ(rep.termination, Termination::GradTol) << key;
    const Matrix X = rep.final_point.X_dense();
    const auto c = certify(X, f.egrad(rep.final_point.X()).to_dense(), 3, mf);
    EXPECT_LE(c.at_detected_rank, 1e-6) << key;
    EXPECT_LE(c.at_forced_rank, 1e-6) << key;
  }
}
