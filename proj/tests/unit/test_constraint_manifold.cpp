#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "helpers.h"
#include "spacedec/constraint_manifold.h"
#include "spacedec/error.h"
#include "spacedec/linalg.h"

using namespace spacedec;

namespace {

// four kinds on m = 6 rows
std::vector<ConstraintManifold> kinds() {
  return {ConstraintManifold::euclidean(6), ConstraintManifold::oblique(6), ConstraintManifold::frobenius_sphere(6),
          ConstraintManifold::stacked_stiefel(3, 2)};
}

Matrix random_orthogonal(Index s, Rng& rng) { return linalg::qr_orthonormalize(rng.gaussian(s, s)); }

// f(H) = 1/2 ||H - A||^2 + 1/12 sum H^4
struct Quartic {
  Matrix A;
  double value(const Matrix& H) const { return 0.5 * (H - A).squaredNorm() + H.array().pow(4).sum() / 12.0; }
  Matrix egrad(const Matrix& H) const { return H - A + Matrix(H.array().cube() / 3.0); }
  Matrix ehess(const Matrix& H, const Matrix& eta) const { return eta + Matrix(H.array().square() * eta.array()); }
};

} // namespace

TEST(ConstraintManifold, CodomainDimensions) {
  EXPECT_EQ(ConstraintManifold::euclidean(5).codomain_dim(), 0);
  EXPECT_EQ(ConstraintManifold::oblique(5).codomain_dim(), 5);
  EXPECT_EQ(ConstraintManifold::frobenius_sphere(5).codomain_dim(), 1);
  EXPECT_EQ(ConstraintManifold::stacked_stiefel(4, 3).codomain_dim(), 4 * 6);
  Rng rng(1);
  for (const auto& c : kinds()) EXPECT_EQ(c.residual(c.random_point(3, rng)).size(), c.codomain_dim());
}

TEST(ConstraintManifold, ParseKeys) {
  EXPECT_EQ(ConstraintManifold::parse("oblique", 4).kind(), ConstraintKind::Oblique);
  EXPECT_EQ(ConstraintManifold::parse("fsphere", 4).kind(), ConstraintKind::FrobeniusSphere);
  EXPECT_EQ(ConstraintManifold::parse("euclidean", 4).kind(), ConstraintKind::Euclidean);
  const auto st = ConstraintManifold::parse("stiefel:2x3", 6);
  EXPECT_EQ(st.blocks(), 2);
  EXPECT_EQ(st.block_rows(), 3);
  EXPECT_EQ(st.key(), "stiefel:2x3");
  EXPECT_THROW(ConstraintManifold::parse("stiefel:2x3", 7), Error);
  EXPECT_THROW(ConstraintManifold::parse("sphere", 4), Error);
}

TEST(ConstraintManifold, EmptyStiefel) {
  const auto st = ConstraintManifold::stacked_stiefel(2, 3);
  EXPECT_NO_THROW(st.require_nonempty(3));
  try {
    st.require_nonempty(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyManifold);
  }
}

TEST(Residual, Examples) {
  Matrix H(2, 2);
  H << 0.6, 0.8, 0, 1;
  EXPECT_NEAR(ConstraintManifold::oblique(2).residual(H).norm(), 0.0, 1e-15);
  Rng rng(2);
  Matrix U = rng.gaussian(4, 3);
  U /= U.norm();
  const Vector res = ConstraintManifold::frobenius_sphere(4).residual(2.0 * U);
  ASSERT_EQ(res.size(), 1);
  EXPECT_NEAR(res(0), 3.0, 1e-14);
  const Matrix Y = rng.gaussian(5, 2);
  EXPECT_NEAR((ConstraintManifold::stacked_stiefel(5, 1).residual(Y) - ConstraintManifold::oblique(5).residual(Y)).norm(),
              0.0, 1e-14);
  EXPECT_THROW(ConstraintManifold::oblique(3).residual(Y), Error);
}

TEST(ProjectTangent, Examples) {
  Rng rng(3);
  const Matrix Y = rng.gaussian(6, 3);
  EXPECT_EQ(ConstraintManifold::euclidean(6).project_tangent(rng.gaussian(6, 3), Y), Y);
  Matrix H = Matrix::Identity(2, 2), Y2(2, 2), expect(2, 2);
  Y2 << 1, 1, 0, 1;
  expect << 0, 1, 0, 0;
  EXPECT_NEAR((ConstraintManifold::oblique(2).project_tangent(H, Y2) - expect).norm(), 0.0, 1e-15);
  const auto sph = ConstraintManifold::frobenius_sphere(6);
  const Matrix Hs = sph.random_point(3, rng);
  EXPECT_NEAR(sph.project_tangent(Hs, Hs).norm(), 0.0, 1e-15);
}

TEST(ProjectTangent, IdempotentAndSelfAdjoint) {
  Rng rng(4);
  for (const auto& c : kinds()) {
    const Matrix H = c.random_point(3, rng);
    const Matrix Y = rng.gaussian(6, 3), Z = rng.gaussian(6, 3);
    const Matrix PY = c.project_tangent(H, Y);
    EXPECT_LE((c.project_tangent(H, PY) - PY).norm(), 1e-12) << c.key();
    EXPECT_NEAR(PY.cwiseProduct(Z).sum(), Y.cwiseProduct(c.project_tangent(H, Z)).sum(), 1e-12) << c.key();
    EXPECT_LE((c.project_normal(H, Y) + PY - Y).norm(), 1e-14) << c.key();
  }
}

TEST(ProjectTangent, KernelOfResidualDifferential) {
  Rng rng(5);
  const double h = 1e-6;
  for (const auto& c : kinds()) {
    const Matrix H = c.random_point(3, rng);
    const Matrix K = c.project_tangent(H, rng.gaussian(6, 3));
    const Vector d = (c.residual(H + h * K) - c.residual(H - h * K)) / (2 * h);
    EXPECT_LE(d.size() ? d.lpNorm<Eigen::Infinity>() : 0.0, 1e-6) << c.key();
  }
}

TEST(ProjectTangent, RowsOrthogonalToRowSpaceAreTangent) {
  // X Y^T = 0 implies Y tangent at X
  Rng rng(6);
  const double h = 1e-6;
  for (const auto& c : kinds()) {
    // wide rank-3 X, so its rows leave room in R^9
    const Matrix Xw = c.project_point(rng.gaussian(6, 3) * rng.gaussian(3, 9));
    const auto f = linalg::thin_svd(Xw);
    const Index s = linalg::numerical_rank(f.S, 6, 9);
    const Matrix Vperp = linalg::orthonormal_complement(f.V.leftCols(s));
    const Matrix Y = rng.gaussian(6, Vperp.cols()) * Vperp.transpose();
    ASSERT_LE((Xw * Y.transpose()).norm(), 1e-12);
    const Vector d = (c.residual(Xw + h * Y) - c.residual(Xw - h * Y)) / (2 * h);
    EXPECT_LE(d.size() ? d.lpNorm<Eigen::Infinity>() : 0.0, 1e-6) << c.key();
  }
}

TEST(ProjectTangent, DirectSumDecomposition) {
  // P_{T_X H}(E) = P_{T_H H^r}(E V) V^T + E V_perp V_perp^T for X = H V^T
  Rng rng(7);
  for (const auto& c : kinds()) {
    const Index r = 3, n = 8;
    const Matrix H = c.random_point(r, rng);
    const Matrix V = linalg::qr_orthonormalize(rng.gaussian(n, r));
    const Matrix X = H * V.transpose();
    const Matrix E = rng.gaussian(6, n);
    const Matrix lhs = c.project_tangent(X, E);
    const Matrix Vp = linalg::orthonormal_complement(V);
    const Matrix rhs = c.project_tangent(H, E * V) * V.transpose() + E * Vp * Vp.transpose();
    EXPECT_LE((lhs - rhs).norm(), 1e-10) << c.key();
  }
}

TEST(ProjectPoint, Examples) {
  Rng rng(8);
  Matrix Y = rng.gaussian(3, 2);
  Y *= 2.0 / Y.norm();
  EXPECT_LE((ConstraintManifold::frobenius_sphere(3).project_point(Y) - Y / 2).norm(), 1e-15);
  Matrix O(2, 2), Oexp(2, 2);
  O << 3, 4, 0, 1;
  Oexp << 0.6, 0.8, 0, 1;
  EXPECT_LE((ConstraintManifold::oblique(2).project_point(O) - Oexp).norm(), 1e-15);
  // block B^T = diag(2,3) padded: rows of the 2 x 4 block are [2 0 0 0; 0 3 0 0]
  Matrix S = Matrix::Zero(2, 4), Sexp = Matrix::Zero(2, 4);
  S(0, 0) = 2;
  S(1, 1) = 3;
  Sexp(0, 0) = 1;
  Sexp(1, 1) = 1;
  EXPECT_LE((ConstraintManifold::stacked_stiefel(1, 2).project_point(S) - Sexp).norm(), 1e-14);
  // oracle: per-block polar factor of the transposed block
  const Matrix G = rng.gaussian(4, 3);
  const Matrix P = ConstraintManifold::stacked_stiefel(2, 2).project_point(G);
  for (Index b = 0; b < 2; ++b) {
    const Matrix W = linalg::polar_factor(Matrix(G.middleRows(2 * b, 2).transpose())).transpose();
    EXPECT_LE((P.middleRows(2 * b, 2) - W).norm(), 1e-12);
  }
  EXPECT_EQ(ConstraintManifold::euclidean(4).project_point(G), G);
}

TEST(ProjectPoint, DegenerateInputs) {
  Matrix O = Matrix::Ones(3, 2);
  O.row(1).setZero();
  const auto expect_undefined = [](const ConstraintManifold& c, const Matrix& Y) {
    try {
      c.project_point(Y);
      ADD_FAILURE() << c.key();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ProjectionUndefined) << c.key();
    }
  };
  expect_undefined(ConstraintManifold::oblique(3), O);
  expect_undefined(ConstraintManifold::frobenius_sphere(3), Matrix::Zero(3, 2));
  Matrix B(2, 3);
  B << 1, 2, 3, 2, 4, 6;
  expect_undefined(ConstraintManifold::stacked_stiefel(1, 2), B);
}

TEST(Retract, Examples) {
  Rng rng(9);
  for (const auto& c : kinds()) {
    const Matrix H = c.random_point(3, rng);
    EXPECT_LE((c.retract(H, Matrix::Zero(6, 3)) - H).norm(), 1e-14) << c.key();
  }
  const auto sph = ConstraintManifold::frobenius_sphere(2);
  Matrix e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  EXPECT_LE((sph.retract(e1, e2) - (e1 + e2) / std::sqrt(2.0)).norm(), 1e-15);
  const auto ob = ConstraintManifold::oblique(6);
  const Matrix H = ob.random_point(3, rng);
  const Matrix R = ob.retract(H, ob.project_tangent(H, rng.gaussian(6, 3)));
  EXPECT_LE((R.rowwise().norm().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(Retract, OrthogonalHomogeneity) {
  Rng rng(10);
  for (const auto& c : kinds()) {
    const Matrix H = c.random_point(3, rng);
    const Matrix K = 0.3 * c.project_tangent(H, rng.gaussian(6, 3));
    const Matrix Q = random_orthogonal(3, rng);
    EXPECT_LE((c.retract(H * Q, K * Q) - c.retract(H, K) * Q).norm(), 1e-12) << c.key();
  }
}

TEST(Transport, Examples) {
  Rng rng(11);
  for (const auto& c : kinds()) {
    const Matrix H = c.random_point(3, rng);
    const Matrix K = c.project_tangent(H, rng.gaussian(6, 3));
    const Matrix D = c.project_tangent(H, rng.gaussian(6, 3));
    EXPECT_LE((c.transport(H, Matrix::Zero(6, 3), K) - K).norm(), 1e-13) << c.key();
    const Matrix T = c.transport(H, D, K);
    EXPECT_LE(c.tangent_violation(c.retract(H, D), T), 1e-12) << c.key();
    // linear in K
    const Matrix K2 = c.project_tangent(H, rng.gaussian(6, 3));
    EXPECT_LE((c.transport(H, D, 2 * K - K2) - (2 * T - c.transport(H, D, K2))).norm(), 1e-12) << c.key();
  }
  const auto eu = ConstraintManifold::euclidean(6);
  const Matrix K = rng.gaussian(6, 3);
  EXPECT_EQ(eu.transport(rng.gaussian(6, 3), rng.gaussian(6, 3), K), K);
  const auto sph = ConstraintManifold::frobenius_sphere(6);
  const Matrix Hs = sph.random_point(3, rng);
  const Matrix Ks = sph.project_tangent(Hs, rng.gaussian(6, 3));
  const Matrix Ds = sph.project_tangent(Hs, rng.gaussian(6, 3));
  EXPECT_LE(std::abs(sph.retract(Hs, Ds).cwiseProduct(sph.transport(Hs, Ds, Ks)).sum()), 1e-12);
}

TEST(EhessToRhess, Examples) {
  Rng rng(12);
  const auto eu = ConstraintManifold::euclidean(6);
  const Matrix H = rng.gaussian(6, 3), eta = rng.gaussian(6, 3), he = rng.gaussian(6, 3);
  EXPECT_EQ(eu.ehess_to_rhess(H, rng.gaussian(6, 3), he, eta), he);
  for (const auto& c : kinds()) {
    const Matrix Hc = c.random_point(3, rng);
    const Matrix e = c.project_tangent(Hc, rng.gaussian(6, 3));
    EXPECT_LE((c.ehess_to_rhess(Hc, Matrix::Zero(6, 3), he, e) - c.project_tangent(Hc, he)).norm(), 1e-13) << c.key();
  }
  // f = 1/2 ||X||^2 is constant on the sphere
  const auto sph = ConstraintManifold::frobenius_sphere(6);
  const Matrix Hs = sph.random_point(3, rng);
  const Matrix es = sph.project_tangent(Hs, rng.gaussian(6, 3));
  EXPECT_LE(sph.ehess_to_rhess(Hs, Hs, es, es).norm(), 1e-13);
}

TEST(EhessToRhess, RejectsNonTangent) {
  Rng rng(13);
  const auto ob = ConstraintManifold::oblique(6);
  const Matrix H = ob.random_point(3, rng);
  try {
    ob.ehess_to_rhess(H, rng.gaussian(6, 3), rng.gaussian(6, 3), H);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidTangent);
  }
}

TEST(EhessToRhess, MatchesSecondDerivativeAlongRetraction) {
  Rng rng(14);
  const double h = 1e-4;
  for (const auto& c : kinds()) {
    Quartic f{rng.gaussian(6, 3)};
    const Matrix H = c.random_point(3, rng);
    Matrix eta = c.project_tangent(H, rng.gaussian(6, 3));
    eta /= eta.norm();
    const Matrix hess = c.ehess_to_rhess(H, f.egrad(H), f.ehess(H, eta), eta);
    const double quad = eta.cwiseProduct(hess).sum();
    const double fd = (f.value(c.retract(H, h * eta)) - 2 * f.value(H) + f.value(c.retract(H, -h * eta))) / (h * h);
    EXPECT_LE(std::abs(quad - fd) / std::max(1.0, std::abs(quad)), 1e-4) << c.key();
    // symmetric as a bilinear form
    const Matrix xi = c.project_tangent(H, rng.gaussian(6, 3));
    const double a = xi.cwiseProduct(c.ehess_to_rhess(H, f.egrad(H), f.ehess(H, eta), eta)).sum();
    const double b = eta.cwiseProduct(c.ehess_to_rhess(H, f.egrad(H), f.ehess(H, xi), xi)).sum();
    EXPECT_NEAR(a, b, 1e-12 * (1 + std::abs(a))) << c.key();
  }
}
