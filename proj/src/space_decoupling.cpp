#include "spacedec/space_decoupling.h"

#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/LU>

#include "spacedec/error.h"
#include "spacedec/linalg.h"

namespace spacedec {
namespace {
std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
} // namespace


MhPoint::MhPoint(ConstraintManifold manifold, Matrix H, Matrix V, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(ErrorCode::InvalidInput, "MhPoint: omega must be positive and finite");
  if (H.rows() != manifold.rows())
    throw Error(ErrorCode::InvalidInput, "MhPoint: H has " + std::to_string(H.rows()) +
                                             " rows, constraint expects " +
                                             std::to_string(manifold.rows()));
  if (H.cols() != V.cols() || V.cols() > V.rows())
    throw Error(ErrorCode::InvalidInput, "MhPoint: H and V must share r <= n columns");
  if (!H.allFinite() || !V.allFinite())
    throw Error(ErrorCode::InvalidInput, "MhPoint: non-finite representation");
  const Index r = V.cols();
  const double orth = (V.transpose() * V - Matrix::Identity(r, r)).norm();
  if (orth > 1e-10)
    throw Error(ErrorCode::InvalidInput, "MhPoint: V is not orthonormal (" + std::to_string(orth) + ")");
  manifold.require_nonempty(r);
  const double feas = manifold.feasibility_violation(H);
  if (feas > 1e-10)
    throw Error(ErrorCode::InfeasiblePoint, "MhPoint: H violates the constraint by " + std::to_string(feas));
  Matrix M = H.transpose() * H;
  M.diagonal().array() += 2.0 * omega;
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidInput, "MhPoint: metric Gram matrix is not positive definite");
  cache_ = std::make_shared<const Cache>(
      Cache{std::move(manifold), std::move(H), std::move(V), omega, std::move(M), std::move(llt)});
}

Matrix MhPoint::solve(const Matrix& B) const { return cache_->llt.solve(B); }

Matrix MhPoint::right_solve(const Matrix& B) const {
  return cache_->llt.solve(B.transpose()).transpose();
}

Matrix MhPoint::apply_G(const Matrix& Y) const { return Y - V() * (V().transpose() * Y); }

Matrix MhPoint::G_dense() const {
  return Matrix::Identity(n(), n()) - V() * V().transpose();
}

MhTangent MhTangent::zero(const MhPoint& p) {
  return {Matrix::Zero(p.m(), p.r()), Matrix::Zero(p.n(), p.r())};
}

MhTangent& MhTangent::operator+=(const MhTangent& o) {
  K += o.K;
  Vp += o.Vp;
  return *this;
}

MhTangent& MhTangent::operator-=(const MhTangent& o) {
  K -= o.K;
  Vp -= o.Vp;
  return *this;
}

MhTangent& MhTangent::operator*=(double a) {
  K *= a;
  Vp *= a;
  return *this;
}

MhTangent operator+(MhTangent a, const MhTangent& b) { return a += b; }
MhTangent operator-(MhTangent a, const MhTangent& b) { return a -= b; }
MhTangent operator*(double a, MhTangent t) { return t *= a; }
MhTangent operator-(MhTangent t) { return t *= -1.0; }

namespace mh {

Index dimension(const ConstraintManifold& manifold, Index n, Index r) {
  return (manifold.rows() + n - r) * r - manifold.codomain_dim();
}

std::pair<Matrix, Matrix> embed(const MhPoint& p) { return {p.X_dense(), p.G_dense()}; }

std::pair<Matrix, Matrix> embed_tangent(const MhPoint& p, const MhTangent& t) {
  Matrix eta = t.K * p.V().transpose() + p.H() * t.Vp.transpose();
  Matrix zeta = -t.Vp * p.V().transpose() - p.V() * t.Vp.transpose();
  return {std::move(eta), std::move(zeta)};
}

Factored eta_factored(const MhPoint& p, const MhTangent& t) {
  Factored f;
  f.left.resize(p.m(), 2 * p.r());
  f.left << t.K, p.H();
  f.right.resize(p.n(), 2 * p.r());
  f.right << p.V(), t.Vp;
  return f;
}

double inner(const MhPoint& p, const MhTangent& a, const MhTangent& b) {
  return a.K.cwiseProduct(b.K).sum() + a.Vp.cwiseProduct(b.Vp * p.M()).sum();
}

double norm(const MhPoint& p, const MhTangent& t) { return std::sqrt(std::max(0.0, inner(p, t, t))); }

double ambient_inner(const std::pair<Matrix, Matrix>& a, const std::pair<Matrix, Matrix>& b,
                     double omega) {
  return a.first.cwiseProduct(b.first).sum() + omega * a.second.cwiseProduct(b.second).sum();
}

double tangent_violation(const MhPoint& p, const MhTangent& t) {
  return std::max(p.manifold().tangent_violation(p.H(), t.K), (p.V().transpose() * t.Vp).norm());
}

MhTangent reproject(const MhPoint& p, const MhTangent& t) {
  if (tangent_violation(p, t) <= 1e-10) return t;
  return {p.manifold().project_tangent(p.H(), t.K), p.apply_G(t.Vp)};
}

MhTangent project_to_tangent(const MhPoint& p, const Matrix& E, const Matrix& Z) {
  MhTangent t;
  t.K = p.manifold().project_tangent(p.H(), E * p.V());
  t.Vp = p.right_solve(p.apply_G(E.transpose() * p.H() - 2.0 * p.omega() * (Z * p.V())));
  return t;
}

MhTangent riemannian_gradient(const MhPoint& p, const AmbientMatrix& egrad) {
  MhTangent g;
  g.K = p.manifold().project_tangent(p.H(), egrad.times(p.V()));
  g.Vp = p.right_solve(p.apply_G(egrad.transpose_times(p.H())));
  return g;
}

MhTangent riemannian_hessian(const MhPoint& p, const AmbientMatrix& egrad,
                             const AmbientMatrix& ehess_eta, const MhTangent& t) {
  const ConstraintManifold& c = p.manifold();
  const Matrix& H = p.H();
  const Matrix& V = p.V();
  const double violation = tangent_violation(p, t);
  if (violation > 1e-8 * std::max(1.0, std::hypot(t.K.norm(), t.Vp.norm())))
    throw Error(ErrorCode::InvalidTangent, "riemannian_hessian: direction leaves the tangent space by " +
                                               format_sci(violation) + " (norm " + format_sci(std::hypot(t.K.norm(), t.Vp.norm())) + ", K " + format_sci(p.manifold().tangent_violation(p.H(), t.K)) + ")");
  const Matrix egrad_V = egrad.times(V);
  // W = I - H M^{-1} H^T
  const auto apply_W = [&](const Matrix& Y) -> Matrix { return Y - H * p.solve(H.transpose() * Y); };

  MhTangent out;
  out.K = c.project_tangent(H, ehess_eta.times(V) - c.shape_apply(H, egrad_V, t.K) +
                                   apply_W(egrad.times(t.Vp)));
  const Matrix normal_H = c.shape_apply(H, egrad_V, H);  // P_N(egrad V) = S H
  const Matrix inner = -t.Vp * (normal_H.transpose() * H) + ehess_eta.transpose_times(H) +
                       egrad.transpose_times(apply_W(t.K));
  out.Vp = p.right_solve(p.apply_G(inner));
  return out;
}

Matrix stiefel_retract_polar(const Matrix& V, const Matrix& Vp) {
  return linalg::polar_factor(V + Vp);
}

Matrix cayley_apply(const Matrix& V, const Matrix& Vp, const Matrix& Y) {
  // Pi = (I - W/2)^{-1} (I + W/2) with W = A B^T - B A^T, A = (I - V V^T / 2) Vp,
  // B = V; W = U C^T for U = [A, -B], C = [B, A], inverted by Woodbury.
  const Index n = V.rows(), r = V.cols();
  const Matrix A = Vp - 0.5 * V * (V.transpose() * Vp);
  Matrix U(n, 2 * r), C(n, 2 * r);
  U << A, -V;
  C << V, A;
  const Matrix y = Y + 0.5 * U * (C.transpose() * Y);
  Matrix core = Matrix::Identity(2 * r, 2 * r) - 0.5 * C.transpose() * U;
  Eigen::PartialPivLU<Matrix> lu(core);
  const double rc = lu.rcond();
  if (!(rc > 1e-14))
    throw Error(ErrorCode::CayleySingular, "cayley: I - W/2 is numerically singular (rcond " +
                                               std::to_string(rc) + ")");
  Matrix out = y + 0.5 * U * lu.solve(C.transpose() * y);
  if (!out.allFinite()) throw Error(ErrorCode::CayleySingular, "cayley: non-finite result");
  return out;
}

Matrix stiefel_retract_cayley(const Matrix& V, const Matrix& Vp) { return cayley_apply(V, Vp, V); }

namespace {

bool is_zero(const MhTangent& t) { return t.K.isZero(0.0) && t.Vp.isZero(0.0); }

} // namespace

MhPoint retract_first_order(const MhPoint& p, const MhTangent& t, StiefelRule rule) {
  if (is_zero(t)) return p;
  Matrix H = p.manifold().retract(p.H(), t.K);
  Matrix V = rule == StiefelRule::Polar ? stiefel_retract_polar(p.V(), t.Vp)
                                        : stiefel_retract_cayley(p.V(), t.Vp);
  return MhPoint(p.manifold(), std::move(H), std::move(V), p.omega());
}

MhPoint retract_second_order(const MhPoint& p, const MhTangent& t) {
  if (is_zero(t)) return p;
  const Matrix& H = p.H();
  const Matrix& V = p.V();
  const Index r = p.r();
  // L = V + Vp (I - K^T H M^{-1})
  const Matrix L = V + t.Vp * (Matrix::Identity(r, r) - p.right_solve(t.K.transpose() * H));
  Matrix W = linalg::polar_factor(L);
  // (X + eta) W = (H + K)(V^T W) + H (Vp^T W)
  const Matrix XW = (H + t.K) * (V.transpose() * W) + H * (t.Vp.transpose() * W);
  Matrix Hn = p.manifold().project_point(XW);
  return MhPoint(p.manifold(), std::move(Hn), std::move(W), p.omega());
}

MhPoint retract(const MhPoint& p, const MhTangent& t, RetractionChoice choice) {
  return choice == RetractionChoice::FirstOrder ? retract_first_order(p, t)
                                                : retract_second_order(p, t);
}

MhTangent transport_projection(const MhPoint& p, const MhPoint& target, const MhTangent& t) {
  const Matrix& Ht = target.H();
  const Matrix& Vt = target.V();
  const Matrix VtV = p.V().transpose() * Vt;
  const Matrix VptV = t.Vp.transpose() * Vt;
  MhTangent out;
  out.K = target.manifold().project_tangent(Ht, t.K * VtV + p.H() * VptV);
  const Matrix inner = p.V() * (t.K.transpose() * Ht) + t.Vp * (p.H().transpose() * Ht) +
                       2.0 * p.omega() * (p.V() * VptV + t.Vp * VtV);
  out.Vp = target.right_solve(target.apply_G(inner));
  return out;
}

MhTangent transport_projection(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t,
                               RetractionChoice retraction) {
  return transport_projection(p, retract(p, t_dir, retraction), t);
}

MhTangent transport_decoupled(const MhPoint& p, const MhPoint& target, const MhTangent& t) {
  (void)p;
  MhTangent out;
  out.K = target.manifold().transport_to(target.H(), t.K);
  // Projection transport on St(n, r) followed by the horizontal projection
  // collapses to (I - Vt Vt^T) Vp.
  out.Vp = target.apply_G(t.Vp);
  return out;
}

MhTangent transport_decoupled(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t,
                              RetractionChoice retraction) {
  return transport_decoupled(p, retract(p, t_dir, retraction), t);
}

IsometricTransport transport_isometric(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t) {
  const ConstraintManifold& c = p.manifold();
  Matrix Ht = c.retract(p.H(), t_dir.K);
  Matrix Vt = stiefel_retract_cayley(p.V(), t_dir.Vp);
  MhPoint target(c, std::move(Ht), std::move(Vt), p.omega());
  MhTangent out;
  out.K = c.transport_to(target.H(), t.K);
  out.Vp = cayley_apply(p.V(), t_dir.Vp, t.Vp * linalg::spd_sqrt(p.M())) *
           linalg::spd_inv_sqrt(target.M());
  const bool guaranteed = c.kind() == ConstraintKind::Euclidean;
  return {std::move(target), std::move(out), guaranteed};
}

TransportResult transport(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t,
                          RetractionChoice retraction, TransportChoice choice) {
  switch (choice) {
  case TransportChoice::Projection: {
    MhPoint target = retract(p, t_dir, retraction);
    MhTangent out = transport_projection(p, target, t);
    return {std::move(target), std::move(out)};
  }
  case TransportChoice::Decoupled: {
    MhPoint target = retract(p, t_dir, retraction);
    MhTangent out = transport_decoupled(p, target, t);
    return {std::move(target), std::move(out)};
  }
  case TransportChoice::Isometric: {
    IsometricTransport it = transport_isometric(p, t_dir, t);
    return {std::move(it.target), std::move(it.tangent)};
  }
  }
  throw Error(ErrorCode::InvalidInput, "transport: unknown rule");
}

MhPoint random_point(const ConstraintManifold& manifold, Index n, Index r, double omega,
                     std::uint64_t seed) {
  if (r < 0 || r > std::min(manifold.rows(), n))
    throw Error(ErrorCode::InvalidInput, "random_point: need r <= min(m, n)");
  manifold.require_nonempty(r);
  Rng rng(seed);
  Matrix H = manifold.random_point(r, rng);
  Matrix V = linalg::qr_orthonormalize(rng.gaussian(n, r));
  return MhPoint(manifold, std::move(H), std::move(V), omega);
}

MhTangent random_tangent(const MhPoint& p, Rng& rng) {
  MhTangent t;
  t.K = p.manifold().project_tangent(p.H(), rng.gaussian(p.m(), p.r()));
  t.Vp = p.apply_G(rng.gaussian(p.n(), p.r()));
  return t;
}

StationarityCheck check_first_order_stationary(const MhPoint& p, const AmbientMatrix& egrad,
                                               double tol) {
  const double res = norm(p, riemannian_gradient(p, egrad));
  return {res <= tol, res};
}

} // namespace mh

} // namespace spacedec
