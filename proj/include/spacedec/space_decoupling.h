#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include <Eigen/Cholesky>

#include "spacedec/ambient.h"
#include "spacedec/constraint_manifold.h"

namespace spacedec {

// Point (X, G) = (H V^T, I - V V^T) of M_h stored through (H, V), together
// with the weight omega and a Cholesky factorization of
// M = 2 omega I + H^T H.
class MhPoint {
public:
  MhPoint(ConstraintManifold manifold, Matrix H, Matrix V, double omega);

  const ConstraintManifold& manifold() const { return cache_->manifold; }
  const Matrix& H() const { return cache_->H; }
  const Matrix& V() const { return cache_->V; }
  double omega() const { return cache_->omega; }
  Index m() const { return H().rows(); }
  Index n() const { return V().rows(); }
  Index r() const { return V().cols(); }

  const Matrix& M() const { return cache_->M; }
  // M^{-1} B
  Matrix solve(const Matrix& B) const;
  // B M^{-1}
  Matrix right_solve(const Matrix& B) const;
  // (I - V V^T) Y
  Matrix apply_G(const Matrix& Y) const;

  Factored X() const { return {H(), V()}; }
  Matrix X_dense() const { return H() * V().transpose(); }
  Matrix G_dense() const;

private:
  struct Cache {
    ConstraintManifold manifold;
    Matrix H;
    Matrix V;
    double omega;
    Matrix M;
    Eigen::LLT<Matrix> llt;
  };
  std::shared_ptr<const Cache> cache_;
};

struct MhTangent {
  Matrix K;   // m x r, tangent to H^r at H
  Matrix Vp;  // n x r, V^T Vp = 0

  static MhTangent zero(const MhPoint& p);
  MhTangent& operator+=(const MhTangent& o);
  MhTangent& operator-=(const MhTangent& o);
  MhTangent& operator*=(double a);
};

MhTangent operator+(MhTangent a, const MhTangent& b);
MhTangent operator-(MhTangent a, const MhTangent& b);
MhTangent operator*(double a, MhTangent t);
MhTangent operator-(MhTangent t);

enum class StiefelRule { Polar, Cayley };
enum class RetractionChoice { FirstOrder, SecondOrder };
enum class TransportChoice { Projection, Decoupled, Isometric };

namespace mh {

// Dimension (m + n - r) r - q of M_h.
Index dimension(const ConstraintManifold& manifold, Index n, Index r);

std::pair<Matrix, Matrix> embed(const MhPoint& p);
// (eta, zeta) = (K V^T + H Vp^T, -Vp V^T - V Vp^T)
std::pair<Matrix, Matrix> embed_tangent(const MhPoint& p, const MhTangent& t);
// eta = [K H] [V Vp]^T
Factored eta_factored(const MhPoint& p, const MhTangent& t);

double inner(const MhPoint& p, const MhTangent& a, const MhTangent& b);
double norm(const MhPoint& p, const MhTangent& t);
// <eta1, eta2> + omega <zeta1, zeta2>
double ambient_inner(const std::pair<Matrix, Matrix>& a, const std::pair<Matrix, Matrix>& b,
                     double omega);

double tangent_violation(const MhPoint& p, const MhTangent& t);
// Removes drift when the invariant residual exceeds 1e-10.
MhTangent reproject(const MhPoint& p, const MhTangent& t);

MhTangent project_to_tangent(const MhPoint& p, const Matrix& E, const Matrix& Z);

MhTangent riemannian_gradient(const MhPoint& p, const AmbientMatrix& egrad);
MhTangent riemannian_hessian(const MhPoint& p, const AmbientMatrix& egrad,
                             const AmbientMatrix& ehess_eta, const MhTangent& t);

MhPoint retract_first_order(const MhPoint& p, const MhTangent& t,
                            StiefelRule rule = StiefelRule::Polar);
MhPoint retract_second_order(const MhPoint& p, const MhTangent& t);
MhPoint retract(const MhPoint& p, const MhTangent& t, RetractionChoice choice);

// Stiefel pieces used by the assembled maps.
Matrix stiefel_retract_polar(const Matrix& V, const Matrix& Vp);
Matrix cayley_apply(const Matrix& V, const Matrix& Vp, const Matrix& Y);
Matrix stiefel_retract_cayley(const Matrix& V, const Matrix& Vp);

// Transports carrying t from p to target = retract(p, t_dir).
MhTangent transport_projection(const MhPoint& p, const MhPoint& target, const MhTangent& t);
MhTangent transport_projection(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t,
                               RetractionChoice retraction);
MhTangent transport_decoupled(const MhPoint& p, const MhPoint& target, const MhTangent& t);
MhTangent transport_decoupled(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t,
                              RetractionChoice retraction);

struct IsometricTransport {
  MhPoint target;       // (R^H(K_dir), Cayley(V, Vp_dir))
  MhTangent tangent;
  bool isometry_guaranteed;  // true only when the constraint transport is isometric
};
IsometricTransport transport_isometric(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t);

struct TransportResult {
  MhPoint target;
  MhTangent tangent;
};
// Retracts along t_dir and carries t to the new point with the chosen rule.
// The isometric rule moves V with the Cayley retraction regardless of
// `retraction`.
TransportResult transport(const MhPoint& p, const MhTangent& t_dir, const MhTangent& t,
                          RetractionChoice retraction, TransportChoice choice);

MhPoint random_point(const ConstraintManifold& manifold, Index n, Index r, double omega,
                     std::uint64_t seed);
MhTangent random_tangent(const MhPoint& p, Rng& rng);

struct StationarityCheck {
  bool stationary;
  double residual;
};
StationarityCheck check_first_order_stationary(const MhPoint& p, const AmbientMatrix& egrad,
                                               double tol);

} // namespace mh

} // namespace spacedec
