#pragma once

#include <string>

#include "spacedec/random.h"
#include "spacedec/types.h"

namespace spacedec {

enum class ConstraintKind { Euclidean, Oblique, FrobeniusSphere, StackedStiefel };

// Geometry of an orthogonally invariant level set H in R^{m x n} and of its
// induced manifolds H^s in R^{m x s}. Every operation accepts any column
// count s, so the same descriptor serves the reduced factor H and the full
// matrix X.
class ConstraintManifold {
public:
  static ConstraintManifold euclidean(Index m);
  static ConstraintManifold oblique(Index m);
  static ConstraintManifold frobenius_sphere(Index m);
  static ConstraintManifold stacked_stiefel(Index blocks, Index block_rows);
  // "euclidean" | "oblique" | "fsphere" | "stiefel:<k>x<p>"; m must agree with k*p
  static ConstraintManifold parse(const std::string& key, Index m);

  ConstraintKind kind() const { return kind_; }
  Index rows() const { return m_; }
  Index blocks() const { return blocks_; }
  Index block_rows() const { return p_; }
  Index codomain_dim() const;
  std::string key() const;

  // Throws EmptyManifold when H^s has no points (stacked Stiefel with p > s).
  void require_nonempty(Index s) const;

  Vector residual(const Matrix& H) const;
  double feasibility_violation(const Matrix& H) const;

  Matrix project_tangent(const Matrix& H, const Matrix& Y) const;
  Matrix project_normal(const Matrix& H, const Matrix& Y) const;
  double tangent_violation(const Matrix& H, const Matrix& Y) const;

  // For a normal-space representative N = S H, applies the symmetric
  // left multiplier S(H, G) of the normal part of G to Y.
  Matrix shape_apply(const Matrix& H, const Matrix& G, const Matrix& Y) const;

  Matrix project_point(const Matrix& Y) const;
  Matrix retract(const Matrix& H, const Matrix& K) const;
  Matrix transport(const Matrix& H, const Matrix& K_dir, const Matrix& K) const;
  Matrix transport_to(const Matrix& H_new, const Matrix& K) const;

  Matrix ehess_to_rhess(const Matrix& H, const Matrix& egrad, const Matrix& ehess_eta,
                        const Matrix& eta) const;

  // Random feasible point of H^s drawn from a Gaussian and projected.
  Matrix random_point(Index s, Rng& rng) const;

private:
  ConstraintManifold(ConstraintKind kind, Index m, Index blocks, Index p)
      : kind_(kind), m_(m), blocks_(blocks), p_(p) {}
  void check_rows(const Matrix& H, const char* op) const;

  ConstraintKind kind_;
  Index m_;
  Index blocks_;
  Index p_;
};

} // namespace spacedec
