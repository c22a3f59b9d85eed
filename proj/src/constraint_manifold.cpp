#include "spacedec/constraint_manifold.h"

#include <cmath>
#include <regex>

#include "spacedec/error.h"
#include "spacedec/kernels.h"
#include "spacedec/linalg.h"

namespace spacedec {
namespace {

Vector row_dots(const Matrix& A, const Matrix& B) {
  Vector out(A.rows());
  kernels::row_dots(A.data(), B.data(), A.rows(), A.cols(), out.data());
  return out;
}

} // namespace

ConstraintManifold ConstraintManifold::euclidean(Index m) {
  return ConstraintManifold(ConstraintKind::Euclidean, m, 0, 0);
}

ConstraintManifold ConstraintManifold::oblique(Index m) {
  return ConstraintManifold(ConstraintKind::Oblique, m, m, 1);
}

ConstraintManifold ConstraintManifold::frobenius_sphere(Index m) {
  return ConstraintManifold(ConstraintKind::FrobeniusSphere, m, 1, m);
}

ConstraintManifold ConstraintManifold::stacked_stiefel(Index blocks, Index block_rows) {
  if (blocks <= 0 || block_rows <= 0)
    throw Error(ErrorCode::InvalidInput, "stacked_stiefel: block count and size must be positive");
  return ConstraintManifold(ConstraintKind::StackedStiefel, blocks * block_rows, blocks, block_rows);
}

ConstraintManifold ConstraintManifold::parse(const std::string& key, Index m) {
  if (m <= 0 && key.rfind("stiefel:", 0) != 0)
    throw Error(ErrorCode::InvalidConfig, "constraint '" + key + "' needs a positive row count");
  if (key == "euclidean") return euclidean(m);
  if (key == "oblique") return oblique(m);
  if (key == "fsphere") return frobenius_sphere(m);
  static const std::regex stiefel_re(R"(stiefel:(\d+)x(\d+))");
  std::smatch match;
  if (std::regex_match(key, match, stiefel_re)) {
    const Index k = std::stoll(match[1]);
    const Index p = std::stoll(match[2]);
    if (k <= 0 || p <= 0) throw Error(ErrorCode::InvalidConfig, "stiefel blocks must be positive: " + key);
    if (m > 0 && k * p != m)
      throw Error(ErrorCode::InvalidConfig,
                  key + " describes " + std::to_string(k * p) + " rows, expected " + std::to_string(m));
    return stacked_stiefel(k, p);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown constraint kind '" + key + "'");
}

Index ConstraintManifold::codomain_dim() const {
  switch (kind_) {
  case ConstraintKind::Euclidean: return 0;
  case ConstraintKind::Oblique: return m_;
  case ConstraintKind::FrobeniusSphere: return 1;
  case ConstraintKind::StackedStiefel: return blocks_ * p_ * (p_ + 1) / 2;
  }
  return 0;
}

std::string ConstraintManifold::key() const {
  switch (kind_) {
  case ConstraintKind::Euclidean: return "euclidean";
  case ConstraintKind::Oblique: return "oblique";
  case ConstraintKind::FrobeniusSphere: return "fsphere";
  case ConstraintKind::StackedStiefel:
    return "stiefel:" + std::to_string(blocks_) + "x" + std::to_string(p_);
  }
  return "";
}

void ConstraintManifold::require_nonempty(Index s) const {
  if (kind_ == ConstraintKind::StackedStiefel && p_ > s)
    throw Error(ErrorCode::EmptyManifold, key() + " has no points with " + std::to_string(s) + " columns");
  if ((kind_ == ConstraintKind::Oblique || kind_ == ConstraintKind::FrobeniusSphere) && s == 0 && m_ > 0)
    throw Error(ErrorCode::EmptyManifold, key() + " has no points with zero columns");
}

void ConstraintManifold::check_rows(const Matrix& H, const char* op) const {
  if (H.rows() != m_)
    throw Error(ErrorCode::InvalidInput, std::string(op) + ": expected " + std::to_string(m_) +
                                             " rows, got " + std::to_string(H.rows()));
}

Vector ConstraintManifold::residual(const Matrix& H) const {
  check_rows(H, "residual");
  switch (kind_) {
  case ConstraintKind::Euclidean: return Vector(0);
  case ConstraintKind::Oblique: return row_dots(H, H).array() - 1.0;
  case ConstraintKind::FrobeniusSphere: {
    Vector v(1);
    v(0) = H.squaredNorm() - 1.0;
    return v;
  }
  case ConstraintKind::StackedStiefel: {
    Vector v(codomain_dim());
    Index k = 0;
    for (Index b = 0; b < blocks_; ++b) {
      const auto B = H.middleRows(b * p_, p_);
      const Matrix D = B * B.transpose() - Matrix::Identity(p_, p_);
      for (Index i = 0; i < p_; ++i)
        for (Index j = i; j < p_; ++j) v(k++) = D(i, j);
    }
    return v;
  }
  }
  return Vector(0);
}

double ConstraintManifold::feasibility_violation(const Matrix& H) const {
  const Vector r = residual(H);
  return r.size() == 0 ? 0.0 : r.lpNorm<Eigen::Infinity>();
}

Matrix ConstraintManifold::project_tangent(const Matrix& H, const Matrix& Y) const {
  check_rows(H, "project_tangent");
  if (Y.rows() != H.rows() || Y.cols() != H.cols())
    throw Error(ErrorCode::InvalidInput, "project_tangent: shape mismatch");
  switch (kind_) {
  case ConstraintKind::Euclidean: return Y;
  case ConstraintKind::Oblique: return Y - row_dots(H, Y).asDiagonal() * H;
  case ConstraintKind::FrobeniusSphere: return Y - (H.cwiseProduct(Y).sum()) * H;
  case ConstraintKind::StackedStiefel: {
    Matrix out = Y;
    for (Index b = 0; b < blocks_; ++b) {
      const auto B = H.middleRows(b * p_, p_);
      const auto YB = Y.middleRows(b * p_, p_);
      const Matrix S = linalg::sym_part(YB * B.transpose());
      out.middleRows(b * p_, p_) -= S * B;
    }
    return out;
  }
  }
  return Y;
}

Matrix ConstraintManifold::project_normal(const Matrix& H, const Matrix& Y) const {
  return Y - project_tangent(H, Y);
}

double ConstraintManifold::tangent_violation(const Matrix& H, const Matrix& Y) const {
  return (Y - project_tangent(H, Y)).norm();
}

Matrix ConstraintManifold::shape_apply(const Matrix& H, const Matrix& G, const Matrix& Y) const {
  check_rows(H, "shape_apply");
  switch (kind_) {
  case ConstraintKind::Euclidean: return Matrix::Zero(Y.rows(), Y.cols());
  case ConstraintKind::Oblique: return row_dots(H, G).asDiagonal() * Y;
  case ConstraintKind::FrobeniusSphere: return H.cwiseProduct(G).sum() * Y;
  case ConstraintKind::StackedStiefel: {
    Matrix out(Y.rows(), Y.cols());
    for (Index b = 0; b < blocks_; ++b) {
      const Matrix S = linalg::sym_part(H.middleRows(b * p_, p_) * G.middleRows(b * p_, p_).transpose());
      out.middleRows(b * p_, p_) = S * Y.middleRows(b * p_, p_);
    }
    return out;
  }
  }
  return Y;
}

Matrix ConstraintManifold::project_point(const Matrix& Y) const {
  check_rows(Y, "project_point");
  if (!Y.allFinite()) throw Error(ErrorCode::ProjectionUndefined, "project_point: non-finite input");
  switch (kind_) {
  case ConstraintKind::Euclidean: return Y;
  case ConstraintKind::Oblique: {
    const Vector norms = row_dots(Y, Y).cwiseSqrt();
    for (Index i = 0; i < norms.size(); ++i)
      if (!(norms(i) > 0.0))
        throw Error(ErrorCode::ProjectionUndefined, "project_point: zero row " + std::to_string(i));
    return norms.cwiseInverse().asDiagonal() * Y;
  }
  case ConstraintKind::FrobeniusSphere: {
    const double nrm = Y.norm();
    if (!(nrm > 0.0)) throw Error(ErrorCode::ProjectionUndefined, "project_point: zero matrix");
    return Y / nrm;
  }
  case ConstraintKind::StackedStiefel: {
    require_nonempty(Y.cols());
    Matrix out(Y.rows(), Y.cols());
    for (Index b = 0; b < blocks_; ++b) {
      try {
        out.middleRows(b * p_, p_) =
            linalg::polar_factor(Y.middleRows(b * p_, p_).transpose()).transpose();
      } catch (const Error&) {
        throw Error(ErrorCode::ProjectionUndefined,
                    "project_point: block " + std::to_string(b) + " lacks full row rank");
      }
    }
    return out;
  }
  }
  return Y;
}

Matrix ConstraintManifold::retract(const Matrix& H, const Matrix& K) const {
  return project_point(H + K);
}

Matrix ConstraintManifold::transport(const Matrix& H, const Matrix& K_dir, const Matrix& K) const {
  return project_tangent(retract(H, K_dir), K);
}

Matrix ConstraintManifold::transport_to(const Matrix& H_new, const Matrix& K) const {
  return project_tangent(H_new, K);
}

Matrix ConstraintManifold::ehess_to_rhess(const Matrix& H, const Matrix& egrad,
                                          const Matrix& ehess_eta, const Matrix& eta) const {
  const double violation = tangent_violation(H, eta);
  if (violation > 1e-8)
    throw Error(ErrorCode::InvalidTangent, "ehess_to_rhess: direction leaves the tangent space by " +
                                               std::to_string(violation));
  if (kind_ == ConstraintKind::Euclidean) return ehess_eta;
  return project_tangent(H, ehess_eta - shape_apply(H, egrad, eta));
}

Matrix ConstraintManifold::random_point(Index s, Rng& rng) const {
  require_nonempty(s);
  return project_point(rng.gaussian(m_, s));
}

} // namespace spacedec
