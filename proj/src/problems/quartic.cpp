#include <cmath>

#include "spacedec/problems.h"
#include "spacedec/random.h"

namespace spacedec {

QuarticObjective::QuarticObjective(Index m, Index n, std::uint64_t seed) {
  Rng rng(seed);
  P_ = rng.gaussian(m, m) / std::sqrt(static_cast<double>(m));
  Q_ = rng.gaussian(n, n) / std::sqrt(static_cast<double>(n));
  B_ = rng.gaussian(m, n) / std::sqrt(static_cast<double>(m * n));
}

double QuarticObjective::value(const Factored& X) const {
  const Matrix Xd = X.dense();
  return 0.5 * (P_ * Xd * Q_ - B_).squaredNorm() + Xd.array().pow(4).sum() / 12.0;
}

AmbientMatrix QuarticObjective::egrad(const Factored& X) const {
  const Matrix Xd = X.dense();
  Matrix g = P_.transpose() * (P_ * Xd * Q_ - B_) * Q_.transpose();
  g.array() += Xd.array().cube() / 3.0;
  return AmbientMatrix(std::move(g));
}

AmbientMatrix QuarticObjective::ehess(const Factored& X, const Factored& eta) const {
  const Matrix Xd = X.dense();
  const Matrix E = eta.dense();
  Matrix h = P_.transpose() * (P_ * E * Q_) * Q_.transpose();
  h.array() += Xd.array().square() * E.array();
  return AmbientMatrix(std::move(h));
}

} // namespace spacedec
