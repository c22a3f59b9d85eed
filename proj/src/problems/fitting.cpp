#include <algorithm>
#include <cmath>
#include <numeric>

#include "spacedec/error.h"
#include "spacedec/kernels.h"
#include "spacedec/linalg.h"
#include "spacedec/problems.h"
#include "spacedec/random.h"

namespace spacedec {
namespace {

EntryMask to_mask(std::vector<std::int64_t> linear, Index m) {
  std::sort(linear.begin(), linear.end());  // column-major linear index = CSC order
  EntryMask mask;
  mask.rows.reserve(linear.size());
  mask.cols.reserve(linear.size());
  for (std::int64_t idx : linear) {
    mask.rows.push_back(static_cast<std::int32_t>(idx % m));
    mask.cols.push_back(static_cast<std::int32_t>(idx / m));
  }
  return mask;
}

Vector gather(const Matrix& A, const EntryMask& mask) {
  Vector v(mask.size());
  for (Index k = 0; k < mask.size(); ++k) v(k) = A(mask.rows[k], mask.cols[k]);
  return v;
}

} // namespace

MaskedFittingData make_fitting_data(Index m, Index n, Index r_star, double oversampling,
                                    std::uint64_t seed) {
  if (m <= 0 || n <= 0 || r_star <= 0 || r_star > std::min(m, n))
    throw Error(ErrorCode::InvalidConfig, "fitting: need 0 < r_star <= min(m, n)");
  if (!(oversampling > 0))
    throw Error(ErrorCode::InvalidConfig, "fitting: oversampling must be positive");
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  const auto count = static_cast<std::int64_t>(
      std::llround(oversampling * static_cast<double>(r_star * (m + n - r_star))));
  if (2.0 * static_cast<double>(count) > mn)
    throw Error(ErrorCode::InvalidConfig,
                "fitting: |Omega| = " + std::to_string(count) + " leaves no room for a disjoint test set");
  if (mn > 2147483647.0)
    throw Error(ErrorCode::InvalidConfig, "fitting: matrix too large for 32-bit sampling indices");

  Rng rng(seed);
  MaskedFittingData d;
  d.m = m;
  d.n = n;
  d.r_star = r_star;
  const Matrix U = linalg::qr_orthonormalize(rng.gaussian(m, r_star));
  const Matrix V = linalg::qr_orthonormalize(rng.gaussian(n, r_star));
  Vector sigma(r_star);
  for (Index i = 0; i < r_star; ++i) sigma(i) = rng.uniform();
  const ConstraintManifold ob = ConstraintManifold::oblique(m);
  d.A = ob.project_point(U * sigma.asDiagonal()) * V.transpose();

  // partial Fisher-Yates: first `count` picks train, next `count` test
  const auto total = static_cast<std::int64_t>(mn);
  std::vector<std::int64_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::int64_t{0});
  for (std::int64_t i = 0; i < 2 * count; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(rng.uniform_index(total - i));
    std::swap(perm[i], perm[j]);
  }
  d.omega = to_mask(std::vector<std::int64_t>(perm.begin(), perm.begin() + count), m);
  d.gamma = to_mask(std::vector<std::int64_t>(perm.begin() + count, perm.begin() + 2 * count), m);
  d.A_omega = gather(d.A, d.omega);
  d.A_gamma = gather(d.A, d.gamma);
  return d;
}

FittingObjective::FittingObjective(std::shared_ptr<const MaskedFittingData> data)
    : data_(std::move(data)) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(data_->omega.size());
  for (Index k = 0; k < data_->omega.size(); ++k)
    trip.emplace_back(data_->omega.rows[k], data_->omega.cols[k], 1.0);
  pattern_.resize(data_->m, data_->n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();
  if (pattern_.nonZeros() != data_->omega.size())
    throw Error(ErrorCode::InvalidInput, "fitting: mask has duplicate entries");
}

Vector FittingObjective::sampled(const Factored& X, const EntryMask& mask) const {
  if (X.rows() != data_->m || X.cols() != data_->n)
    throw Error(ErrorCode::InvalidInput, "fitting: point has wrong dimensions");
  const RowMajorMatrix L = X.left;
  const RowMajorMatrix R = X.right;
  Vector out(mask.size());
  kernels::sampled_dot(L.data(), R.data(), L.cols(), mask.rows.data(), mask.cols.data(),
                       mask.size(), out.data());
  return out;
}

SparseMatrix FittingObjective::pattern_matrix(const Vector& values) const {
  // mask entries are stored in CSC order, so slot k of the pattern is entry k
  SparseMatrix S = pattern_;
  std::copy(values.data(), values.data() + values.size(), S.valuePtr());
  return S;
}

double FittingObjective::value(const Factored& X) const {
  return 0.5 * (sampled(X, data_->omega) - data_->A_omega).squaredNorm();
}

AmbientMatrix FittingObjective::egrad(const Factored& X) const {
  return pattern_matrix(sampled(X, data_->omega) - data_->A_omega);
}

std::pair<double, AmbientMatrix> FittingObjective::value_and_egrad(const Factored& X) const {
  const Vector res = sampled(X, data_->omega) - data_->A_omega;
  return {0.5 * res.squaredNorm(), pattern_matrix(res)};
}

AmbientMatrix FittingObjective::ehess(const Factored&, const Factored& eta) const {
  return pattern_matrix(sampled(eta, data_->omega));
}

double FittingObjective::test_error(const Factored& X) const {
  return (sampled(X, data_->gamma) - data_->A_gamma).norm() / data_->A_gamma.norm();
}

MhPoint fitting_start(const MaskedFittingData& data, Index r, double omega, std::uint64_t seed) {
  if (r <= 0 || r > std::min(data.m, data.n))
    throw Error(ErrorCode::InvalidConfig, "fitting: rank parameter out of range");
  Rng rng(seed);
  const ConstraintManifold ob = ConstraintManifold::oblique(data.m);
  Matrix H0;
  if (r <= data.r_star) {
    H0 = rng.gaussian(data.m, r);
  } else {
    std::vector<Index> cols(data.n);
    std::iota(cols.begin(), cols.end(), Index{0});
    H0.resize(data.m, r);
    for (Index j = 0; j < r; ++j) {
      const Index pick = j + rng.uniform_index(data.n - j);
      std::swap(cols[j], cols[pick]);
      H0.col(j) = data.A.col(cols[j]);
    }
  }
  Matrix V = linalg::qr_orthonormalize(rng.gaussian(data.n, r));
  return MhPoint(ob, ob.project_point(H0), std::move(V), omega);
}

} // namespace spacedec
