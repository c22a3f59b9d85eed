#include <algorithm>
#include <numeric>
#include <set>

#include <Eigen/Geometry>

#include "spacedec/error.h"
#include "spacedec/linalg.h"
#include "spacedec/problems.h"
#include "spacedec/random.h"

namespace spacedec {
namespace {

Matrix random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

bool connected(Index nodes, const std::vector<std::pair<Index, Index>>& edges) {
  std::vector<Index> parent(nodes);
  std::iota(parent.begin(), parent.end(), Index{0});
  const auto find = [&](Index a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  Index components = nodes;
  for (const auto& [u, v] : edges) {
    const Index a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

SynchronizationData assemble(Index cams, std::vector<std::pair<Index, Index>> edges,
                             std::vector<Matrix> truth, double sigma, Rng& rng) {
  SynchronizationData d;
  d.cams = cams;
  d.truth = std::move(truth);
  d.edges = std::move(edges);
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& [i, j] : d.edges) {
    const Eigen::Vector3d w(sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal());
    Matrix Rhat = d.truth[j] * d.truth[i].transpose() * so3_exp(w);
    const Matrix Cij = -Rhat.transpose();
    for (Index a = 0; a < 3; ++a)
      for (Index b = 0; b < 3; ++b) trip.emplace_back(3 * i + a, 3 * j + b, Cij(a, b));
    d.measurements.push_back(std::move(Rhat));
  }
  d.C.resize(3 * cams, 3 * cams);
  d.C.setFromTriplets(trip.begin(), trip.end());
  d.C.makeCompressed();
  return d;
}

} // namespace

Matrix so3_exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  if (theta == 0.0) return Matrix::Identity(3, 3);
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

SynchronizationData make_synchronization_data(Index cams, Index edges, double noise_sigma,
                                              std::uint64_t seed) {
  const Index max_edges = cams * (cams - 1) / 2;
  if (cams < 2 || edges < cams - 1 || edges > max_edges)
    throw Error(ErrorCode::InvalidConfig, "sync: need cams - 1 <= edges <= cams (cams - 1) / 2");
  if (!(noise_sigma >= 0)) throw Error(ErrorCode::InvalidConfig, "sync: noise must be nonnegative");
  Rng rng(seed);
  std::vector<Matrix> truth;
  for (Index i = 0; i < cams; ++i) truth.push_back(random_rotation(rng));
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::set<std::pair<Index, Index>> chosen;
    while (static_cast<Index>(chosen.size()) < edges) {
      Index i = rng.uniform_index(cams), j = rng.uniform_index(cams);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      chosen.insert({i, j});
    }
    std::vector<std::pair<Index, Index>> list(chosen.begin(), chosen.end());
    if (connected(cams, list)) return assemble(cams, std::move(list), std::move(truth), noise_sigma, rng);
  }
  throw Error(ErrorCode::InvalidConfig, "sync: could not sample a connected measurement graph");
}

SynchronizationData make_synchronization_data_p(Index cams, double connectivity_p,
                                                double noise_sigma, std::uint64_t seed) {
  if (cams < 2 || !(connectivity_p > 0 && connectivity_p <= 1))
    throw Error(ErrorCode::InvalidConfig, "sync: need cams >= 2 and 0 < p <= 1");
  Rng rng(seed);
  std::vector<Matrix> truth;
  for (Index i = 0; i < cams; ++i) truth.push_back(random_rotation(rng));
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<std::pair<Index, Index>> list;
    for (Index i = 0; i < cams; ++i)
      for (Index j = i + 1; j < cams; ++j)
        if (rng.uniform() < connectivity_p) list.emplace_back(i, j);
    if (connected(cams, list)) return assemble(cams, std::move(list), std::move(truth), noise_sigma, rng);
  }
  throw Error(ErrorCode::InvalidConfig, "sync: could not sample a connected measurement graph");
}

SynchronizationObjective::SynchronizationObjective(std::shared_ptr<const SynchronizationData> data)
    : data_(std::move(data)) {
  Csym_ = data_->C + SparseMatrix(data_->C.transpose());
}

double SynchronizationObjective::value(const Factored& X) const {
  // <C, X X^T> = sum((C X) .* X)
  const Matrix Xd = X.dense();
  return (data_->C * Xd).cwiseProduct(Xd).sum();
}

AmbientMatrix SynchronizationObjective::egrad(const Factored& X) const {
  return AmbientMatrix(Matrix(Csym_ * X.dense()));
}

AmbientMatrix SynchronizationObjective::ehess(const Factored&, const Factored& eta) const {
  return AmbientMatrix(Matrix(Csym_ * eta.dense()));
}

std::vector<Matrix> recovered_rotations(const MhPoint& x) {
  const Index cams = x.m() / 3;
  std::vector<Matrix> out;
  for (Index i = 0; i < cams; ++i) out.push_back(x.H().middleRows(3 * i, 3));
  return out;
}

std::vector<double> edge_errors(const SynchronizationData& data, const std::vector<Matrix>& rotations) {
  std::vector<double> err;
  for (std::size_t e = 0; e < data.edges.size(); ++e) {
    const auto [i, j] = data.edges[e];
    err.push_back((rotations[j] * rotations[i].transpose() - data.measurements[e]).norm());
  }
  return err;
}

MhPoint synchronization_truth_point(const SynchronizationData& data, double omega) {
  Matrix H(3 * data.cams, 3);
  for (Index i = 0; i < data.cams; ++i) H.middleRows(3 * i, 3) = data.truth[i];
  Matrix V = Matrix::Identity(3 * data.cams, 3);
  return MhPoint(ConstraintManifold::stacked_stiefel(data.cams, 3), std::move(H), std::move(V), omega);
}

MhPoint synchronization_start(const SynchronizationData& data, double omega, std::uint64_t seed) {
  Rng rng(seed);
  Matrix H(3 * data.cams, 3);
  for (Index i = 0; i < data.cams; ++i) H.middleRows(3 * i, 3) = random_rotation(rng);
  Matrix V = linalg::qr_orthonormalize(rng.gaussian(3 * data.cams, 3));
  return MhPoint(ConstraintManifold::stacked_stiefel(data.cams, 3), std::move(H), std::move(V), omega);
}

} // namespace spacedec
