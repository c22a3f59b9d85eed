#include <cmath>
#include <limits>
#include <set>

#include <Eigen/QR>

#include "spacedec/error.h"
#include "spacedec/problems.h"
#include "spacedec/random.h"

namespace spacedec {

SparseMatrix adjacency_from_edges(Index nodes, const std::vector<std::pair<Index, Index>>& edges) {
  std::set<std::pair<Index, Index>> unique;
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= nodes || v >= nodes)
      throw Error(ErrorCode::InvalidInput, "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                               ") out of range");
    unique.insert({u, v});
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& [u, v] : unique) trip.emplace_back(u, v, 1.0);
  SparseMatrix A(nodes, nodes);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

SparseMatrix cycle_graph(Index nodes) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < nodes; ++i) edges.emplace_back(i, (i + 1) % nodes);
  return adjacency_from_edges(nodes, edges);
}

SparseMatrix binomial_graph(Index nodes, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < nodes; ++i)
    for (Index j = 0; j < nodes; ++j)
      if (i != j && rng.uniform() < p) edges.emplace_back(i, j);
  return adjacency_from_edges(nodes, edges);
}

Matrix graph_similarity_operator(const GraphPair& g, const Matrix& X) {
  if (g.A.rows() != g.A.cols() || g.B.rows() != g.B.cols() || X.rows() != g.A.rows() ||
      X.cols() != g.B.rows())
    throw Error(ErrorCode::InvalidInput, "graph_similarity_operator: dimension mismatch");
  const SparseMatrix Bt = g.B.transpose();
  const SparseMatrix At = g.A.transpose();
  Matrix out = (g.A * X) * Bt;
  out += (At * X) * g.B;
  return out;
}

GraphSimilarityObjective::GraphSimilarityObjective(GraphPair graphs) : graphs_(std::move(graphs)) {
  if (graphs_.A.rows() != graphs_.A.cols() || graphs_.B.rows() != graphs_.B.cols())
    throw Error(ErrorCode::InvalidInput, "graph similarity: adjacency matrices must be square");
}

// <X, L(L(X))> = ||L(X)||^2 since L is self-adjoint.
double GraphSimilarityObjective::value(const Factored& X) const {
  return -graph_similarity_operator(graphs_, X.dense()).squaredNorm();
}

AmbientMatrix GraphSimilarityObjective::egrad(const Factored& X) const {
  return value_and_egrad(X).second;
}

std::pair<double, AmbientMatrix> GraphSimilarityObjective::value_and_egrad(const Factored& X) const {
  const Matrix LX = graph_similarity_operator(graphs_, X.dense());
  Matrix g = -2.0 * graph_similarity_operator(graphs_, LX);
  return {-LX.squaredNorm(), AmbientMatrix(std::move(g))};
}

AmbientMatrix GraphSimilarityObjective::ehess(const Factored&, const Factored& eta) const {
  Matrix h = -2.0 * graph_similarity_operator(graphs_, graph_similarity_operator(graphs_, eta.dense()));
  return AmbientMatrix(std::move(h));
}

BlondelResult blondel_similarity(const GraphPair& g, int max_even_steps, double tol) {
  const Index m = g.A.rows(), n = g.B.rows();
  Matrix X = Matrix::Constant(m, n, 1.0 / std::sqrt(static_cast<double>(m) * static_cast<double>(n)));
  const auto step = [&](const Matrix& Y) {
    Matrix LY = graph_similarity_operator(g, Y);
    const double nrm = LY.norm();
    if (!(nrm > 0.0)) throw Error(ErrorCode::DegenerateGraphs, "blondel: L(X) vanished");
    return Matrix(LY / nrm);
  };
  BlondelResult res;
  res.last_change = std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_even_steps; ++k) {
    Matrix next = step(step(X));
    res.last_change = (next - X).norm();
    X = std::move(next);
    res.even_steps = k + 1;
    if (res.last_change <= tol) {
      res.converged = true;
      break;
    }
  }
  if (max_even_steps <= 0) step(X);  // still reports degenerate graphs
  res.X = std::move(X);
  return res;
}

MhPoint graph_similarity_start(Index m, Index n, Index r, double omega) {
  if (r <= 0 || r > std::min(m, n))
    throw Error(ErrorCode::InvalidConfig, "graph similarity: rank parameter out of range");
  Matrix H = Matrix::Zero(m, r);
  H.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(m)));
  const Vector ones = Vector::Ones(n);
  Eigen::HouseholderQR<Matrix> qr{Matrix(ones)};
  Matrix V = qr.householderQ() * Matrix::Identity(n, r);
  if (V(0, 0) < 0) V = -V;
  return MhPoint(ConstraintManifold::frobenius_sphere(m), std::move(H), std::move(V), omega);
}

} // namespace spacedec
