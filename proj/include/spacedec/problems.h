#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "spacedec/objective.h"
#include "spacedec/space_decoupling.h"

namespace spacedec {

// ---- spherical data fitting ------------------------------------------------

struct EntryMask {
  std::vector<std::int32_t> rows;
  std::vector<std::int32_t> cols;
  Index size() const { return static_cast<Index>(rows.size()); }
};

struct MaskedFittingData {
  Index m = 0, n = 0, r_star = 0;
  Matrix A;       // rows on the unit sphere, rank r_star
  EntryMask omega;  // training entries, sorted column-major
  EntryMask gamma;  // test entries, disjoint from omega
  Vector A_omega;
  Vector A_gamma;
};

MaskedFittingData make_fitting_data(Index m, Index n, Index r_star, double oversampling,
                                    std::uint64_t seed);

// f(X) = 1/2 ||P_Omega(X - A)||^2 evaluated on the sampled pattern only.
class FittingObjective : public Objective {
public:
  explicit FittingObjective(std::shared_ptr<const MaskedFittingData> data);

  Index rows() const override { return data_->m; }
  Index cols() const override { return data_->n; }
  std::string name() const override { return "fitting"; }
  double value(const Factored& X) const override;
  AmbientMatrix egrad(const Factored& X) const override;
  std::pair<double, AmbientMatrix> value_and_egrad(const Factored& X) const override;
  AmbientMatrix ehess(const Factored& X, const Factored& eta) const override;

  // ||P_Gamma(X - A)|| / ||P_Gamma A||
  double test_error(const Factored& X) const;
  const MaskedFittingData& data() const { return *data_; }

private:
  Vector sampled(const Factored& X, const EntryMask& mask) const;
  SparseMatrix pattern_matrix(const Vector& values) const;

  std::shared_ptr<const MaskedFittingData> data_;
  SparseMatrix pattern_;                  // Omega in CSC order
  std::vector<Index> value_slot_;         // mask entry k -> pattern_.valuePtr() slot
};

// Start recipe: r = r*: Gaussian H projected to the constraint; r > r*:
// r random columns of A, row-normalized. V is a random orthonormal basis.
MhPoint fitting_start(const MaskedFittingData& data, Index r, double omega, std::uint64_t seed);

// ---- graph similarity ------------------------------------------------------

struct GraphPair {
  SparseMatrix A;  // m x m adjacency
  SparseMatrix B;  // n x n adjacency
};

SparseMatrix adjacency_from_edges(Index nodes, const std::vector<std::pair<Index, Index>>& edges);
SparseMatrix cycle_graph(Index nodes);
SparseMatrix binomial_graph(Index nodes, double p, std::uint64_t seed);

// L(X) = A X B^T + A^T X B
Matrix graph_similarity_operator(const GraphPair& g, const Matrix& X);

// f(X) = -<X, L(L(X))>
class GraphSimilarityObjective : public Objective {
public:
  explicit GraphSimilarityObjective(GraphPair graphs);

  Index rows() const override { return graphs_.A.rows(); }
  Index cols() const override { return graphs_.B.rows(); }
  std::string name() const override { return "graphsim"; }
  double value(const Factored& X) const override;
  AmbientMatrix egrad(const Factored& X) const override;
  std::pair<double, AmbientMatrix> value_and_egrad(const Factored& X) const override;
  AmbientMatrix ehess(const Factored& X, const Factored& eta) const override;

  const GraphPair& graphs() const { return graphs_; }

private:
  GraphPair graphs_;
};

struct BlondelResult {
  Matrix X;
  int even_steps = 0;
  double last_change = 0.0;  // ||X_{2k+2} - X_{2k}||
  bool converged = false;
};

// Even iterates of X <- L(X) / ||L(X)|| from 1 1^T / sqrt(mn); stops at
// `max_even_steps` or when consecutive even iterates differ by <= tol.
BlondelResult blondel_similarity(const GraphPair& g, int max_even_steps, double tol = 1e-12);

// X0 = 1 1^T / sqrt(mn) represented with H = [1/sqrt(m), 0...] and
// V = [1/sqrt(n), orthonormal completion].
MhPoint graph_similarity_start(Index m, Index n, Index r, double omega);

// ---- rotation synchronization ---------------------------------------------

struct SynchronizationData {
  Index cams = 0;
  std::vector<Matrix> truth;                       // R_i
  std::vector<std::pair<Index, Index>> edges;      // (i, j), i < j
  std::vector<Matrix> measurements;                // R_hat_ij ~ R_j R_i^T
  SparseMatrix C;                                  // block (i, j) = -R_hat_ij^T
};

Matrix so3_exp(const Eigen::Vector3d& w);

// Exactly `edges` distinct pairs, resampled until the graph is connected.
SynchronizationData make_synchronization_data(Index cams, Index edges, double noise_sigma,
                                              std::uint64_t seed);
// Each pair with probability p.
SynchronizationData make_synchronization_data_p(Index cams, double connectivity_p,
                                                double noise_sigma, std::uint64_t seed);

// f(X) = <C, X X^T> on stiefel:cams x 3 with r = 3.
class SynchronizationObjective : public Objective {
public:
  explicit SynchronizationObjective(std::shared_ptr<const SynchronizationData> data);

  Index rows() const override { return 3 * data_->cams; }
  Index cols() const override { return 3 * data_->cams; }
  std::string name() const override { return "sync"; }
  double value(const Factored& X) const override;
  AmbientMatrix egrad(const Factored& X) const override;
  AmbientMatrix ehess(const Factored& X, const Factored& eta) const override;

  const SynchronizationData& data() const { return *data_; }

private:
  std::shared_ptr<const SynchronizationData> data_;
  SparseMatrix Csym_;  // C + C^T
};

// Rotations read off the row blocks of X V = H.
std::vector<Matrix> recovered_rotations(const MhPoint& x);
// ||R_j R_i^T - R_hat_ij||_F per edge.
std::vector<double> edge_errors(const SynchronizationData& data, const std::vector<Matrix>& rotations);
// Ground truth as a point: H blocks R_i, V = first three identity columns.
MhPoint synchronization_truth_point(const SynchronizationData& data, double omega);
MhPoint synchronization_start(const SynchronizationData& data, double omega, std::uint64_t seed);

// ---- Markov aggregation (Hadamard parameterization) -----------------------

struct MarkovData {
  Index states = 0, r_star = 0;
  Matrix Y;      // nonnegative, oblique, rank r_star; P = Y .* Y
  Matrix P;
  Matrix P_hat;  // empirical estimate
};

// samples_per_row = 0 gives P_hat = P.
MarkovData make_markov_data(Index states, Index r_star, Index samples_per_row, std::uint64_t seed);

// f(X) = 1/2 ||X .* X - P_hat||^2 on the oblique manifold.
class MarkovObjective : public Objective {
public:
  explicit MarkovObjective(std::shared_ptr<const MarkovData> data);

  Index rows() const override { return data_->states; }
  Index cols() const override { return data_->states; }
  std::string name() const override { return "markov"; }
  double value(const Factored& X) const override;
  AmbientMatrix egrad(const Factored& X) const override;
  std::pair<double, AmbientMatrix> value_and_egrad(const Factored& X) const override;
  AmbientMatrix ehess(const Factored& X, const Factored& eta) const override;

  const MarkovData& data() const { return *data_; }

private:
  std::shared_ptr<const MarkovData> data_;
};

// Ground truth Y as a point of rank r_star: H = U S, V = W from Y = U S W^T.
MhPoint markov_truth_point(const MarkovData& data, double omega);
// H = P_Ob(gaussian), V = qr(gaussian).
MhPoint markov_start(const MarkovData& data, Index r, double omega, std::uint64_t seed);
// Rank-r truncation of the entrywise square root of P_hat, rows renormalized.
MhPoint markov_spectral_start(const MarkovData& data, Index r, double omega);

// ---- generic test objective -----------------------------------------------

// f(X) = 1/2 ||P X Q - B||^2 + 1/12 sum X^4 with random P, Q, B.
class QuarticObjective : public Objective {
public:
  QuarticObjective(Index m, Index n, std::uint64_t seed);

  Index rows() const override { return P_.cols(); }
  Index cols() const override { return Q_.rows(); }
  std::string name() const override { return "quartic"; }
  double value(const Factored& X) const override;
  AmbientMatrix egrad(const Factored& X) const override;
  AmbientMatrix ehess(const Factored& X, const Factored& eta) const override;

private:
  Matrix P_, Q_, B_;
};

} // namespace spacedec
