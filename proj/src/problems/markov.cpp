#include <algorithm>
#include <random>

#include "spacedec/error.h"
#include "spacedec/kernels.h"
#include "spacedec/linalg.h"
#include "spacedec/problems.h"
#include "spacedec/random.h"

namespace spacedec {

MarkovData make_markov_data(Index states, Index r_star, Index samples_per_row, std::uint64_t seed) {
  if (states <= 0 || r_star <= 0 || r_star > states)
    throw Error(ErrorCode::InvalidConfig, "markov: need 0 < r_star <= states");
  if (samples_per_row < 0) throw Error(ErrorCode::InvalidConfig, "markov: samples must be nonnegative");
  Rng rng(seed);
  MarkovData d;
  d.states = states;
  d.r_star = r_star;
  const Matrix G1 = rng.uniform_matrix(states, r_star);
  const Matrix G2 = rng.uniform_matrix(states, r_star);
  d.Y = ConstraintManifold::oblique(states).project_point(G1 * G2.transpose());
  d.P = d.Y.cwiseProduct(d.Y);
  if (samples_per_row == 0) {
    d.P_hat = d.P;
  } else {
    // multinomial draws per row through sequential conditional binomials
    d.P_hat.resize(states, states);
    for (Index i = 0; i < states; ++i) {
      Index remaining = samples_per_row;
      double mass = 1.0;
      for (Index j = 0; j < states; ++j) {
        Index c = 0;
        if (j == states - 1) {
          c = remaining;
        } else if (remaining > 0 && mass > 0) {
          const double q = std::clamp(d.P(i, j) / mass, 0.0, 1.0);
          c = std::binomial_distribution<Index>(remaining, q)(rng.engine());
        }
        d.P_hat(i, j) = static_cast<double>(c);
        remaining -= c;
        mass -= d.P(i, j);
      }
      d.P_hat.row(i) /= d.P_hat.row(i).sum();
    }
  }
  return d;
}

MarkovObjective::MarkovObjective(std::shared_ptr<const MarkovData> data) : data_(std::move(data)) {}

double MarkovObjective::value(const Factored& X) const { return value_and_egrad(X).first; }

AmbientMatrix MarkovObjective::egrad(const Factored& X) const { return value_and_egrad(X).second; }

std::pair<double, AmbientMatrix> MarkovObjective::value_and_egrad(const Factored& X) const {
  const Matrix Xd = X.dense();
  if (Xd.rows() != data_->states || Xd.cols() != data_->states)
    throw Error(ErrorCode::InvalidInput, "markov: point has wrong dimensions");
  Matrix g(Xd.rows(), Xd.cols());
  const double f = kernels::hadamard_residual(Xd.data(), data_->P_hat.data(), Xd.size(), g.data());
  return {f, AmbientMatrix(std::move(g))};
}

AmbientMatrix MarkovObjective::ehess(const Factored& X, const Factored& eta) const {
  const Matrix Xd = X.dense();
  const Matrix E = eta.dense();
  Matrix out(Xd.rows(), Xd.cols());
  kernels::hadamard_hess(Xd.data(), data_->P_hat.data(), E.data(), Xd.size(), out.data());
  return AmbientMatrix(std::move(out));
}

MhPoint markov_truth_point(const MarkovData& data, double omega) {
  const linalg::SvdFactors f = linalg::thin_svd(data.Y);
  const Index k = data.r_star;
  return MhPoint(ConstraintManifold::oblique(data.states),
                 f.U.leftCols(k) * f.S.head(k).asDiagonal(), f.V.leftCols(k), omega);
}

MhPoint markov_start(const MarkovData& data, Index r, double omega, std::uint64_t seed) {
  if (r <= 0 || r > data.states) throw Error(ErrorCode::InvalidConfig, "markov: rank parameter out of range");
  Rng rng(seed);
  const ConstraintManifold ob = ConstraintManifold::oblique(data.states);
  Matrix V = linalg::qr_orthonormalize(rng.gaussian(data.states, r));
  return MhPoint(ob, ob.project_point(rng.gaussian(data.states, r)), std::move(V), omega);
}

MhPoint markov_spectral_start(const MarkovData& data, Index r, double omega) {
  if (r <= 0 || r > data.states) throw Error(ErrorCode::InvalidConfig, "markov: rank parameter out of range");
  const linalg::SvdFactors f = linalg::thin_svd(data.P_hat.cwiseSqrt());
  const ConstraintManifold ob = ConstraintManifold::oblique(data.states);
  return MhPoint(ob, ob.project_point(f.U.leftCols(r) * f.S.head(r).asDiagonal()), f.V.leftCols(r), omega);
}

} // namespace spacedec
