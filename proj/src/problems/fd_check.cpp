#include <algorithm>
#include <cmath>

#include "spacedec/linalg.h"
#include "spacedec/objective.h"
#include "spacedec/random.h"

namespace spacedec {

FdCheckResult fd_check(const Objective& f, const ConstraintManifold& manifold, Index r,
                       std::uint64_t seed, int probes, double h, double tol) {
  Rng rng(seed);
  const Index m = f.rows(), n = f.cols();
  FdCheckResult res;
  double grad_err = 0.0, grad_scale = 0.0;
  for (int k = 0; k < probes; ++k) {
    Factored X{manifold.random_point(r, rng), linalg::qr_orthonormalize(rng.gaussian(n, r))};
    Factored D{rng.gaussian(m, 2), rng.gaussian(n, 2)};
    const double dn = D.dense().norm();
    D.left /= dn;
    const auto shifted = [&](double t) {
      Factored Y;
      Y.left.resize(m, r + 2);
      Y.left << X.left, t * D.left;
      Y.right.resize(n, r + 2);
      Y.right << X.right, D.right;
      return Y;
    };
    const Factored Xp = shifted(h), Xm = shifted(-h);
    const AmbientMatrix g = f.egrad(X);
    const double analytic = g.inner(D);
    const double fd = (f.value(Xp) - f.value(Xm)) / (2.0 * h);
    grad_err = std::max(grad_err, std::abs(fd - analytic));
    grad_scale = std::max({grad_scale, std::abs(analytic), std::abs(fd)});

    if (f.has_hessian()) {
      const Matrix hv = f.ehess(X, D).to_dense();
      const Matrix fdh = (f.egrad(Xp).to_dense() - f.egrad(Xm).to_dense()) / (2.0 * h);
      const double scale = std::max({hv.norm(), fdh.norm(), 1e-12});
      res.hess_rel_error = std::max(res.hess_rel_error, (hv - fdh).norm() / scale);
    }
  }
  res.grad_rel_error = grad_err / std::max(grad_scale, 1e-12);
  res.passed = res.grad_rel_error <= tol && res.hess_rel_error <= tol;
  return res;
}

} // namespace spacedec
