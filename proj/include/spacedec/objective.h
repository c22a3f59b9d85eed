#pragma once

#include <string>
#include <utility>

#include "spacedec/ambient.h"
#include "spacedec/constraint_manifold.h"

namespace spacedec {

// Smooth f on R^{m x n}. Evaluations must be reentrant.
class Objective {
public:
  virtual ~Objective() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual std::string name() const = 0;

  virtual double value(const Factored& X) const = 0;
  virtual AmbientMatrix egrad(const Factored& X) const = 0;
  virtual std::pair<double, AmbientMatrix> value_and_egrad(const Factored& X) const {
    return {value(X), egrad(X)};
  }
  virtual bool has_hessian() const { return true; }
  // Euclidean Hessian at X applied to eta.
  virtual AmbientMatrix ehess(const Factored& X, const Factored& eta) const = 0;
};

struct FdCheckResult {
  double grad_rel_error = 0.0;
  double hess_rel_error = 0.0;
  bool passed = false;
};

// Central-difference validation of egrad and ehess along random rank-2
// directions at random rank-r points scaled to the problem.
FdCheckResult fd_check(const Objective& f, const ConstraintManifold& manifold, Index r,
                       std::uint64_t seed, int probes = 20, double h = 1e-6, double tol = 1e-5);

} // namespace spacedec
