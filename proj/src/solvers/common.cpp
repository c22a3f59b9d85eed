#include "common.h"

#include <cmath>
#include <exception>

#include "spacedec/error.h"
#include "spacedec/variational.h"

namespace spacedec {

const char* to_string(Termination t) {
  switch (t) {
  case Termination::GradTol: return "GradTol";
  case Termination::MaxIters: return "MaxIters";
  case Termination::TimeBudget: return "TimeBudget";
  case Termination::StepCollapse: return "StepCollapse";
  }
  return "Unknown";
}

SolverConfig SolverConfig::rgd_defaults() {
  SolverConfig c;
  c.max_iters = 1000;
  c.grad_tol = 1e-10;
  c.retraction = RetractionChoice::FirstOrder;
  return c;
}

SolverConfig SolverConfig::rtr_defaults() {
  SolverConfig c;
  c.max_iters = 300;
  c.grad_tol = 1e-13;
  c.retraction = RetractionChoice::SecondOrder;
  return c;
}

void attach_stationarity(SolveReport& report, const Objective& f) {
  const MhPoint& x = report.final_point;
  const Matrix X = x.X_dense();
  const Matrix egrad = f.egrad(x.X()).to_dense();
  const auto rep = variational::certify(X, egrad, x.r(), x.manifold());
  report.final_stationarity = rep.at_detected_rank;
  report.final_stationarity_forced = rep.at_forced_rank;
  report.final_detected_rank = rep.detected_rank;
}

namespace detail {
namespace {

[[noreturn]] void rethrow_objective(const std::exception& e, int iteration) {
  throw Error(ErrorCode::ObjectiveError,
              "objective failed at iteration " + std::to_string(iteration) + ": " + e.what());
}

void check_finite(double f, int iteration) {
  if (!std::isfinite(f))
    throw Error(ErrorCode::ObjectiveError,
                "objective returned a non-finite value at iteration " + std::to_string(iteration));
}

} // namespace

double eval_value(const Objective& f, const MhPoint& x, int iteration) {
  double v;
  try {
    v = f.value(x.X());
  } catch (const std::exception& e) {
    rethrow_objective(e, iteration);
  }
  check_finite(v, iteration);
  return v;
}

Evaluation eval_value_grad(const Objective& f, const MhPoint& x, int iteration) {
  try {
    auto [v, g] = f.value_and_egrad(x.X());
    check_finite(v, iteration);
    return {v, std::move(g)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ObjectiveError) throw;
    rethrow_objective(e, iteration);
  } catch (const std::exception& e) {
    rethrow_objective(e, iteration);
  }
}

AmbientMatrix eval_hess(const Objective& f, const MhPoint& x, const MhTangent& t, int iteration) {
  try {
    return f.ehess(x.X(), mh::eta_factored(x, t));
  } catch (const std::exception& e) {
    rethrow_objective(e, iteration);
  }
}

double point_feasibility(const MhPoint& x) {
  const Index r = x.r();
  const double orth = (x.V().transpose() * x.V() - Matrix::Identity(r, r)).norm();
  return std::max(orth, x.manifold().feasibility_violation(x.H()));
}

} // namespace detail
} // namespace spacedec
