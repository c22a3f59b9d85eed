#include <algorithm>
#include <optional>

#include "common.h"
#include "spacedec/error.h"

namespace spacedec {

SolveReport solve_rgd(const Objective& f, const MhPoint& start, const SolverConfig& cfg,
                      const ProgressCallback& progress) {
  const ArmijoConfig& ls = cfg.armijo;
  if (!(ls.initial_step > 0) || !(ls.backtrack_factor > 0 && ls.backtrack_factor < 1) ||
      !(ls.sufficient_decrease > 0 && ls.sufficient_decrease < 1) || !(cfg.grad_tol > 0))
    throw Error(ErrorCode::InvalidConfig, "solve_rgd: invalid line-search parameters");

  detail::Stopwatch clock;
  SolveReport rep{start};
  MhPoint x = start;
  auto [fx, egrad] = detail::eval_value_grad(f, x, 0);
  MhTangent grad = mh::riemannian_gradient(x, egrad);
  double gnorm = mh::norm(x, grad);
  rep.max_feasibility = detail::point_feasibility(x);

  double prev_step = 0.0;
  double last_step = 0.0;
  int last_backtracks = 0;
  int k = 0;
  for (;; ++k) {
    rep.trace.push_back({k, fx, gnorm, last_step, clock.ms(), last_backtracks, true});
    if (progress) progress(k, fx, gnorm);
    if (gnorm <= cfg.grad_tol) {
      rep.termination = Termination::GradTol;
      break;
    }
    if (k >= cfg.max_iters) {
      rep.termination = Termination::MaxIters;
      break;
    }
    if (clock.ms() > 1e3 * cfg.time_budget) {
      rep.termination = Termination::TimeBudget;
      break;
    }

    double alpha = k == 0 ? ls.initial_step : std::min(2.0 * prev_step, ls.initial_step);
    const double slope = gnorm * gnorm;
    std::optional<MhPoint> accepted;
    double f_new = fx;
    int bt = 0;
    for (; bt <= ls.max_backtracks; ++bt) {
      std::optional<MhPoint> trial;
      try {
        trial.emplace(mh::retract(x, -alpha * grad, cfg.retraction));
      } catch (const Error&) {
        // step left the domain of the retraction; shrink
      }
      if (trial) {
        f_new = detail::eval_value(f, *trial, k + 1);
        if (f_new <= fx - ls.sufficient_decrease * alpha * slope) {
          accepted = std::move(trial);
          break;
        }
      }
      if (bt < ls.max_backtracks) alpha *= ls.backtrack_factor;
    }
    if (!accepted) {
      rep.termination = Termination::StepCollapse;
      break;
    }

    x = std::move(*accepted);
    prev_step = alpha;
    last_step = alpha;
    last_backtracks = bt;
    auto ev = detail::eval_value_grad(f, x, k + 1);
    fx = ev.f;
    egrad = std::move(ev.egrad);
    grad = mh::riemannian_gradient(x, egrad);
    gnorm = mh::norm(x, grad);
    rep.max_feasibility = std::max(rep.max_feasibility, detail::point_feasibility(x));
  }

  rep.final_point = x;
  rep.final_f = fx;
  rep.final_grad_norm = gnorm;
  rep.iterations = k;
  return rep;
}

} // namespace spacedec
