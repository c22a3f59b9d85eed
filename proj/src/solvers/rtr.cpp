#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "common.h"
#include "spacedec/error.h"

namespace spacedec {
namespace {

struct TcgResult {
  MhTangent eta;
  MhTangent Heta;
  int iterations = 0;
  bool hit_boundary = false;
};

// Steihaug-Toint truncated CG on the quadratic model in the omega-metric.
TcgResult truncated_cg(const Objective& f, const MhPoint& x, const AmbientMatrix& egrad,
                       const MhTangent& grad, double radius, const TrustRegionConfig& tr,
                       int max_inner, int outer) {
  TcgResult out;
  out.eta = MhTangent::zero(x);
  out.Heta = MhTangent::zero(x);

  MhTangent r = grad;
  double r_r = mh::inner(x, r, r);
  const double norm_r0 = std::sqrt(r_r);
  MhTangent delta = -r;
  double e_Pe = 0.0, e_Pd = 0.0, d_Pd = r_r;
  const double radius2 = radius * radius;

  for (int j = 0; j < max_inner; ++j) {
    const MhTangent Hdelta =
        mh::riemannian_hessian(x, egrad, detail::eval_hess(f, x, delta, outer), delta);
    const double d_Hd = mh::inner(x, delta, Hdelta);
    const double alpha = r_r / d_Hd;
    const double e_Pe_new = e_Pe + 2.0 * alpha * e_Pd + alpha * alpha * d_Pd;
    ++out.iterations;
    if (!(d_Hd > 0.0) || e_Pe_new >= radius2) {
      const double tau = (-e_Pd + std::sqrt(std::max(0.0, e_Pd * e_Pd + d_Pd * (radius2 - e_Pe)))) / d_Pd;
      out.eta += tau * delta;
      out.Heta += tau * Hdelta;
      out.hit_boundary = true;
      break;
    }
    e_Pe = e_Pe_new;
    out.eta += alpha * delta;
    out.Heta += alpha * Hdelta;
    r += alpha * Hdelta;
    r = mh::reproject(x, r);
    const double r_r_new = mh::inner(x, r, r);
    const double norm_r = std::sqrt(r_r_new);
    if (norm_r <= norm_r0 * std::min(std::pow(norm_r0, tr.tcg_theta), tr.tcg_kappa)) break;
    const double beta = r_r_new / r_r;
    r_r = r_r_new;
    delta = beta * delta - r;
    // keep delta tangent, beta > 1 amplifies its normal part
    delta = {x.manifold().project_tangent(x.H(), delta.K), x.apply_G(delta.Vp)};
    e_Pd = beta * (e_Pd + alpha * d_Pd);
    d_Pd = r_r + beta * beta * d_Pd;
  }
  return out;
}

} // namespace

SolveReport solve_rtr(const Objective& f, const MhPoint& start, const SolverConfig& cfg,
                      const ProgressCallback& progress) {
  if (!f.has_hessian())
    throw Error(ErrorCode::InvalidConfig, "solve_rtr: objective has no Hessian");
  const TrustRegionConfig& tr = cfg.tr;
  if (!(cfg.grad_tol > 0) || !(tr.eta_accept >= 0 && tr.eta_accept < 0.25) ||
      !(tr.tcg_kappa > 0 && tr.tcg_kappa < 1) || !(tr.tcg_theta > 0))
    throw Error(ErrorCode::InvalidConfig, "solve_rtr: invalid trust-region parameters");

  detail::Stopwatch clock;
  const Index dim = mh::dimension(start.manifold(), start.n(), start.r());
  const double max_radius = tr.max_radius > 0 ? tr.max_radius : std::sqrt(static_cast<double>(std::max<Index>(dim, 1)));
  double radius = tr.initial_radius > 0 ? std::min(tr.initial_radius, max_radius) : max_radius / 8.0;
  const int max_inner = tr.tcg_max_iters > 0 ? tr.tcg_max_iters : static_cast<int>(std::max<Index>(dim, 1));

  SolveReport rep{start};
  MhPoint x = start;
  auto [fx, egrad] = detail::eval_value_grad(f, x, 0);
  MhTangent grad = mh::riemannian_gradient(x, egrad);
  double gnorm = mh::norm(x, grad);
  rep.max_feasibility = detail::point_feasibility(x);

  double used_radius = 0.0;
  int inner = 0;
  bool accepted_last = true;
  int k = 0;
  for (;; ++k) {
    rep.trace.push_back({k, fx, gnorm, used_radius, clock.ms(), inner, accepted_last});
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

    const TcgResult step = truncated_cg(f, x, egrad, grad, radius, tr, max_inner, k);
    used_radius = radius;
    inner = step.iterations;
    const double model_decrease =
        -(mh::inner(x, grad, step.eta) + 0.5 * mh::inner(x, step.eta, step.Heta));

    std::optional<MhPoint> trial;
    try {
      trial.emplace(mh::retract(x, step.eta, cfg.retraction));
    } catch (const Error&) {
      // rejected below
    }
    double rho = -std::numeric_limits<double>::infinity();
    double f_new = fx;
    const double reg = std::max(1.0, std::abs(fx)) * std::numeric_limits<double>::epsilon() * 1e3;
    if (trial) {
      f_new = detail::eval_value(f, *trial, k + 1);
      rho = (fx - f_new + reg) / (model_decrease + reg);
    }

    if (rho < 0.25) {
      radius /= 4.0;
    } else if (rho > 0.75 && step.hit_boundary) {
      radius = std::min(2.0 * radius, max_radius);
    }

    accepted_last = trial && rho > tr.eta_accept && f_new <= fx + reg;
    if (accepted_last) {
      x = std::move(*trial);
      auto ev = detail::eval_value_grad(f, x, k + 1);
      fx = ev.f;
      egrad = std::move(ev.egrad);
      grad = mh::riemannian_gradient(x, egrad);
      gnorm = mh::norm(x, grad);
      rep.max_feasibility = std::max(rep.max_feasibility, detail::point_feasibility(x));
    }
    if (radius < 1e-300) {
      rep.termination = Termination::StepCollapse;
      ++k;
      rep.trace.push_back({k, fx, gnorm, used_radius, clock.ms(), inner, accepted_last});
      break;
    }
  }

  rep.final_point = x;
  rep.final_f = fx;
  rep.final_grad_norm = gnorm;
  rep.iterations = k;
  return rep;
}

} // namespace spacedec
