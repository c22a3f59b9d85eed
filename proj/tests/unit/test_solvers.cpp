#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "spacedec/error.h"
#include "spacedec/problems.h"
#include "spacedec/solvers.h"

using namespace spacedec;

namespace {

// negated gradient: no step ever decreases f
class WrongGradient : public Objective {
public:
  explicit WrongGradient(const Objective& f) : f_(f) {}
  Index rows() const override { return f_.rows(); }
  Index cols() const override { return f_.cols(); }
  std::string name() const override { return "wrong"; }
  double value(const Factored& X) const override { return f_.value(X); }
  AmbientMatrix egrad(const Factored& X) const override { return AmbientMatrix(Matrix(-f_.egrad(X).to_dense())); }
  bool has_hessian() const override { return false; }
  AmbientMatrix ehess(const Factored& X, const Factored& eta) const override { return f_.ehess(X, eta); }

private:
  const Objective& f_;
};

} // namespace

TEST(Rgd, MonotoneAndConverges) {
  QuarticObjective f(8, 7, 1);
  const MhPoint x0 = mh::random_point(ConstraintManifold::oblique(8), 7, 3, 0.5, 2);
  SolverConfig cfg = SolverConfig::rgd_defaults();
  cfg.grad_tol = 1e-8;
  cfg.max_iters = 5000;
  const SolveReport rep = solve_rgd(f, x0, cfg);
  EXPECT_EQ(rep.termination, Termination::GradTol);
  ASSERT_EQ(rep.trace.size(), static_cast<size_t>(rep.iterations + 1));
  for (size_t k = 1; k < rep.trace.size(); ++k) EXPECT_LE(rep.trace[k].f, rep.trace[k - 1].f);
  EXPECT_LE(rep.final_grad_norm, 1e-8);
  EXPECT_NEAR(rep.final_f, f.value(rep.final_point.X()), 1e-12);
  EXPECT_LE(rep.max_feasibility, 1e-10);
}

TEST(Rgd, StepCollapseOnAscentDirection) {
  QuarticObjective f(6, 5, 3);
  WrongGradient g(f);
  SolverConfig cfg = SolverConfig::rgd_defaults();
  cfg.armijo.max_backtracks = 20;
  const SolveReport rep = solve_rgd(g, mh::random_point(ConstraintManifold::frobenius_sphere(6), 5, 2, 0.5, 4), cfg);
  EXPECT_EQ(rep.termination, Termination::StepCollapse);
}

TEST(Rgd, ZeroIterations) {
  QuarticObjective f(6, 5, 5);
  const MhPoint x0 = mh::random_point(ConstraintManifold::euclidean(6), 5, 2, 0.5, 6);
  SolverConfig cfg = SolverConfig::rgd_defaults();
  cfg.max_iters = 0;
  const SolveReport rep = solve_rgd(f, x0, cfg);
  EXPECT_EQ(rep.termination, Termination::MaxIters);
  EXPECT_EQ(rep.iterations, 0);
  EXPECT_EQ(rep.final_point.H(), x0.H());
}

TEST(Rgd, RejectsInvalidConfig) {
  QuarticObjective f(6, 5, 7);
  const MhPoint x0 = mh::random_point(ConstraintManifold::euclidean(6), 5, 2, 0.5, 8);
  SolverConfig cfg = SolverConfig::rgd_defaults();
  cfg.armijo.backtrack_factor = 1.5;
  EXPECT_THROW(solve_rgd(f, x0, cfg), Error);
}

TEST(Rtr, ConvergesAllKinds) {
  for (const char* key : {"euclidean", "oblique", "fsphere", "stiefel:4x2"}) {
    QuarticObjective f(8, 7, 9);
    const MhPoint x0 = mh::random_point(ConstraintManifold::parse(key, 8), 7, 3, 10.0, 10);
    SolverConfig cfg = SolverConfig::rtr_defaults();
    cfg.grad_tol = 1e-10;
    cfg.max_iters = 500;
    const SolveReport rep = solve_rtr(f, x0, cfg);
    EXPECT_EQ(rep.termination, Termination::GradTol) << key;
    EXPECT_LE(rep.final_f, rep.trace.front().f) << key;
    for (size_t k = 1; k < rep.trace.size(); ++k)
      EXPECT_LE(rep.trace[k].f, rep.trace[k - 1].f * (1 + 1e-12) + 1e-12) << key;
    EXPECT_LE(rep.max_feasibility, 1e-10) << key;
  }
}

TEST(Rtr, RequiresHessian) {
  QuarticObjective f(6, 5, 11);
  WrongGradient g(f);
  const MhPoint x0 = mh::random_point(ConstraintManifold::euclidean(6), 5, 2, 0.5, 12);
  try {
    solve_rtr(g, x0, SolverConfig::rtr_defaults());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST(Solvers, Deterministic) {
  QuarticObjective f(8, 7, 13);
  const MhPoint x0 = mh::random_point(ConstraintManifold::oblique(8), 7, 3, 10.0, 14);
  SolverConfig cfg = SolverConfig::rtr_defaults();
  cfg.max_iters = 20;
  const SolveReport a = solve_rtr(f, x0, cfg), b = solve_rtr(f, x0, cfg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (size_t k = 0; k < a.trace.size(); ++k) EXPECT_EQ(a.trace[k].f, b.trace[k].f);
  EXPECT_EQ(a.final_point.H(), b.final_point.H());
}

TEST(Solvers, ProgressAndStationarity) {
  QuarticObjective f(8, 7, 15);
  const MhPoint x0 = mh::random_point(ConstraintManifold::oblique(8), 7, 3, 10.0, 16);
  SolverConfig cfg = SolverConfig::rtr_defaults();
  cfg.grad_tol = 1e-10;
  int calls = 0;
  SolveReport rep = solve_rtr(f, x0, cfg, [&](int, double, double) { ++calls; });
  EXPECT_EQ(calls, static_cast<int>(rep.trace.size()));
  attach_stationarity(rep, f);
  ASSERT_TRUE(rep.final_stationarity.has_value());
  EXPECT_LE(*rep.final_stationarity, 1e-6);
  EXPECT_EQ(*rep.final_detected_rank, 3);
}

TEST(Rtr, FittingBenchmarkSuperlinearTail) {
  auto data = std::make_shared<MaskedFittingData>(make_fitting_data(500, 600, 6, 5.0, 42));
  FittingObjective f(data);
  SolverConfig cfg = SolverConfig::rtr_defaults();
  cfg.max_iters = 300;
  cfg.grad_tol = 1e-13;
  cfg.tr.tcg_max_iters = 100;
  const SolveReport rep = solve_rtr(f, fitting_start(*data, 6, 10.0, 43), cfg);
  ASSERT_EQ(rep.termination, Termination::GradTol);
  const auto& tr = rep.trace;
  ASSERT_GE(tr.size(), 4u);
  for (size_t k = tr.size() - 3; k < tr.size(); ++k) EXPECT_LE(tr[k].grad_norm, 0.3 * tr[k - 1].grad_norm);
  EXPECT_LE(f.test_error(rep.final_point.X()), 1e-8);
  for (const IterateRecord& it : tr) EXPECT_LE(it.step, std::sqrt(static_cast<double>(mh::dimension(
                                                  rep.final_point.manifold(), 600, 6))) + 1e-12);
}
