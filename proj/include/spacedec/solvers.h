#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spacedec/objective.h"
#include "spacedec/space_decoupling.h"

namespace spacedec {

struct ArmijoConfig {
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 50;
};

struct TrustRegionConfig {
  double initial_radius = 0.0;  // <= 0: max_radius / 8
  double max_radius = 0.0;      // <= 0: sqrt(dim M_h)
  double eta_accept = 0.1;
  int tcg_max_iters = 0;        // <= 0: dim M_h
  double tcg_kappa = 0.1;
  double tcg_theta = 1.0;
};

struct SolverConfig {
  int max_iters = 1000;
  double grad_tol = 1e-10;
  double time_budget = std::numeric_limits<double>::infinity();  // seconds
  ArmijoConfig armijo;
  TrustRegionConfig tr;
  RetractionChoice retraction = RetractionChoice::FirstOrder;
  // Neither solver moves tangent vectors between points; kept so that a
  // run records the rule it was configured with.
  TransportChoice transport = TransportChoice::Projection;

  static SolverConfig rgd_defaults();
  static SolverConfig rtr_defaults();
};

enum class Termination { GradTol, MaxIters, TimeBudget, StepCollapse };
const char* to_string(Termination t);

struct IterateRecord {
  int iteration;
  double f;
  double grad_norm;
  double step;      // accepted step size (RGD) or radius used (RTR)
  double wall_ms;   // since solver start
  int inner_iters;  // backtracks (RGD) or tCG iterations (RTR)
  bool accepted;
};

struct SolveReport {
  explicit SolveReport(MhPoint start) : final_point(std::move(start)) {}

  MhPoint final_point;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  Termination termination = Termination::MaxIters;
  int iterations = 0;
  std::vector<IterateRecord> trace;
  double max_feasibility = 0.0;
  // Ambient stationarity of the final X; filled by attach_stationarity.
  std::optional<double> final_stationarity;
  std::optional<double> final_stationarity_forced;
  std::optional<Index> final_detected_rank;
};

using ProgressCallback = std::function<void(int iteration, double f, double grad_norm)>;

SolveReport solve_rgd(const Objective& f, const MhPoint& start, const SolverConfig& cfg,
                      const ProgressCallback& progress = {});
SolveReport solve_rtr(const Objective& f, const MhPoint& start, const SolverConfig& cfg,
                      const ProgressCallback& progress = {});

// Evaluates the ambient stationarity measures of the final iterate with
// the rank bound r = start rank.
void attach_stationarity(SolveReport& report, const Objective& f);

} // namespace spacedec
