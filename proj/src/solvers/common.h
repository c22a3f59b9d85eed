#pragma once

#include <chrono>
#include <string>

#include "spacedec/solvers.h"

namespace spacedec::detail {

struct Evaluation {
  double f;
  AmbientMatrix egrad;
};

double eval_value(const Objective& f, const MhPoint& x, int iteration);
Evaluation eval_value_grad(const Objective& f, const MhPoint& x, int iteration);
AmbientMatrix eval_hess(const Objective& f, const MhPoint& x, const MhTangent& t, int iteration);

double point_feasibility(const MhPoint& x);

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

} // namespace spacedec::detail
