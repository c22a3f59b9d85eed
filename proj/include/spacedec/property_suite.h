#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spacedec/constraint_manifold.h"

namespace spacedec {

struct PropertyResult {
  std::string name;
  double measured = 0.0;   // worst case over instances
  double threshold = 0.0;
  bool lower_is_better = true;  // false for slopes
  bool passed = false;
  bool skipped = false;
  std::string note;
};

struct PropertySuiteOptions {
  Index m = 8, n = 7, r = 3;
  std::string kind = "euclidean";
  double omega = 0.5;
  std::uint64_t seed = 1;
  int instances = 1;
};

// Geometry checks of M_h on the random quartic objective: gradient and
// Hessian consistency, retraction orders, metric, transports,
// representation independence and the manifold dimension.
std::vector<PropertyResult> run_property_suite(const PropertySuiteOptions& opts);

// Least-squares slope of log(err) against log(t).
double loglog_slope(const std::vector<double>& t, const std::vector<double>& err);

} // namespace spacedec
