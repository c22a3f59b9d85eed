#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spacedec/config.h"
#include "spacedec/objective.h"
#include "spacedec/property_suite.h"
#include "spacedec/solvers.h"
#include "spacedec/variational.h"

namespace spacedec {

struct ExperimentResult {
  Task task = Task::Fitting;
  std::optional<SolveReport> report;  // empty for geomtest
  std::optional<FdCheckResult> fd;
  // task specific scalars in insertion order (test_error, relative_error, ...)
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<PropertyResult> properties;  // geomtest only
  Matrix X;      // final iterate
  Matrix egrad;  // Euclidean gradient at X
  std::optional<variational::StationarityReport> stationarity;

  double metric(const std::string& key) const;
  bool has_metric(const std::string& key) const;
};

// Builds data and objective from the config, runs the FD gate when enabled
// (ObjectiveError on failure), solves, and evaluates the task metrics.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress = {});

} // namespace spacedec
