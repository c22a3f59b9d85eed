#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "spacedec/solvers.h"

namespace spacedec {

enum class Task { Fitting, GraphSim, Sync, Markov, GeomTest };
enum class Method { Rgd, Rtr };

const char* to_string(Task t);

struct ExperimentConfig {
  Task task = Task::Fitting;
  std::uint64_t seed = 1;
  std::string output = "out";

  // dimensions
  Index m = 0, n = 0, r = 0, r_star = 0;
  std::string kind;  // constraint key; empty selects the task default

  // fitting
  double oversampling = 5.0;
  // graph similarity: "cycle", "binomial", or "file:<edge list>"
  std::string graph_a = "cycle";
  std::string graph_b = "binomial";
  double p_a = 0.0, p_b = 0.0;
  int blondel_steps = 200000;
  // synchronization
  Index cams = 0, edges = 0;
  double connectivity_p = 0.0;
  double noise = 0.0;
  // markov; init "spectral" or "random"
  Index samples_per_row = 10000;
  std::string init = "spectral";
  // geomtest
  int instances = 1;

  Method method = Method::Rtr;
  double omega = 0.0;  // 0: 0.5 for RGD, 10 for RTR
  SolverConfig solver;
  bool fd_gate = true;
  double rank_tol = -1.0;

  // "section.key" -> value exactly as written, for hashing
  std::map<std::string, std::string> entries;
  std::string source_path;
};

// Flat INI-style text: "[section]" headers, "key = value" lines, '#' or ';'
// comments. Unknown sections or keys, duplicates, and malformed values
// raise InvalidConfig with the line number.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

// FNV-1a 64 over the sorted "section.key=value" lines.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace spacedec
