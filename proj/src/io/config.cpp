#include "spacedec/config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "spacedec/error.h"

namespace spacedec {
namespace {

struct Entry {
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw Error(ErrorCode::InvalidConfig, origin + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  const double d = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return d;
}

long long to_int(const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("not an integer");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

Setter idx(Index ExperimentConfig::*field, long long lo = 1) {
  return [field, lo](ExperimentConfig& c, const std::string& v) {
    const long long x = to_int(v);
    if (x < lo) throw std::invalid_argument("must be >= " + std::to_string(lo));
    c.*field = static_cast<Index>(x);
  };
}

Setter real(double ExperimentConfig::*field, bool positive) {
  return [field, positive](ExperimentConfig& c, const std::string& v) {
    const double x = to_double(v);
    if (positive ? !(x > 0) : !(x >= 0)) throw std::invalid_argument(positive ? "must be > 0" : "must be >= 0");
    c.*field = x;
  };
}

template <class F>
Setter solver(F f) {
  return [f](ExperimentConfig& c, const std::string& v) { f(c.solver, v); };
}

double positive(const std::string& v) {
  const double x = to_double(v);
  if (!(x > 0)) throw std::invalid_argument("must be > 0");
  return x;
}

double unit_open(const std::string& v) {
  const double x = to_double(v);
  if (!(x > 0 && x < 1)) throw std::invalid_argument("must lie in (0, 1)");
  return x;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment.task",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "fitting") c.task = Task::Fitting;
         else if (v == "graphsim") c.task = Task::GraphSim;
         else if (v == "sync") c.task = Task::Sync;
         else if (v == "markov") c.task = Task::Markov;
         else if (v == "geomtest") c.task = Task::GeomTest;
         else throw std::invalid_argument("expected fitting|graphsim|sync|markov|geomtest");
       }},
      {"experiment.seed",
       [](ExperimentConfig& c, const std::string& v) {
         const long long s = to_int(v);
         if (s < 0) throw std::invalid_argument("must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"experiment.output",
       [](ExperimentConfig& c, const std::string& v) {
         if (v.empty()) throw std::invalid_argument("must not be empty");
         c.output = v;
       }},
      {"problem.m", idx(&ExperimentConfig::m)},
      {"problem.n", idx(&ExperimentConfig::n)},
      {"problem.r", idx(&ExperimentConfig::r)},
      {"problem.r_star", idx(&ExperimentConfig::r_star)},
      {"problem.kind", [](ExperimentConfig& c, const std::string& v) { c.kind = v; }},
      {"problem.oversampling", real(&ExperimentConfig::oversampling, true)},
      {"problem.graph_a", [](ExperimentConfig& c, const std::string& v) { c.graph_a = v; }},
      {"problem.graph_b", [](ExperimentConfig& c, const std::string& v) { c.graph_b = v; }},
      {"problem.p_a", real(&ExperimentConfig::p_a, false)},
      {"problem.p_b", real(&ExperimentConfig::p_b, false)},
      {"problem.blondel_steps",
       [](ExperimentConfig& c, const std::string& v) {
         const long long x = to_int(v);
         if (x < 1) throw std::invalid_argument("must be >= 1");
         c.blondel_steps = static_cast<int>(x);
       }},
      {"problem.cams", idx(&ExperimentConfig::cams, 2)},
      {"problem.edges", idx(&ExperimentConfig::edges)},
      {"problem.connectivity_p", real(&ExperimentConfig::connectivity_p, true)},
      {"problem.noise", real(&ExperimentConfig::noise, false)},
      {"problem.samples_per_row", idx(&ExperimentConfig::samples_per_row, 0)},
      {"problem.init",
       [](ExperimentConfig& c, const std::string& v) {
         if (v != "spectral" && v != "random") throw std::invalid_argument("expected spectral|random");
         c.init = v;
       }},
      {"problem.instances",
       [](ExperimentConfig& c, const std::string& v) {
         const long long x = to_int(v);
         if (x < 1) throw std::invalid_argument("must be >= 1");
         c.instances = static_cast<int>(x);
       }},
      {"solver.method",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "rgd") c.method = Method::Rgd;
         else if (v == "rtr") c.method = Method::Rtr;
         else throw std::invalid_argument("expected rgd|rtr");
       }},
      {"solver.omega", real(&ExperimentConfig::omega, true)},
      {"solver.fd_gate", [](ExperimentConfig& c, const std::string& v) { c.fd_gate = to_bool(v); }},
      {"solver.rank_tol", real(&ExperimentConfig::rank_tol, true)},
      {"solver.max_iters", solver([](SolverConfig& s, const std::string& v) {
         const long long x = to_int(v);
         if (x < 0) throw std::invalid_argument("must be >= 0");
         s.max_iters = static_cast<int>(x);
       })},
      {"solver.grad_tol", solver([](SolverConfig& s, const std::string& v) { s.grad_tol = positive(v); })},
      {"solver.time_budget", solver([](SolverConfig& s, const std::string& v) { s.time_budget = positive(v); })},
      {"solver.retraction", solver([](SolverConfig& s, const std::string& v) {
         if (v == "first_order") s.retraction = RetractionChoice::FirstOrder;
         else if (v == "second_order") s.retraction = RetractionChoice::SecondOrder;
         else throw std::invalid_argument("expected first_order|second_order");
       })},
      {"solver.transport", solver([](SolverConfig& s, const std::string& v) {
         if (v == "projection") s.transport = TransportChoice::Projection;
         else if (v == "decoupled") s.transport = TransportChoice::Decoupled;
         else if (v == "isometric") s.transport = TransportChoice::Isometric;
         else throw std::invalid_argument("expected projection|decoupled|isometric");
       })},
      {"solver.initial_step", solver([](SolverConfig& s, const std::string& v) { s.armijo.initial_step = positive(v); })},
      {"solver.backtrack_factor", solver([](SolverConfig& s, const std::string& v) { s.armijo.backtrack_factor = unit_open(v); })},
      {"solver.sufficient_decrease", solver([](SolverConfig& s, const std::string& v) { s.armijo.sufficient_decrease = unit_open(v); })},
      {"solver.max_backtracks", solver([](SolverConfig& s, const std::string& v) {
         const long long x = to_int(v);
         if (x < 1) throw std::invalid_argument("must be >= 1");
         s.armijo.max_backtracks = static_cast<int>(x);
       })},
      {"solver.initial_radius", solver([](SolverConfig& s, const std::string& v) { s.tr.initial_radius = positive(v); })},
      {"solver.max_radius", solver([](SolverConfig& s, const std::string& v) { s.tr.max_radius = positive(v); })},
      {"solver.eta_accept", solver([](SolverConfig& s, const std::string& v) {
         const double x = to_double(v);
         if (!(x >= 0 && x < 0.25)) throw std::invalid_argument("must lie in [0, 0.25)");
         s.tr.eta_accept = x;
       })},
      {"solver.tcg_max_iters", solver([](SolverConfig& s, const std::string& v) {
         const long long x = to_int(v);
         if (x < 1) throw std::invalid_argument("must be >= 1");
         s.tr.tcg_max_iters = static_cast<int>(x);
       })},
      {"solver.tcg_kappa", solver([](SolverConfig& s, const std::string& v) { s.tr.tcg_kappa = unit_open(v); })},
      {"solver.tcg_theta", solver([](SolverConfig& s, const std::string& v) { s.tr.tcg_theta = positive(v); })},
  };
  return table;
}

void apply_task_defaults(ExperimentConfig& c) {
  switch (c.task) {
  case Task::Fitting:
    if (!c.m) c.m = 500;
    if (!c.n) c.n = 600;
    if (!c.r_star) c.r_star = 6;
    if (!c.r) c.r = c.r_star;
    if (c.kind.empty()) c.kind = "oblique";
    break;
  case Task::GraphSim:
    if (!c.m) c.m = 200;
    if (!c.n) c.n = 200;
    if (!c.r) c.r = 1;
    if (c.p_a == 0) c.p_a = 0.005;
    if (c.p_b == 0) c.p_b = 0.005;
    if (c.kind.empty()) c.kind = "fsphere";
    break;
  case Task::Sync:
    if (!c.cams) c.cams = 50;
    if (!c.edges && c.connectivity_p == 0) c.edges = 300;
    c.m = c.n = 3 * c.cams;
    if (!c.r) c.r = 3;
    if (c.kind.empty()) c.kind = "stiefel:" + std::to_string(c.cams) + "x3";
    break;
  case Task::Markov:
    if (!c.m) c.m = c.n ? c.n : 100;
    if (!c.n) c.n = c.m;
    if (!c.r_star) c.r_star = 5;
    if (!c.r) c.r = c.r_star;
    if (c.kind.empty()) c.kind = "oblique";
    break;
  case Task::GeomTest:
    if (!c.m) c.m = 8;
    if (!c.n) c.n = 7;
    if (!c.r) c.r = 3;
    if (c.kind.empty()) c.kind = "euclidean";
    break;
  }
  if (c.omega == 0) c.omega = c.method == Method::Rgd ? 0.5 : 10.0;
}

void validate(const ExperimentConfig& c, const std::string& origin,
              const std::map<std::string, Entry>& lines) {
  const auto where = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second.line;
  };
  const auto bad = [&](const std::string& key, const std::string& msg) {
    fail(origin, where(key), key + ": " + msg);
  };
  if (c.r > std::min(c.m, c.n)) bad("problem.r", "rank exceeds min(m, n)");
  try {
    ConstraintManifold::parse(c.kind, c.m).require_nonempty(c.r);
  } catch (const Error& e) {
    bad("problem.kind", e.what());
  }
  switch (c.task) {
  case Task::Fitting:
    if (c.kind != "oblique") bad("problem.kind", "fitting runs on the oblique kind");
    if (c.r_star > std::min(c.m, c.n)) bad("problem.r_star", "exceeds min(m, n)");
    if (2.0 * c.oversampling * c.r_star * (c.m + c.n - c.r_star) > static_cast<double>(c.m) * c.n)
      bad("problem.oversampling", "Omega and the disjoint test set do not fit in m n entries");
    break;
  case Task::GraphSim:
    if (c.kind != "fsphere") bad("problem.kind", "graph similarity runs on the fsphere kind");
    for (const auto& [key, spec] : {std::pair{"problem.graph_a", c.graph_a}, std::pair{"problem.graph_b", c.graph_b}})
      if (spec != "cycle" && spec != "binomial" && spec.rfind("file:", 0) != 0)
        bad(key, "expected cycle, binomial or file:<path>");
    if (c.p_a > 1 || c.p_b > 1) bad("problem.p_a", "edge probabilities must be <= 1");
    break;
  case Task::Sync:
    if (c.r != 3) bad("problem.r", "synchronization uses r = 3");
    if (c.kind != "stiefel:" + std::to_string(c.cams) + "x3") bad("problem.kind", "must be stiefel:<cams>x3");
    if (c.connectivity_p > 1) bad("problem.connectivity_p", "must be <= 1");
    if (c.edges && c.connectivity_p > 0) bad("problem.edges", "set either edges or connectivity_p");
    break;
  case Task::Markov:
    if (c.m != c.n) bad("problem.n", "markov chains are square");
    if (c.kind != "oblique") bad("problem.kind", "markov runs on the oblique kind");
    if (c.r_star > c.m) bad("problem.r_star", "exceeds the state count");
    break;
  case Task::GeomTest:
    if (c.m > 64 || c.n > 64) bad("problem.m", "geomtest is meant for dimensions <= 64");
    break;
  }
  if (c.method == Method::Rtr && c.solver.tr.max_radius > 0 && c.solver.tr.initial_radius > c.solver.tr.max_radius)
    bad("solver.initial_radius", "exceeds max_radius");
}

} // namespace

const char* to_string(Task t) {
  switch (t) {
  case Task::Fitting: return "fitting";
  case Task::GraphSim: return "graphsim";
  case Task::Sync: return "sync";
  case Task::Markov: return "markov";
  case Task::GeomTest: return "geomtest";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  static const std::vector<std::string> sections = {"experiment", "problem", "solver"};
  std::map<std::string, Entry> lines;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto cut = raw.find_first_of("#;");
    std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        fail(origin, lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    if (section.empty()) fail(origin, lineno, "key outside of any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!setters().count(key)) fail(origin, lineno, "unknown key '" + key + "'");
    if (lines.count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
    lines[key] = {value, lineno};
  }

  ExperimentConfig cfg;
  cfg.source_path = origin;
  const auto apply = [&](const std::string& key) {
    const Entry& e = lines.at(key);
    try {
      setters().at(key)(cfg, e.value);
    } catch (const std::exception& ex) {
      fail(origin, e.line, key + " = '" + e.value + "': " + ex.what());
    }
  };
  for (const char* key : {"experiment.task", "solver.method"})
    if (lines.count(key)) apply(key);
  cfg.solver = cfg.method == Method::Rgd ? SolverConfig::rgd_defaults() : SolverConfig::rtr_defaults();
  for (const auto& [key, e] : lines) {
    if (key == "experiment.task" || key == "solver.method") continue;
    apply(key);
  }
  for (const auto& [key, e] : lines) cfg.entries[key] = e.value;
  apply_task_defaults(cfg);
  validate(cfg, origin, lines);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, path + ": cannot read config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [key, value] : cfg.entries)
    for (const char ch : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace spacedec
