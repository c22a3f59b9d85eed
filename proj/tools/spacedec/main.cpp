#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "spacedec/config.h"
#include "spacedec/error.h"
#include "spacedec/experiment.h"
#include "spacedec/matrix_market.h"
#include "spacedec/property_suite.h"
#include "spacedec/types.h"
#include "spacedec/variational.h"

namespace fs = std::filesystem;
using namespace spacedec;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

std::mutex log_mutex;

void log_line(const std::string& s) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << s << '\n';
}

const char* method_name(Method m) { return m == Method::Rgd ? "rgd" : "rtr"; }

json properties_json(const std::vector<PropertyResult>& props) {
  json arr = json::array();
  for (const PropertyResult& p : props)
    arr.push_back({{"name", p.name},
                   {"measured", p.measured},
                   {"threshold", p.threshold},
                   {"lower_is_better", p.lower_is_better},
                   {"passed", p.passed},
                   {"skipped", p.skipped},
                   {"note", p.note}});
  return arr;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << body;
}

// Everything is computed before the first byte is written, so a failed run
// leaves no output directory behind.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res, const fs::path& dir, double wall_ms) {
  json summary = {{"version", kVersion},
                  {"config_hash", config_hash(cfg)},
                  {"config", cfg.source_path},
                  {"task", to_string(cfg.task)},
                  {"seed", cfg.seed},
                  {"m", cfg.m},
                  {"n", cfg.n},
                  {"r", cfg.r},
                  {"kind", cfg.kind},
                  {"wall_ms", wall_ms}};
  std::ostringstream csv;
  csv.precision(17);
  if (res.report) {
    const SolveReport& rep = *res.report;
    summary["method"] = method_name(cfg.method);
    summary["omega"] = cfg.omega;
    summary["termination"] = to_string(rep.termination);
    summary["iterations"] = rep.iterations;
    summary["final_f"] = rep.final_f;
    summary["final_grad_norm"] = rep.final_grad_norm;
    summary["max_feasibility"] = rep.max_feasibility;
    if (res.stationarity) {
      summary["final_stationarity"] = res.stationarity->at_detected_rank;
      summary["final_stationarity_forced_rank"] = res.stationarity->at_forced_rank;
      summary["detected_rank"] = res.stationarity->detected_rank;
    }
    csv << "iteration,f,grad_norm,wall_ms,step,inner_iters,accepted\n";
    for (const IterateRecord& it : rep.trace)
      csv << it.iteration << ',' << it.f << ',' << it.grad_norm << ',' << it.wall_ms << ',' << it.step << ','
          << it.inner_iters << ',' << (it.accepted ? 1 : 0) << '\n';
  }
  if (res.fd) summary["fd_gate"] = {{"grad_rel_error", res.fd->grad_rel_error}, {"hess_rel_error", res.fd->hess_rel_error}};
  json metrics = json::object();
  for (const auto& [k, v] : res.metrics) metrics[k] = v;
  summary["metrics"] = metrics;
  if (!res.properties.empty()) summary["properties"] = properties_json(res.properties);

  fs::create_directories(dir / "plotdata");
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  if (res.report) {
    write_text(dir / "metrics.csv", csv.str());
    std::ostringstream fdat, gdat;
    fdat.precision(17);
    gdat.precision(17);
    for (const IterateRecord& it : res.report->trace) {
      fdat << it.iteration << ' ' << it.f << '\n';
      gdat << it.iteration << ' ' << it.grad_norm << '\n';
    }
    write_text(dir / "plotdata" / "f.dat", fdat.str());
    write_text(dir / "plotdata" / "grad_norm.dat", gdat.str());
    io::write_matrix_market_array((dir / "X.mtx").string(), res.X);
    io::write_matrix_market_array((dir / "grad.mtx").string(), res.egrad);
  }
  if (!res.properties.empty()) {
    std::ostringstream pdat;
    pdat.precision(17);
    for (std::size_t i = 0; i < res.properties.size(); ++i)
      pdat << i << ' ' << res.properties[i].measured << '\n';
    write_text(dir / "plotdata" / "properties.dat", pdat.str());
  }
}

int run_one(const ExperimentConfig& cfg, const fs::path& dir, bool verbose) {
  const auto t0 = std::chrono::steady_clock::now();
  ProgressCallback progress;
  if (verbose)
    progress = [](int k, double f, double g) {
      if (k % 10 == 0) std::fprintf(stderr, "  iter %5d  f % .10e  |grad| %.3e\n", k, f, g);
    };
  ExperimentResult res;
  try {
    res = run_experiment(cfg, progress);
  } catch (const Error& e) {
    log_line(std::string(to_string(cfg.task)) + " (" + cfg.source_path + "): " + e.what());
    return e.code() == ErrorCode::InvalidConfig ? kExitConfig : kExitRuntime;
  }
  const double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_outputs(cfg, res, dir, wall_ms);
  } catch (const std::exception& e) {
    log_line(e.what());
    return kExitRuntime;
  }
  std::ostringstream line;
  line << cfg.source_path << ": " << to_string(cfg.task);
  if (res.report)
    line << " " << to_string(res.report->termination) << " after " << res.report->iterations << " iterations, f "
         << res.report->final_f;
  for (const auto& [k, v] : res.metrics) line << ", " << k << " " << v;
  if (!res.properties.empty()) {
    const auto failed = std::count_if(res.properties.begin(), res.properties.end(),
                                      [](const PropertyResult& p) { return !p.passed && !p.skipped; });
    line << ", " << failed << " properties failed";
    if (failed) {
      log_line(line.str());
      return kExitRuntime;
    }
  }
  log_line(line.str());
  return 0;
}

int cmd_run(const std::string& path, const std::string& out_override, bool verbose) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
  return run_one(cfg, out_override.empty() ? fs::path(cfg.output) : fs::path(out_override), verbose);
}

int cmd_sweep(const std::string& dir, const std::string& out_root, int workers) {
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::cerr << dir << ": no .cfg files\n";
    return kExitConfig;
  }
  // parse everything up front so that a bad file aborts before any run
  std::vector<ExperimentConfig> parsed;
  for (const fs::path& p : configs) {
    try {
      parsed.push_back(load_config(p.string()));
    } catch (const Error& e) {
      std::cerr << e.what() << '\n';
      return kExitConfig;
    }
  }
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{0};
  const auto work = [&] {
    for (std::size_t i; (i = next++) < parsed.size();) {
      const int code = run_one(parsed[i], fs::path(out_root) / configs[i].stem(), false);
      int cur = worst.load();
      while (code > cur && !worst.compare_exchange_weak(cur, code)) {
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(parsed.size())));
  for (int i = 0; i < n; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return worst.load();
}

int cmd_certify(const std::string& x_path, const std::string& g_path, Index r, const std::string& kind, double tol,
                double rank_tol) {
  Matrix X, G;
  try {
    X = io::read_matrix_market(x_path);
    G = io::read_matrix_market(g_path);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
  if (X.rows() != G.rows() || X.cols() != G.cols()) {
    std::cerr << "X is " << X.rows() << "x" << X.cols() << " but the gradient is " << G.rows() << "x" << G.cols()
              << '\n';
    return kExitConfig;
  }
  std::optional<ConstraintManifold> manifold;
  try {
    manifold = ConstraintManifold::parse(kind, X.rows());
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const variational::StationarityReport rep = variational::certify(X, G, r, *manifold, rank_tol);
    std::printf("feasibility residual      %.3e\n", rep.feasibility);
    std::printf("detected rank             %ld (bound %ld)\n", static_cast<long>(rep.detected_rank),
                static_cast<long>(rep.rank_bound));
    std::printf("measure at detected rank  %.6e\n", rep.at_detected_rank);
    std::printf("measure at forced rank    %.6e\n", rep.at_forced_rank);
    const bool ok = rep.at_detected_rank <= tol;
    std::printf("%s (tol %.1e)\n", ok ? "stationary" : "not stationary", tol);
    return ok ? 0 : kExitRuntime;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InfeasiblePoint) {
      std::printf("infeasible: residual %.3e, rank bound %ld\n", manifold->feasibility_violation(X),
                  static_cast<long>(r));
      std::cerr << e.what() << '\n';
      return kExitInfeasible;
    }
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::InvalidInput ? kExitConfig : kExitRuntime;
  }
}

int cmd_geomtest(const PropertySuiteOptions& opts) {
  std::vector<PropertyResult> props;
  try {
    if (opts.m > 64 || opts.n > 64) throw Error(ErrorCode::InvalidConfig, "geomtest is meant for m, n <= 64");
    props = run_property_suite(opts);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::EmptyManifold ? kExitConfig : kExitRuntime;
  }
  bool all = true;
  std::printf("kind %s  m %ld  n %ld  r %ld  omega %g  seed %lu  instances %d\n", opts.kind.c_str(),
              static_cast<long>(opts.m), static_cast<long>(opts.n), static_cast<long>(opts.r), opts.omega,
              static_cast<unsigned long>(opts.seed), opts.instances);
  for (const PropertyResult& p : props) {
    const char* tag = p.skipped ? "SKIP" : (p.passed ? "PASS" : "FAIL");
    std::printf("%-4s  %-28s measured %.3e  %s %.3e", tag, p.name.c_str(), p.measured,
                p.lower_is_better ? "<=" : ">=", p.threshold);
    if (!p.note.empty()) std::printf("  (%s)", p.note.c_str());
    std::printf("\n");
    if (!p.skipped && !p.passed) all = false;
  }
  return all ? 0 : kExitRuntime;
}

int default_workers() {
  if (const char* env = std::getenv("SPACEDEC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian optimization on bounded-rank matrices with orthogonally invariant constraints"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_override;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_override, "output directory, overrides experiment.output");
  run->add_flag("-v,--verbose", verbose, "print progress every 10 iterations");

  std::string x_path, g_path, kind = "euclidean";
  Index rank = 1;
  double tol = 1e-6, rank_tol = -1.0;
  auto* certify = app.add_subcommand("certify", "stationarity measure of X for a gradient");
  certify->add_option("--X", x_path, "MatrixMarket file with X")->required();
  certify->add_option("--grad", g_path, "MatrixMarket file with the Euclidean gradient")->required();
  certify->add_option("--rank", rank, "rank bound r")->required()->check(CLI::PositiveNumber);
  certify->add_option("--kind", kind, "constraint kind");
  certify->add_option("--tol", tol, "exit 0 when the measure is at most this");
  certify->add_option("--rank-tol", rank_tol, "relative singular value threshold");

  PropertySuiteOptions gopts;
  auto* geom = app.add_subcommand("geomtest", "geometry property suite");
  geom->add_option("--m", gopts.m)->check(CLI::PositiveNumber);
  geom->add_option("--n", gopts.n)->check(CLI::PositiveNumber);
  geom->add_option("--r", gopts.r)->check(CLI::PositiveNumber);
  geom->add_option("--kind", gopts.kind);
  geom->add_option("--omega", gopts.omega)->check(CLI::PositiveNumber);
  geom->add_option("--seed", gopts.seed);
  geom->add_option("--instances", gopts.instances)->check(CLI::PositiveNumber);

  std::string sweep_dir, sweep_out = "sweep_out";
  int workers = default_workers();
  auto* sweep = app.add_subcommand("sweep", "run every .cfg in a directory");
  sweep->add_option("dir", sweep_dir, "directory of configs")->required();
  sweep->add_option("--out", sweep_out, "root of the per-config output directories");
  sweep->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) return cmd_run(config_path, out_override, verbose);
  if (*certify) return cmd_certify(x_path, g_path, rank, kind, tol, rank_tol);
  if (*geom) return cmd_geomtest(gopts);
  if (*sweep) return cmd_sweep(sweep_dir, sweep_out, workers);
  return kExitConfig;
}
