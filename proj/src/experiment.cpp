#include "spacedec/experiment.h"

#include <algorithm>
#include <memory>

#include "spacedec/error.h"
#include "spacedec/linalg.h"
#include "spacedec/matrix_market.h"
#include "spacedec/problems.h"

namespace spacedec {
namespace {

SparseMatrix make_graph(const std::string& spec, Index nodes, double p, std::uint64_t seed) {
  if (spec == "cycle") return cycle_graph(nodes);
  if (spec == "binomial") return binomial_graph(nodes, p, seed);
  Index max_node = 0;
  const auto edges = io::read_edge_list(spec.substr(5), &max_node);
  if (max_node > nodes)
    throw Error(ErrorCode::InvalidConfig, spec + ": node " + std::to_string(max_node) +
                                              " exceeds the configured size " + std::to_string(nodes));
  return adjacency_from_edges(nodes, edges);
}

SolveReport solve(const ExperimentConfig& cfg, const Objective& f, const MhPoint& start,
                  const ProgressCallback& progress) {
  return cfg.method == Method::Rgd ? solve_rgd(f, start, cfg.solver, progress)
                                   : solve_rtr(f, start, cfg.solver, progress);
}

void gate(const ExperimentConfig& cfg, const Objective& f, ExperimentResult& out) {
  if (!cfg.fd_gate) return;
  out.fd = fd_check(f, ConstraintManifold::parse(cfg.kind, cfg.m), cfg.r, cfg.seed + 7);
  if (!out.fd->passed)
    throw Error(ErrorCode::ObjectiveError,
                "finite-difference gate failed: gradient error " + std::to_string(out.fd->grad_rel_error) +
                    ", Hessian error " + std::to_string(out.fd->hess_rel_error));
}

void finish(const ExperimentConfig& cfg, const Objective& f, SolveReport rep, ExperimentResult& out) {
  const MhPoint& x = rep.final_point;
  out.X = x.X_dense();
  out.egrad = f.egrad(x.X()).to_dense();
  out.stationarity = variational::certify(out.X, out.egrad, x.r(), x.manifold(), cfg.rank_tol);
  rep.final_stationarity = out.stationarity->at_detected_rank;
  rep.final_stationarity_forced = out.stationarity->at_forced_rank;
  rep.final_detected_rank = out.stationarity->detected_rank;
  out.report = std::move(rep);
}

} // namespace

double ExperimentResult::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw Error(ErrorCode::InvalidInput, "no metric '" + key + "'");
}

bool ExperimentResult::has_metric(const std::string& key) const {
  return std::any_of(metrics.begin(), metrics.end(), [&](const auto& kv) { return kv.first == key; });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress) {
  ExperimentResult out;
  out.task = cfg.task;
  switch (cfg.task) {
  case Task::Fitting: {
    auto data = std::make_shared<MaskedFittingData>(
        make_fitting_data(cfg.m, cfg.n, cfg.r_star, cfg.oversampling, cfg.seed));
    FittingObjective f(data);
    gate(cfg, f, out);
    const MhPoint start = fitting_start(*data, cfg.r, cfg.omega, cfg.seed + 1);
    SolveReport rep = solve(cfg, f, start, progress);
    out.metrics.emplace_back("test_error", f.test_error(rep.final_point.X()));
    out.metrics.emplace_back("train_f", rep.final_f);
    finish(cfg, f, std::move(rep), out);
    break;
  }
  case Task::GraphSim: {
    GraphPair g;
    g.A = make_graph(cfg.graph_a, cfg.m, cfg.p_a, cfg.seed);
    g.B = make_graph(cfg.graph_b, cfg.n, cfg.p_b, cfg.seed + 1);
    const BlondelResult oracle = blondel_similarity(g, cfg.blondel_steps);
    GraphSimilarityObjective f(g);
    gate(cfg, f, out);
    SolveReport rep = solve(cfg, f, graph_similarity_start(cfg.m, cfg.n, cfg.r, cfg.omega), progress);
    const Matrix X = rep.final_point.X_dense();
    // X and -X give the same objective
    const double err = std::min((X - oracle.X).norm(), (X + oracle.X).norm()) / oracle.X.norm();
    const linalg::SvdFactors sv = linalg::thin_svd(oracle.X);
    out.metrics.emplace_back("relative_error", err);
    out.metrics.emplace_back("oracle_steps", oracle.even_steps);
    out.metrics.emplace_back("oracle_change", oracle.last_change);
    out.metrics.emplace_back("oracle_sigma_ratio", sv.S.size() > 1 ? sv.S(1) / sv.S(0) : 0.0);
    finish(cfg, f, std::move(rep), out);
    break;
  }
  case Task::Sync: {
    auto data = std::make_shared<SynchronizationData>(
        cfg.connectivity_p > 0 ? make_synchronization_data_p(cfg.cams, cfg.connectivity_p, cfg.noise, cfg.seed)
                               : make_synchronization_data(cfg.cams, cfg.edges, cfg.noise, cfg.seed));
    SynchronizationObjective f(data);
    gate(cfg, f, out);
    const MhPoint truth = synchronization_truth_point(*data, cfg.omega);
    SolveReport rep = solve(cfg, f, synchronization_start(*data, cfg.omega, cfg.seed + 1), progress);
    const std::vector<Matrix> R = recovered_rotations(rep.final_point);
    std::vector<double> e = edge_errors(*data, R);
    std::sort(e.begin(), e.end());
    double min_det = 1.0;
    for (const Matrix& Ri : R) min_det = std::min(min_det, Ri.determinant());
    out.metrics.emplace_back("edges", static_cast<double>(data->edges.size()));
    out.metrics.emplace_back("max_edge_error", e.back());
    out.metrics.emplace_back("median_edge_error", e[e.size() / 2]);
    out.metrics.emplace_back("min_determinant", min_det);
    out.metrics.emplace_back("f_truth", f.value({truth.H(), truth.V()}));
    finish(cfg, f, std::move(rep), out);
    break;
  }
  case Task::Markov: {
    auto data = std::make_shared<MarkovData>(make_markov_data(cfg.m, cfg.r_star, cfg.samples_per_row, cfg.seed));
    MarkovObjective f(data);
    gate(cfg, f, out);
    const MhPoint start = cfg.init == "random" ? markov_start(*data, cfg.r, cfg.omega, cfg.seed + 1)
                                               : markov_spectral_start(*data, cfg.r, cfg.omega);
    SolveReport rep = solve(cfg, f, start, progress);
    const MhPoint truth = markov_truth_point(*data, cfg.omega);
    const double f_truth = f.value({truth.H(), truth.V()});
    out.metrics.emplace_back("f_truth", f_truth);
    out.metrics.emplace_back("f_ratio", f_truth > 0 ? rep.final_f / f_truth : 0.0);
    finish(cfg, f, std::move(rep), out);
    // rows of X .* X are probability vectors
    out.metrics.emplace_back("row_sum_error",
                             (out.X.cwiseAbs2().rowwise().sum().array() - 1.0).abs().maxCoeff());
    break;
  }
  case Task::GeomTest: {
    PropertySuiteOptions opts;
    opts.m = cfg.m;
    opts.n = cfg.n;
    opts.r = cfg.r;
    opts.kind = cfg.kind;
    opts.omega = cfg.omega;
    opts.seed = cfg.seed;
    opts.instances = cfg.instances;
    out.properties = run_property_suite(opts);
    break;
  }
  }
  return out;
}

} // namespace spacedec
