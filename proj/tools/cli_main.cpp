#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contagion/exact.hpp"
#include "contagion/experiment.hpp"
#include "contagion/graph.hpp"
#include "contagion/io.hpp"
#include "contagion/pmf.hpp"
#include "contagion/recursion.hpp"
#include "contagion/sim.hpp"
#include "contagion/threshold.hpp"
#include "json.hpp"

namespace contagion {
namespace {

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

struct SeedOpt {
  std::uint64_t value = 0;
  bool set = false;
};

void add_seed(CLI::App* cmd, SeedOpt& seed) {
  cmd->add_option_function<std::uint64_t>(
         "--seed", [&seed](std::uint64_t v) { seed.value = v; seed.set = true; },
         "master seed (required; no wall-clock default)")
      ->required();
}

int cmd_sample_graph(const std::string& family, const std::string& dist_spec,
                     const std::string& root_dist_spec, int depth, int m, int m2, int h, int n,
                     std::uint64_t seed, const std::string& out) {
  RootedGraph g;
  if (family == "config") {
    HalfEdgeGraph he = sample_config_model(n, parse_dist_spec(dist_spec), seed);
    RootedGraph rg;
    rg.adj = he.adjacency();
    rg.root = 0;
    rg.kind = GraphKind::General;
    rg.compute_depths();
    // configuration graphs may be disconnected; report components via depth -1 is
    // not representable, so serialize only the adjacency-complete header form
    std::ostringstream os;
    os << he.n << " " << he.matching.size() << " 0 general\n";
    for (auto& [a, b] : he.matching) os << he.vertex_of(a) << " " << he.vertex_of(b) << "\n";
    emit(out, os.str());
    std::cout << "sample-graph config n=" << he.n << " edges=" << he.matching.size() << "\n";
    return 0;
  }
  Pmf dist = parse_dist_spec(dist_spec);
  Pmf root_dist = root_dist_spec.empty() ? dist : parse_dist_spec(root_dist_spec);
  if (family == "gw")
    g = sample_gw(dist, depth, seed);
  else if (family == "gw-mixed")
    g = sample_gw_mixed(root_dist, dist, depth, seed);
  else if (family == "gwc1")
    g = sample_gwc1(dist, m, depth, seed);
  else if (family == "gwc2")
    g = sample_gwc2(dist, m, depth, seed);
  else if (family == "egw")
    g = sample_egw(root_dist, dist, h, m, depth, seed);
  else if (family == "line-f")
    g = build_line_f(dist, m, depth, seed);
  else if (family == "line-a")
    g = build_line_a(dist, m, m2, depth, seed);
  else
    throw CLI::ValidationError("--family", "unknown family " + family);
  g.validate();
  emit(out, graph_to_text(g));
  std::cout << "sample-graph " << family << " n=" << g.n() << " depth=" << g.tree_depth()
            << "\n";
  return 0;
}

int cmd_simulate(const std::string& graph_path, double lambda, int reps, std::uint64_t seed,
                 const std::string& mode_name, double horizon, const std::string& out,
                 const std::string& trace_path) {
  RootedGraph g = graph_from_text(read_file(graph_path));
  SimMode mode = mode_name == "root-added" ? SimMode::RootAdded : SimMode::Plain;
  if (!trace_path.empty()) {
    TimelineSpec tl{derive_key(seed, "sim", std::uint64_t(0)), lambda, 1.0};
    SimParams p;
    p.lambda = lambda;
    p.horizon = horizon;
    SimOptions opt;
    opt.record_flips = true;
    Trajectory tr = simulate(g, tl, p, {g.root}, mode, opt);
    write_file(trace_path, trajectory_to_csv(tr.flips));
  }
  std::vector<double> times(reps, 0.0);
  std::vector<char> censored(reps, 0);
  parallel_replicas(
      reps,
      [&](long i) {
        TimelineSpec tl{derive_key(seed, "sim", static_cast<std::uint64_t>(i)), lambda, 1.0};
        SimParams p;
        p.lambda = lambda;
        p.horizon = horizon;
        Trajectory tr = simulate(g, tl, p, {g.root}, mode);
        times[i] = tr.end_time;
        censored[i] = tr.status != Terminal::Extinct;
      },
      default_threads());
  double mean = 0.0;
  long cens = 0;
  for (int i = 0; i < reps; ++i) {
    mean += times[i];
    cens += censored[i];
  }
  mean /= reps;
  double var = 0.0;
  for (double t : times) var += (t - mean) * (t - mean);
  var /= std::max(1, reps - 1);
  nlohmann::json j;
  j["mode"] = mode_name;
  j["lambda"] = format_double(lambda);
  j["replicas"] = reps;
  j["mean_time"] = format_double(mean);
  j["se"] = format_double(std::sqrt(var / reps));
  j["censored"] = cens;
  j["seed"] = seed;
  j["seed_path"] = "seed/sim/<replica>";
  emit(out, j.dump(2) + "\n");
  std::cout << "simulate mean=" << format_double(mean) << " censored=" << cens << "\n";
  return 0;
}

int cmd_exact(const std::string& graph_path, double lambda, const std::string& out) {
  RootedGraph g = graph_from_text(read_file(graph_path));
  ExactResult r = exact_observables(g, lambda);
  emit(out, exact_result_to_json(r, lambda));
  std::cout << "exact R=" << format_double(r.R) << " S=" << format_double(r.S) << "\n";
  return 0;
}

int cmd_verify_recursions(int tree_count, const std::string& lambdas_csv, std::uint64_t seed,
                          const std::string& out) {
  auto trees = make_tree_panel(tree_count, derive_key(seed, "trees"), 12);
  auto lines = make_line_panel(std::max(4, tree_count / 10), derive_key(seed, "lines"), 3, 1);
  SweepSummary s = run_recursion_sweep(trees, lines, parse_doubles(lambdas_csv));
  emit(out, sweep_to_csv(s));
  std::cout << "verify-recursions rows=" << s.rows.size() << " violations=" << s.violations
            << " guard_active=" << s.guard_active << "/" << s.guarded_rows << "\n";
  return s.violations == 0 ? 0 : 2;
}

int cmd_estimate_threshold(const std::string& dist_spec, const std::string& root_spec,
                           double d_ref, int depth, int replicas, double p_star,
                           std::uint64_t seed, const std::string& out) {
  Pmf dist = parse_dist_spec(dist_spec);
  TreeFamily fam = root_spec.empty()
                       ? TreeFamily::gw(dist)
                       : TreeFamily::gw_mixed(parse_dist_spec(root_spec), dist);
  if (d_ref <= 0.0) d_ref = dist.mean();
  ThresholdEstimate est = estimate_lambda1(fam, d_ref, depth, SurvivalProxy::ReachDepth,
                                           replicas, p_star, seed);
  nlohmann::json j;
  j["family"] = est.family;
  j["proxy"] = est.proxy;
  j["depth"] = est.depth;
  j["p_star"] = format_double(est.p_star);
  j["replicas_per_probe"] = est.replicas_per_probe;
  j["horizon"] = format_double(1e4);
  j["lambda_hat"] = format_double(est.lambda_hat);
  j["bracket"] = {format_double(est.lo), format_double(est.hi)};
  j["lambda_hat_times_d"] = format_double(est.lambda_hat * d_ref);
  j["seed"] = est.seed;
  j["seed_path"] = "seed/probe/<probe>/rep/<replica>";
  auto arr = nlohmann::json::array();
  for (auto& r : est.trace)
    arr.push_back({{"lambda", format_double(r.lambda)},
                   {"p_hat", format_double(r.p_hat)},
                   {"se", format_double(r.se)}});
  j["trace"] = arr;
  emit(out, j.dump(2) + "\n");
  std::cout << "estimate-threshold lambda_hat=" << format_double(est.lambda_hat) << "\n";
  return 0;
}

int cmd_survival_scaling(const std::string& dist_spec, double lambda, const std::string& ns,
                         int reps, double cap, std::uint64_t seed, const std::string& out) {
  ScalingTable t = survival_time_scaling(parse_ints(ns), parse_dist_spec(dist_spec), lambda,
                                         reps, cap, seed);
  std::ostringstream os;
  os << "n,median,iqr_lo,iqr_hi,cap_fraction,censored,seed,seed_path\n";
  for (auto& r : t.rows)
    os << r.n << "," << format_double(r.median) << "," << format_double(r.iqr_lo) << ","
       << format_double(r.iqr_hi) << "," << format_double(r.cap_fraction) << "," << r.censored
       << "," << seed << ",seed/scale/" << r.n << "/<replica>\n";
  os << "# loglog_slope=" << format_double(t.loglog_slope) << " cap=" << format_double(t.cap)
     << "\n";
  emit(out, os.str());
  std::cout << "survival-scaling slope=" << format_double(t.loglog_slope) << "\n";
  return 0;
}

int cmd_good_scan(int n, const std::string& dist_spec, double lambda, long kappa, double theta,
                  int L0, double c0, std::uint64_t seed, const std::string& out) {
  Pmf mu = parse_dist_spec(dist_spec);
  PreprocessParams pp = choose_preprocess_params(mu);
  HalfEdgeGraph g = sample_config_model(n, mu, derive_key(seed, "graph"));
  PreprocessReport pre = preprocess_graph(g, pp);
  Pmf surgery = surgery_distribution(mu, pp);
  Pmf tilted = size_biased(surgery);
  if (kappa <= 0) kappa = std::max<long>(1, n / 10);
  GoodVertexParams gv = derive_good_vertex_params(pre.graph.n, kappa, tilted.mean(), lambda,
                                                  theta, L0, c0, pp.j0);
  GoodScanResult res = good_vertex_scan(pre.graph, gv, surgery);
  nlohmann::json j;
  j["n"] = n;
  j["n_prime"] = pre.graph.n;
  j["removed"] = pre.removed;
  j["j0"] = pp.j0;
  j["j1"] = pp.j1;
  j["eta0"] = format_double(pp.eta0);
  j["l1"] = gv.l1;
  j["l2"] = format_double(gv.l2);
  j["l"] = format_double(gv.l);
  j["good_count"] = res.good.size();
  j["p0_hat"] = format_double(res.p0_hat);
  j["p0_model_lower_bound_report_only"] = format_double(res.p0_lower_bound_report);
  j["truncated_balls"] = res.truncated;
  j["seed"] = seed;
  j["seed_path"] = "seed/graph";
  emit(out, j.dump(2) + "\n");
  std::cout << "good-scan p0_hat=" << format_double(res.p0_hat) << "\n";
  return 0;
}

int cmd_tail_probe(const std::string& dist_spec, int depth, double eps, int samples,
                   const std::string& tgrid, std::uint64_t seed, const std::string& out) {
  auto rows = tail_probe_S(parse_dist_spec(dist_spec), depth, eps, samples,
                           parse_doubles(tgrid), seed);
  std::ostringstream os;
  os << "t,exceed,p_hat,wilson_lo,wilson_hi,reference,flagged,seed,seed_path\n";
  bool any = false;
  for (auto& r : rows) {
    os << format_double(r.t) << "," << r.exceed << "," << format_double(r.p_hat) << ","
       << format_double(r.wilson_lo) << "," << format_double(r.wilson_hi) << ","
       << format_double(r.reference) << "," << (r.flagged ? 1 : 0) << "," << seed
       << ",seed/tp/<sample>\n";
    any = any || r.flagged;
  }
  emit(out, os.str());
  std::cout << "tail-probe flagged=" << (any ? "yes (soft)" : "no") << "\n";
  return 0;
}

}  // namespace
}  // namespace contagion

int contagion_cli_main(int argc, const char* const* argv) {
  using namespace contagion;
  CLI::App app{"contact-process experiment toolkit"};
  app.set_config("--config");
  app.require_subcommand(1);

  // sample-graph
  auto* sg = app.add_subcommand("sample-graph", "generate a graph and write its edge list");
  std::string sg_family, sg_dist, sg_root_dist, sg_out;
  int sg_depth = 0, sg_m = 1, sg_m2 = 1, sg_h = 0, sg_n = 0;
  SeedOpt sg_seed;
  sg->add_option("--family", sg_family)->required();
  sg->add_option("--dist", sg_dist)->required();
  sg->add_option("--root-dist", sg_root_dist);
  sg->add_option("--depth", sg_depth);
  sg->add_option("--m", sg_m);
  sg->add_option("--m2", sg_m2);
  sg->add_option("--hdepth", sg_h);
  sg->add_option("--n", sg_n);
  sg->add_option("--out", sg_out);
  add_seed(sg, sg_seed);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo survival/excursion times");
  std::string sim_graph, sim_mode = "plain", sim_out, sim_trace;
  double sim_lambda = 1.0, sim_horizon = 1e4;
  int sim_reps = 1000;
  SeedOpt sim_seed;
  sim->add_option("--graph", sim_graph)->required();
  sim->add_option("--lambda", sim_lambda)->required();
  sim->add_option("--reps", sim_reps);
  sim->add_option("--mode", sim_mode);
  sim->add_option("--horizon", sim_horizon);
  sim->add_option("--out", sim_out);
  sim->add_option("--trace", sim_trace);
  add_seed(sim, sim_seed);

  auto* ex = app.add_subcommand("exact", "exact observables on a small graph");
  std::string ex_graph, ex_out;
  double ex_lambda = 1.0;
  ex->add_option("--graph", ex_graph)->required();
  ex->add_option("--lambda", ex_lambda)->required();
  ex->add_option("--out", ex_out);

  auto* vr = app.add_subcommand("verify-recursions", "oracle sweep of the tree inequalities");
  std::string vr_panel = "default", vr_lambdas = "0.1,0.5,1,2", vr_out;
  int vr_trees = 200;
  SeedOpt vr_seed;
  vr->add_option("--panel", vr_panel);
  vr->add_option("--trees", vr_trees);
  vr->add_option("--lambdas", vr_lambdas);
  vr->add_option("--out", vr_out);
  add_seed(vr, vr_seed);

  auto* et = app.add_subcommand("estimate-threshold", "bisection estimate of lambda_1");
  std::string et_dist, et_root, et_out;
  double et_d = 0.0, et_pstar = 0.05;
  int et_depth = 8, et_reps = 1000;
  SeedOpt et_seed;
  et->add_option("--dist", et_dist)->required();
  et->add_option("--root-dist", et_root);
  et->add_option("--d", et_d);
  et->add_option("--depth", et_depth);
  et->add_option("--replicas", et_reps);
  et->add_option("--pstar", et_pstar);
  et->add_option("--out", et_out);
  add_seed(et, et_seed);

  auto* ss = app.add_subcommand("survival-scaling", "survival time vs n on random graphs");
  std::string ss_dist, ss_ns = "50,100,200", ss_out;
  double ss_lambda = 0.05, ss_cap = 1e3;
  int ss_reps = 50;
  SeedOpt ss_seed;
  ss->add_option("--dist", ss_dist)->required();
  ss->add_option("--lambda", ss_lambda)->required();
  ss->add_option("--n", ss_ns);
  ss->add_option("--reps", ss_reps);
  ss->add_option("--cap", ss_cap);
  ss->add_option("--out", ss_out);
  add_seed(ss, ss_seed);

  auto* gs = app.add_subcommand("good-scan", "good-vertex fraction of a preprocessed graph");
  std::string gs_dist, gs_out;
  int gs_n = 500, gs_L0 = 2;
  double gs_lambda = 0.5, gs_theta = 1.2, gs_c0 = 0.25;
  long gs_kappa = 0;
  SeedOpt gs_seed;
  gs->add_option("--n", gs_n);
  gs->add_option("--dist", gs_dist)->required();
  gs->add_option("--lambda", gs_lambda);
  gs->add_option("--kappa", gs_kappa);
  gs->add_option("--theta", gs_theta);
  gs->add_option("--L0", gs_L0);
  gs->add_option("--c0", gs_c0);
  gs->add_option("--out", gs_out);
  add_seed(gs, gs_seed);

  auto* tp = app.add_subcommand("tail-probe", "tail of the certified excursion bound");
  std::string tp_dist, tp_grid = "4,8,16", tp_out;
  int tp_depth = 3, tp_samples = 10000;
  double tp_eps = 0.5;
  SeedOpt tp_seed;
  tp->add_option("--dist", tp_dist)->required();
  tp->add_option("--depth", tp_depth);
  tp->add_option("--eps", tp_eps);
  tp->add_option("--samples", tp_samples);
  tp->add_option("--tgrid", tp_grid);
  tp->add_option("--out", tp_out);
  add_seed(tp, tp_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sg->parsed())
      return cmd_sample_graph(sg_family, sg_dist, sg_root_dist, sg_depth, sg_m, sg_m2, sg_h,
                              sg_n, sg_seed.value, sg_out);
    if (sim->parsed())
      return cmd_simulate(sim_graph, sim_lambda, sim_reps, sim_seed.value, sim_mode,
                          sim_horizon, sim_out, sim_trace);
    if (ex->parsed()) return cmd_exact(ex_graph, ex_lambda, ex_out);
    if (vr->parsed())
      return cmd_verify_recursions(vr_trees, vr_lambdas, vr_seed.value, vr_out);
    if (et->parsed())
      return cmd_estimate_threshold(et_dist, et_root, et_d, et_depth, et_reps, et_pstar,
                                    et_seed.value, et_out);
    if (ss->parsed())
      return cmd_survival_scaling(ss_dist, ss_lambda, ss_ns, ss_reps, ss_cap, ss_seed.value,
                                  ss_out);
    if (gs->parsed())
      return cmd_good_scan(gs_n, gs_dist, gs_lambda, gs_kappa, gs_theta, gs_L0, gs_c0,
                           gs_seed.value, gs_out);
    if (tp->parsed())
      return cmd_tail_probe(tp_dist, tp_depth, tp_eps, tp_samples, tp_grid, tp_seed.value,
                            tp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#ifndef CONTAGION_CLI_NO_MAIN
int main(int argc, char** argv) { return contagion_cli_main(argc, argv); }
#endif
