#include "contagion/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contagion/experiment.hpp"
#include "contagion/recursion.hpp"

namespace contagion {

SurvivalEstimate survival_probability(const TreeFamily& family, double lambda, int depth,
                                      double horizon, SurvivalProxy proxy, int replicas,
                                      std::uint64_t seed, double lambda_base) {
  if (replicas < 100) throw std::invalid_argument("survival_probability: replicas >= 100");
  if (lambda_base <= 0.0) lambda_base = lambda;
  std::vector<char> hit(replicas, 0), cens(replicas, 0);
  parallel_replicas(
      replicas,
      [&](long i) {
        LazyTreeParams p;
        p.root_dist = family.root_dist;
        p.other_dist = family.other_dist;
        p.max_depth = depth;
        p.lambda = lambda;
        p.lambda_base = lambda_base;
        p.horizon = horizon;
        LazyRunResult r = run_lazy_tree(p, derive_key(seed, "rep", static_cast<std::uint64_t>(i)),
                                        proxy == SurvivalProxy::ReachDepth ? depth : -1);
        if (proxy == SurvivalProxy::ReachDepth) {
          hit[i] = r.outcome == LazyOutcome::ReachedDepth;
          cens[i] = r.outcome == LazyOutcome::HorizonCensored ||
                    r.outcome == LazyOutcome::EventCapCensored;
        } else {
          hit[i] = r.outcome == LazyOutcome::HorizonCensored;  // still alive at horizon
          cens[i] = r.outcome == LazyOutcome::EventCapCensored;
        }
      },
      default_threads());
  SurvivalEstimate est;
  est.replicas = replicas;
  for (int i = 0; i < replicas; ++i) {
    est.successes += hit[i];
    est.censored += cens[i];
  }
  est.p_hat = static_cast<double>(est.successes) / replicas;
  est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / replicas);
  return est;
}

ThresholdEstimate estimate_lambda1(const TreeFamily& family, double d_ref, int depth,
                                   SurvivalProxy proxy, int replicas, double p_star,
                                   std::uint64_t seed) {
  ThresholdEstimate est;
  est.family = family.label;
  est.proxy = proxy == SurvivalProxy::ReachDepth ? "reach-depth" : "alive-at-horizon";
  est.depth = depth;
  est.p_star = p_star;
  est.replicas_per_probe = replicas;
  est.seed = seed;

  auto probe = [&](double lam, int index) {
    SurvivalEstimate e =
        survival_probability(family, lam, depth, 1e4, proxy, replicas,
                             derive_key(seed, "probe", static_cast<std::uint64_t>(index)));
    est.trace.push_back({lam, e.p_hat, e.se});
    return e.p_hat;
  };

  double lo = 0.2 / d_ref, hi = 4.0 / d_ref;
  int idx = 0;
  double p_lo = probe(lo, idx++), p_hi = probe(hi, idx++);
  for (int widen = 0; (p_lo >= p_star || p_hi <= p_star) && widen < 3; ++widen) {
    if (p_lo >= p_star) {
      lo *= 0.5;
      p_lo = probe(lo, idx++);
    }
    if (p_hi <= p_star) {
      hi *= 2.0;
      p_hi = probe(hi, idx++);
    }
  }
  if (p_lo >= p_star || p_hi <= p_star) {
    std::string table;
    for (auto& r : est.trace)
      table += "  lambda=" + format_double(r.lambda) + " p=" + format_double(r.p_hat) + "\n";
    throw std::runtime_error("estimate_lambda1: probes do not straddle p*=" +
                             format_double(p_star) + "\n" + table);
  }
  while (hi - lo >= 0.02 / d_ref) {
    double mid = 0.5 * (lo + hi);
    double p_mid = probe(mid, idx++);
    if (p_mid < p_star)
      lo = mid;
    else
      hi = mid;
  }
  est.lo = lo;
  est.hi = hi;
  est.lambda_hat = 0.5 * (lo + hi);
  return est;
}

namespace {

RootedGraph config_as_rooted(const HalfEdgeGraph& g, int root) {
  RootedGraph out;
  out.adj = g.adjacency();
  out.root = root;
  out.kind = GraphKind::General;
  out.compute_depths();
  return out;
}

// Survival of a possibly disconnected graph: the graphical-representation
// maximum over components equals one run per component on the shared
// timeline; simpler and equivalent, run components separately and take the
// max of their extinction times.
double full_graph_survival(const HalfEdgeGraph& g, const TimelineSpec& tl, const SimParams& p,
                           const std::vector<int>& init, bool* censored) {
  auto adj = g.adjacency();
  std::vector<int> comp(g.n, -1);
  int ncomp = 0;
  for (int v = 0; v < g.n; ++v) {
    if (comp[v] >= 0) continue;
    std::vector<int> stack{v};
    comp[v] = ncomp;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int w : adj[x])
        if (comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  std::vector<std::vector<int>> init_by_comp(ncomp);
  for (int v : init) init_by_comp[comp[v]].push_back(v);
  double worst = 0.0;
  *censored = false;
  for (int c = 0; c < ncomp; ++c) {
    if (init_by_comp[c].empty()) continue;
    // restrict to the component
    std::vector<int> members;
    for (int v = 0; v < g.n; ++v)
      if (comp[v] == c) members.push_back(v);
    std::vector<int> local(g.n, -1);
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> cadj(members.size());
    std::vector<std::vector<std::pair<int, int>>> origin(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      int gv = members[i];
      for (std::size_t s = 0; s < adj[gv].size(); ++s) {
        cadj[i].push_back(local[adj[gv][s]]);
        origin[i].emplace_back(gv, static_cast<int>(s));
      }
    }
    std::vector<int> cinit;
    for (int v : init_by_comp[c]) cinit.push_back(local[v]);
    Trajectory tr = simulate_mapped(cadj, members, origin, cinit.front(), tl, p, cinit,
                                    SimMode::Plain, 0.0);
    worst = std::max(worst, tr.end_time);
    if (tr.status != Terminal::Extinct) *censored = true;
  }
  return worst;
}

}  // namespace

ScalingTable survival_time_scaling(const std::vector<int>& ns, const Pmf& dist, double lambda,
                                   int replicas, double cap, std::uint64_t seed) {
  ScalingTable table;
  table.cap = cap;
  std::vector<double> log_n, log_median;
  for (int n : ns) {
    std::vector<double> times(replicas, 0.0);
    std::vector<char> capped(replicas, 0);
    parallel_replicas(
        replicas,
        [&](long i) {
          std::uint64_t rs = derive_key(seed, "scale", static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(i));
          HalfEdgeGraph g = sample_config_model(n, dist, derive_key(rs, "graph"));
          TimelineSpec tl{derive_key(rs, "tl"), lambda, 1.0};
          SimParams p;
          p.lambda = lambda;
          p.horizon = cap;
          std::vector<int> all(g.n);
          for (int v = 0; v < g.n; ++v) all[v] = v;
          bool cens = false;
          times[i] = full_graph_survival(g, tl, p, all, &cens);
          capped[i] = cens;
        },
        default_threads());
    ScalingRow row;
    row.n = n;
    row.median = median_of(times);
    row.iqr_lo = quantile_of(times, 0.25);
    row.iqr_hi = quantile_of(times, 0.75);
    long hits = 0;
    for (char c : capped) hits += c;
    row.cap_fraction = static_cast<double>(hits) / replicas;
    row.censored = hits;
    table.rows.push_back(row);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_median.push_back(std::log(std::max(row.median, 1e-9)));
  }
  if (table.rows.size() >= 2) table.loglog_slope = regression_slope(log_n, log_median);
  return table;
}

double single_seed_survival(int n, const Pmf& dist, double lambda, int replicas, double cap,
                            std::uint64_t seed, long* censored) {
  std::vector<char> alive(replicas, 0);
  parallel_replicas(
      replicas,
      [&](long i) {
        std::uint64_t rs = derive_key(seed, "single", static_cast<std::uint64_t>(i));
        HalfEdgeGraph g = sample_config_model(n, dist, derive_key(rs, "graph"));
        int v0 = static_cast<int>(stream_u64(derive_key(rs, "init"), 0) % g.n);
        TimelineSpec tl{derive_key(rs, "tl"), lambda, 1.0};
        SimParams p;
        p.lambda = lambda;
        p.horizon = cap;
        RootedGraph rg = config_as_rooted(g, v0);
        Trajectory tr = simulate(rg, tl, p, {v0}, SimMode::Plain);
        alive[i] = tr.status == Terminal::HorizonCensored;
      },
      default_threads());
  long hits = 0;
  for (char c : alive) hits += c;
  if (censored) *censored = hits;
  return static_cast<double>(hits) / replicas;
}

std::vector<TailProbeRow> tail_probe_S(const Pmf& dist, int depth, double eps, int samples,
                                       const std::vector<double>& t_grid, std::uint64_t seed) {
  double d = dist.mean();
  double lambda = (1.0 - eps) / d;
  std::vector<double> bounds(samples, 0.0);
  parallel_replicas(
      samples,
      [&](long i) {
        RootedGraph t = sample_gw(dist, depth, derive_key(seed, "tp", static_cast<std::uint64_t>(i)));
        bounds[i] = recursive_bound_calculator(t, lambda);
      },
      default_threads());
  std::vector<TailProbeRow> rows;
  for (double t : t_grid) {
    TailProbeRow row;
    row.t = t;
    for (double b : bounds)
      if (b >= t) ++row.exceed;
    row.p_hat = static_cast<double>(row.exceed) / samples;
    auto w = wilson_interval(row.exceed, samples);
    row.wilson_lo = w.lo;
    row.wilson_hi = w.hi;
    row.reference = std::pow(t, -std::sqrt(d)) / (std::log(t) * std::log(t));
    row.flagged = row.wilson_lo > row.reference;
    rows.push_back(row);
  }
  return rows;
}

GoodTreeVerdict is_good_tree(const RootedGraph& tree, const GoodTreeParams& params,
                             double lambda, int replicas, std::uint64_t seed) {
  if (params.theta <= 1.0) throw std::invalid_argument("is_good_tree: theta > 1 required");
  if (params.eps <= 0.0 || params.eps >= 1.0)
    throw std::invalid_argument("is_good_tree: eps in (0,1) required");
  const int target_depth = params.k * params.L0;
  const double t_end = params.k * params.s0;
  const double need = std::pow(params.theta, params.k);

  // Restrict to the truncation: keep vertices of depth <= k L0.
  std::vector<int> keep, local(tree.n(), -1);
  for (int v = 0; v < tree.n(); ++v)
    if (tree.depth[v] <= target_depth) {
      local[v] = static_cast<int>(keep.size());
      keep.push_back(v);
    }
  std::vector<std::vector<int>> adj(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (int w : tree.adj[keep[i]])
      if (local[w] >= 0) adj[i].push_back(local[w]);
  RootedGraph trunc;
  trunc.adj = std::move(adj);
  trunc.root = local[tree.root];
  trunc.kind = GraphKind::GwTree;
  trunc.compute_depths();

  std::vector<char> hits(replicas, 0);
  parallel_replicas(
      replicas,
      [&](long i) {
        TimelineSpec tl{derive_key(seed, "good", static_cast<std::uint64_t>(i)), lambda, 1.0};
        SimParams p;
        p.lambda = lambda;
        p.horizon = t_end;
        Trajectory tr = simulate(trunc, tl, p, {trunc.root}, SimMode::Plain);
        long count = 0;
        if (params.union_variant) {
          for (int v = 0; v < trunc.n(); ++v)
            if (trunc.depth[v] == target_depth && tr.on_flips[v] > 0) ++count;
        } else if (tr.status == Terminal::HorizonCensored) {
          for (int v = 0; v < trunc.n(); ++v)
            if (trunc.depth[v] == target_depth && tr.final_state[v]) ++count;
        }
        hits[i] = static_cast<double>(count) >= need;
      },
      default_threads());
  GoodTreeVerdict v;
  long s = 0;
  for (char h : hits) s += h;
  v.p_hat = static_cast<double>(s) / replicas;
  v.se = std::sqrt(v.p_hat * (1.0 - v.p_hat) / replicas);
  v.good = v.p_hat - 2.0 * v.se > params.eps;
  return v;
}

GoodVertexParams derive_good_vertex_params(long n, long kappa, double d_tilde, double lambda,
                                           double theta, int L0, double c0, int j0) {
  if (d_tilde <= 1.0) throw std::invalid_argument("good vertices: d_tilde > 1 required");
  GoodVertexParams p;
  p.kappa = kappa;
  p.c0 = c0;
  p.j0 = j0;
  p.d_tilde = d_tilde;
  double ratio = std::log(static_cast<double>(n) / kappa);
  p.l1 = std::max(1, static_cast<int>(std::ceil(
                         2.0 * std::log(std::max(ratio, 1.1)) / std::log(d_tilde))));
  double a = 2.0 * std::log(4.0 / (lambda * d_tilde)) / std::log(theta);
  p.l2 = std::max(0.0, a) * p.l1;
  p.l = 4.0 + p.l1 + p.l2 * L0;
  return p;
}

GoodScanResult good_vertex_scan(const HalfEdgeGraph& g, const GoodVertexParams& params,
                                const Pmf& surgery_law) {
  auto adj = g.adjacency();
  const int total_he = g.half_edge_count();
  std::vector<int> partner(total_he, -1);
  for (auto& [a, b] : g.matching) {
    partner[a] = b;
    partner[b] = a;
  }

  auto ball = [&](int v, int radius) {
    std::vector<int> dist(g.n, -1), members;
    std::vector<int> queue{v};
    dist[v] = 0;
    members.push_back(v);
    std::size_t head = 0;
    while (head < queue.size()) {
      int x = queue[head++];
      if (dist[x] >= radius) continue;
      for (int w : adj[x])
        if (dist[w] < 0) {
          dist[w] = dist[x] + 1;
          members.push_back(w);
          queue.push_back(w);
        }
    }
    return members;
  };

  const double expand_need = params.c0 * std::pow(params.d_tilde, params.l1);
  const long want_out = static_cast<long>(params.j0) * static_cast<long>(params.j0 - 1) *
                        (params.j0 - 1) * (params.j0 - 1);

  GoodScanResult res;
  std::vector<char> in_set(g.n, 0);
  for (int v = 0; v < g.n; ++v) {
    auto n3 = ball(v, 3);
    for (int x : n3) in_set[x] = 1;
    // outgoing half-edges of N(v,3)
    std::vector<int> outgoing;
    for (int x : n3)
      for (int he = g.offset[x]; he < g.offset[x + 1]; ++he)
        if (!in_set[g.vertex_of(partner[he])]) outgoing.push_back(he);
    bool degree_exact = static_cast<long>(outgoing.size()) == want_out;
    for (int x : n3) in_set[x] = 0;
    if (!degree_exact) continue;

    auto n3l = ball(v, 3 + params.l1);
    bool truncated = static_cast<int>(n3l.size()) == g.n;
    std::vector<char> in_cone(g.n, 0);
    for (int x : n3l) in_cone[x] = 1;

    bool good = !truncated;
    for (int he : outgoing) {
      if (!good) break;
      int u = g.vertex_of(partner[he]);
      auto su = ball(u, params.l1);
      if (static_cast<int>(su.size()) == g.n) {
        truncated = true;
        good = false;
        break;
      }
      std::vector<char> in_w(g.n, 0);
      long count = 0;
      for (int x : su)
        if (!in_cone[x]) in_w[x] = 1;
      for (int x : su) {
        if (!in_w[x]) continue;
        for (int h2 = g.offset[x]; h2 < g.offset[x + 1]; ++h2)
          if (!in_w[g.vertex_of(partner[h2])]) ++count;
      }
      if (static_cast<double>(count) < expand_need) good = false;
    }
    if (truncated) ++res.truncated;
    if (good) res.good.push_back(v);
  }
  res.p0_hat = g.n ? static_cast<double>(res.good.size()) / g.n : 0.0;
  res.p0_lower_bound_report =
      std::pow(surgery_law(params.j0), std::pow(static_cast<double>(params.j0), 4.0)) *
      std::pow(params.c0, static_cast<double>(params.j0) *
                              std::pow(static_cast<double>(params.j0 - 1), 3.0));
  return res;
}

}  // namespace contagion
