#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contagion/graph.hpp"
#include "contagion/lazy_tree.hpp"
#include "contagion/sim.hpp"

namespace contagion {

enum class SurvivalProxy { ReachDepth, AliveAtHorizon };

struct TreeFamily {
  Pmf root_dist;
  Pmf other_dist;
  std::string label;

  static TreeFamily gw(const Pmf& dist) { return {dist, dist, "gw(" + dist.label() + ")"}; }
  static TreeFamily gw_mixed(const Pmf& r, const Pmf& o) {
    return {r, o, "gw(" + r.label() + ";" + o.label() + ")"};
  }
};

struct SurvivalEstimate {
  double p_hat = 0.0;
  double se = 0.0;
  long successes = 0;
  long censored = 0;
  long replicas = 0;
};

// Fraction of fresh-tree replicas whose infection meets the proxy event.
SurvivalEstimate survival_probability(const TreeFamily& family, double lambda, int depth,
                                      double horizon, SurvivalProxy proxy, int replicas,
                                      std::uint64_t seed, double lambda_base = 0.0);

struct ProbeRecord {
  double lambda;
  double p_hat;
  double se;
};

struct ThresholdEstimate {
  std::string family;
  std::string proxy;
  double lambda_hat = 0.0;
  double lo = 0.0, hi = 0.0;
  int depth = 0;
  double p_star = 0.0;
  int replicas_per_probe = 0;
  std::uint64_t seed = 0;
  std::vector<ProbeRecord> trace;
};

// Bisection on lambda against the reach-depth (or horizon) proxy. The
// initial bracket [0.2/d, 4/d] widens up to three times if it fails to
// straddle p_star; the search stops when the bracket is below 0.02/d.
ThresholdEstimate estimate_lambda1(const TreeFamily& family, double d_ref, int depth,
                                   SurvivalProxy proxy, int replicas, double p_star,
                                   std::uint64_t seed);

struct ScalingRow {
  int n = 0;
  double median = 0.0;
  double iqr_lo = 0.0, iqr_hi = 0.0;
  double cap_fraction = 0.0;
  long censored = 0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  double loglog_slope = 0.0;  // of median survival time against n
  double cap = 0.0;
};

// Survival time of the everywhere-infected process on fresh configuration
// graphs, one graph per replica.
ScalingTable survival_time_scaling(const std::vector<int>& ns, const Pmf& dist, double lambda,
                                   int replicas, double cap, std::uint64_t seed);

// Fraction of runs started from one uniformly random vertex that survive
// to the cap.
double single_seed_survival(int n, const Pmf& dist, double lambda, int replicas, double cap,
                            std::uint64_t seed, long* censored = nullptr);

struct TailProbeRow {
  double t;
  long exceed = 0;
  double p_hat = 0.0;
  double wilson_hi = 0.0;
  double reference = 0.0;  // t^{-sqrt(d)} (log t)^{-2}
  bool flagged = false;    // lower confidence bound above the reference
  double wilson_lo = 0.0;
};

// Empirical tail of the certified excursion-time bound over sampled trees;
// exceeding the reference curve is reported, never fatal.
std::vector<TailProbeRow> tail_probe_S(const Pmf& dist, int depth, double eps, int samples,
                                       const std::vector<double>& t_grid, std::uint64_t seed);

struct GoodTreeParams {
  double s0 = 1.0;
  int L0 = 1;
  int k = 1;
  double theta = 1.1;
  double eps = 0.1;
  bool union_variant = false;  // count ever-infected by k*s0 instead of at it
};

struct GoodTreeVerdict {
  double p_hat = 0.0;
  double se = 0.0;
  bool good = false;  // p_hat - 2 se > eps
};

GoodTreeVerdict is_good_tree(const RootedGraph& tree, const GoodTreeParams& params,
                             double lambda, int replicas, std::uint64_t seed);

struct GoodVertexParams {
  long kappa = 0;
  double c0 = 0.1;
  int j0 = 3;
  int l1 = 1;
  double l2 = 0.0;
  double l = 0.0;
  double d_tilde = 1.0;
};

// l1 = ceil(2 log_dt log(n/kappa)), l2 = A l1 with (lambda dt / 2) theta^{A/2} = 2,
// l = 4 + l1 + l2 L0.
GoodVertexParams derive_good_vertex_params(long n, long kappa, double d_tilde, double lambda,
                                           double theta, int L0, double c0, int j0);

struct GoodScanResult {
  std::vector<int> good;
  double p0_hat = 0.0;
  long truncated = 0;  // balls that swallowed the whole graph
  double p0_lower_bound_report = 0.0;  // model-level bound, reported only
};

// Degree-exact 3-ball plus expansion test from the definition of good
// vertices; expects a preprocessed (degree-capped) graph.
GoodScanResult good_vertex_scan(const HalfEdgeGraph& g, const GoodVertexParams& params,
                                const Pmf& surgery_law);

}  // namespace contagion
