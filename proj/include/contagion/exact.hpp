#pragma once

#include <map>
#include <string>
#include <vector>

#include "contagion/graph.hpp"

namespace contagion {

// Exact expectations for the contact process on small graphs, by linear
// algebra over the 2^n configuration space. The hard cap keeps solves
// tractable; everything the recursion checks need fits well below it.
constexpr int kExactVertexCap = 22;

struct SolveDiag {
  double residual = 0.0;
  std::string method;
};

enum class ChainMode { Plain, RootAdded };

// Expected time for the plain process from the root-only state to reach
// all-healthy.
double expected_survival_time(const RootedGraph& g, double lambda, SolveDiag* diag = nullptr);

// Expected first time the root-added process empties the graph.
double expected_excursion_time(const RootedGraph& g, double lambda, SolveDiag* diag = nullptr);

// Stationary probability of the all-healthy state under the root-added
// dynamics; satisfies pi0 * (1 + lambda * S) = 1.
double stationary_at_zero(const RootedGraph& g, double lambda, SolveDiag* diag = nullptr);

// Expected number of 0->1 flips at the marked vertices during one excursion
// (root-added) or one plain run from the root.
double expected_transition_counts(const RootedGraph& g, double lambda, ChainMode mode,
                                  const std::vector<int>& marked_vertices,
                                  SolveDiag* diag = nullptr);

enum class LeafVariant { Excursion, Plain };

double expected_leaf_infections(const RootedGraph& tree, double lambda, int l,
                                LeafVariant variant, SolveDiag* diag = nullptr);

// Expected infections at the recorded end vertices of a line graph, with
// the initial infection counted when an end vertex is the root.
double expected_end_infections(const RootedGraph& line_graph, double lambda,
                               SolveDiag* diag = nullptr);

struct ProductChainResult {
  std::vector<double> S_i;       // excursion started from tree i's root
  double S_mean = 0.0;           // their average
  double identity_residual = 0;  // |1 + lambda*D*S - prod(1 + lambda*S(T_i))|
};

// Product of independent root-added chains, one per tree; checks the
// product identity against per-tree excursion times.
ProductChainResult product_chain_excursion(const std::vector<RootedGraph>& trees,
                                           double lambda);

struct ExactResult {
  double R = 0.0;
  double S = 0.0;
  double pi0 = 0.0;
  std::map<int, double> M;      // depth -> excursion leaf infections
  std::map<int, double> Mbar;   // depth -> plain-run leaf infections
  double B = -1.0;              // line kinds only
  double identity_gap = 0.0;    // |pi0*(1+lambda*S) - 1|
  double max_residual = 0.0;
};

// Full observable set for one (graph, lambda).
ExactResult exact_observables(const RootedGraph& g, double lambda);

}  // namespace contagion
