#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contagion/pmf.hpp"
#include "contagion/rng.hpp"

namespace contagion {

enum class GraphKind { GwTree, Gwc1, Gwc2, Egw, LineF, LineA, General };

std::string kind_name(GraphKind k);
GraphKind kind_from_name(const std::string& s);

// Finite rooted tree or near-tree. Multi-edges are parallel entries in the
// neighbor lists (a length-2 cycle is a doubled edge); self-loops do not
// occur in the generated kinds.
struct RootedGraph {
  std::vector<std::vector<int>> adj;  // sorted, with multiplicity
  int root = 0;
  GraphKind kind = GraphKind::General;
  std::vector<int> depth;                // BFS distance from root
  std::vector<std::vector<int>> cycles;  // gwc kinds: exactly one
  std::vector<int> line;                 // line kinds: the ordered spine
  std::map<std::string, std::vector<int>> leaf_sets;  // "bottom", "ends"

  int n() const { return static_cast<int>(adj.size()); }
  int edge_count() const;
  int tree_depth() const;

  void compute_depths();
  void sort_adjacency();
  // Re-derives depths, checks connectivity, per-kind edge counts, cycle
  // annotations and leaf-set predicates; throws on violation.
  void validate() const;

  // Tree navigation (tree kinds only).
  int parent_of(int v) const;
  std::vector<int> children_of(int v) const;
  RootedGraph subtree(int child) const;
};

struct GwOptions {
  std::int64_t size_cap = 5'000'000;
};

RootedGraph sample_gw(const Pmf& dist, int depth, std::uint64_t seed,
                      const GwOptions& opt = {});
RootedGraph sample_gw_mixed(const Pmf& root_dist, const Pmf& other_dist, int depth,
                            std::uint64_t seed, const GwOptions& opt = {});
RootedGraph sample_gwc1(const Pmf& dist, int m, int depth, std::uint64_t seed,
                        const GwOptions& opt = {});
RootedGraph sample_gwc2(const Pmf& dist, int m, int depth, std::uint64_t seed,
                        const GwOptions& opt = {});
// Survival-conditioned tree with a cycle grafted at every depth-h vertex.
RootedGraph sample_egw(const Pmf& root_dist, const Pmf& other_dist, int h, int m,
                       int depth, std::uint64_t seed, const GwOptions& opt = {});

enum class LineVariant { F, A };
RootedGraph build_line_f(const Pmf& dist, int m, int depth, std::uint64_t seed,
                         const GwOptions& opt = {});
RootedGraph build_line_a(const Pmf& dist, int m1, int m2, int depth, std::uint64_t seed,
                         const GwOptions& opt = {});
// Deterministic shapes assembled from given trees (tree j sits at line slot j).
RootedGraph line_f_from_trees(const std::vector<RootedGraph>& trees, int m);

// The two line graphs that jointly cover a unicyclic graph: A1 walks the
// cycle from v_{m'} around through v_1, A2 walks v_1..v_m; the duplicated
// endpoints carry no trees.
std::pair<RootedGraph, RootedGraph> cover_of_unicyclic(const RootedGraph& h);

// -- configuration model ------------------------------------------------

struct HalfEdgeGraph {
  int n = 0;
  std::vector<int> degrees;
  std::vector<int> offset;                        // half-edge id = offset[v]+slot
  std::vector<std::pair<int, int>> matching;      // pairs of half-edge ids
  std::vector<double> heights;                    // cut-off line bookkeeping

  int half_edge_count() const { return offset.empty() ? 0 : offset.back(); }
  int vertex_of(int he) const;
  // Adjacency with multiplicity; a self-loop contributes two entries.
  std::vector<std::vector<int>> adjacency() const;
  void validate() const;
};

HalfEdgeGraph sample_config_model(int n, const Pmf& dist, std::uint64_t seed);
// Height-based sequential matching: repeatedly take the lowest-indexed
// unmatched half-edge (independent of the heights) and pair it with the
// highest unmatched one, sweeping the cut-off line downward.
HalfEdgeGraph cutoff_line_match(const std::vector<int>& degrees, std::uint64_t seed);
// Recorded cut-off line positions, one per matching step.
std::vector<double> cutoff_line_trace(const HalfEdgeGraph& g);

struct Neighborhood {
  RootedGraph g;                 // induced ball, rooted at the center
  std::vector<int> global_ids;   // local -> global vertex
  // global (vertex,slot) for every local directed adjacency entry, so that
  // restricted simulations read the same event streams as the full graph
  std::vector<std::vector<std::pair<int, int>>> edge_origin;
};

Neighborhood neighborhood(const HalfEdgeGraph& g, int v, int radius);
int count_cycles_in_ball(const HalfEdgeGraph& g, int v, int radius);

struct Block {
  int center = 0;       // global id
  int radius = 0;       // l_n
  Neighborhood view;    // subgraph, rooted at the center
  std::optional<std::vector<int>> cycle;  // local ids
  int cycle_distance = 0;                 // h = dist(center, cycle)
  std::vector<int> bottom_leaves;         // local ids
};

Block build_block(const HalfEdgeGraph& g, int v, int radius);

struct PreprocessReport {
  HalfEdgeGraph graph;            // reindexed survivors
  std::vector<int> kept_global;   // new id -> old id
  int removed = 0;
  double removal_fraction = 0.0;
  std::map<int, double> degree_measure;  // empirical nu'
  bool within_3eta0 = false;
};

PreprocessReport preprocess_graph(const HalfEdgeGraph& g, const PreprocessParams& params);

}  // namespace contagion
