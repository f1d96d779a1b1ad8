#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "contagion/graph.hpp"
#include "contagion/timeline.hpp"

namespace contagion {

struct SimParams {
  double lambda = 1.0;    // effective infection rate, <= timeline base
  double recovery = 1.0;  // effective recovery rate, <= timeline base
  double horizon = 1e4;
  std::uint64_t event_cap = 100'000'000;
};

enum class SimMode { Plain, RootAdded };
enum class Terminal { Extinct, HorizonCensored, EventCapCensored };

struct Flip {
  double time;
  int vertex;
  bool on;
};

struct Trajectory {
  double end_time = 0.0;
  Terminal status = Terminal::Extinct;
  std::uint64_t events = 0;
  std::vector<int> on_flips;      // per-vertex count of 0->1 flips
  std::vector<char> final_state;  // infection state when the run stopped
  std::vector<Flip> flips;        // full record, only when requested
};

struct SimOptions {
  bool record_flips = false;
};

// Event-driven contact process over shared Poisson streams. Plain mode
// absorbs at the all-healthy state; root-added mode adds a permanently
// infected parent wired to the root and stops the first time the graph
// itself is all-healthy.
Trajectory simulate(const RootedGraph& g, const TimelineSpec& tl, const SimParams& p,
                    const std::vector<int>& init, SimMode mode, const SimOptions& opt = {});

// Same dynamics with explicit global stream ids per adjacency slot, so a
// subgraph can replay exactly the events the full graph would see.
Trajectory simulate_mapped(const std::vector<std::vector<int>>& adj,
                           const std::vector<int>& vertex_ids,
                           const std::vector<std::vector<std::pair<int, int>>>& edge_origin,
                           int root, const TimelineSpec& tl, const SimParams& p,
                           const std::vector<int>& init, SimMode mode, double start_time,
                           const SimOptions& opt = {});

// Single-realization observables.
double excursion_time(const RootedGraph& tree, const TimelineSpec& tl, const SimParams& p,
                      Terminal* status = nullptr);
double survival_time(const RootedGraph& g, const TimelineSpec& tl, const SimParams& p,
                     const std::vector<int>& init, Terminal* status = nullptr);

enum class LeafCountVariant { Excursion, Plain };

// 0->1 flips at depth-l vertices during one excursion (root-added) or one
// plain run from the root. Depth-0 trees count 1; l beyond the depth is 0.
int leaf_infection_count(const RootedGraph& tree, const TimelineSpec& tl, const SimParams& p,
                         int l, LeafCountVariant variant, Terminal* status = nullptr);

// 0->1 flips at the recorded end vertices of a line graph during one
// root-added excursion; an end vertex that starts infected (the m = 1
// degenerate line) contributes its initial infection.
int end_infection_count(const RootedGraph& line_graph, const TimelineSpec& tl,
                        const SimParams& p, Terminal* status = nullptr);

struct DecomposedResult {
  double termination_time = 0.0;
  Terminal status = Terminal::Extinct;
  std::vector<int> copies;  // multiset of block centers whose copy was spawned
};

// Block-decomposed rerun of the same realization: copies of the process on
// blocks share the global streams and every first infection of a bottom
// leaf spawns a new copy. Termination must coincide with the direct run.
DecomposedResult decomposed_simulate(const HalfEdgeGraph& g, const std::vector<Block>& blocks,
                                     const TimelineSpec& tl, const SimParams& p,
                                     int init_vertex);

// Contact process with infection rate lambda_prime and recovery rate r; the
// time axis relates it to the (lambda_prime/r, 1) process.
Trajectory reparametrized_simulate(const RootedGraph& g, const TimelineSpec& tl,
                                   double lambda_prime, double recovery,
                                   const std::vector<int>& init, SimMode mode,
                                   const SimOptions& opt = {});

// Test support: checks the trajectory against the stream laws it claims to
// follow (alternating flips, infectious neighbor at each 0->1 flip, 1->0
// flips only at recovery arrivals).
void validate_trajectory(const RootedGraph& g, const TimelineSpec& tl, const SimParams& p,
                         const std::vector<int>& init, SimMode mode, const Trajectory& tr);

}  // namespace contagion
