#pragma once

#include <string>

#include "contagion/exact.hpp"
#include "contagion/graph.hpp"
#include "contagion/sim.hpp"

namespace contagion {

// Edge-list text format: header "n m root kind", then one "u v" line per
// edge (with multiplicity), then named trailing sections for cycles, the
// line spine, and leaf sets.
std::string graph_to_text(const RootedGraph& g);
RootedGraph graph_from_text(const std::string& text);

// A block serializes as its subgraph plus trailing sections for the cycle
// and its bottom-leaf set (local vertex ids).
std::string block_to_text(const Block& b);

// One "time,vertex,flip" row per recorded state change.
std::string trajectory_to_csv(const std::vector<Flip>& flips);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::string exact_result_to_json(const ExactResult& r, double lambda);

}  // namespace contagion
