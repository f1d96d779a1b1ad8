#pragma once

#include <cstdint>

#include "contagion/pmf.hpp"
#include "contagion/timeline.hpp"

namespace contagion {

// Contact process on a Galton-Watson tree revealed on demand: a vertex
// samples its offspring count the first time it gets infected, so deep or
// wide trees cost only as much as the infection actually explores. All
// streams are keyed by the vertex's path from the root, which makes runs
// at different rates couple exactly through thinning.
struct LazyTreeParams {
  Pmf root_dist;
  Pmf other_dist;
  int max_depth = 0;          // vertices at this depth are leaves
  double lambda = 0.1;
  double lambda_base = 0.1;   // stream rate; lambda/lambda_base is the thinning
  double recovery = 1.0;
  double horizon = 1e4;
  std::uint64_t event_cap = 100'000'000;
};

enum class LazyOutcome { Extinct, ReachedDepth, HorizonCensored, EventCapCensored };

struct LazyRunResult {
  LazyOutcome outcome = LazyOutcome::Extinct;
  double time = 0.0;
  std::uint64_t events = 0;
  int deepest_infected = 0;
  long revealed_vertices = 1;
};

// Runs one realization from the infected root. stop_depth >= 0 ends the
// run successfully as soon as any vertex at that depth flips on.
LazyRunResult run_lazy_tree(const LazyTreeParams& p, std::uint64_t seed, int stop_depth);

}  // namespace contagion
