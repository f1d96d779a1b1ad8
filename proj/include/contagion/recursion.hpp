#pragma once

#include <string>
#include <vector>

#include "contagion/exact.hpp"
#include "contagion/graph.hpp"

namespace contagion {

// One verified inequality row. `satisfied` is true when the guard failed
// (vacuous) or when lhs <= rhs + tolerance with exact oracle values.
struct RecursionReport {
  std::string instance_id;
  std::string inequality_id;
  double lhs = 0.0;
  double rhs = 0.0;
  bool precondition_held = true;
  bool satisfied = true;
  double margin = 0.0;  // rhs - lhs
};

constexpr double kIneqTol = 1e-9;

// S(T) <= prod_i (1 + lambda S(T_i)); no guard.
RecursionReport check_S_product(const RootedGraph& tree, double lambda);
// R(T) <= (1 + lambda sum R(T_i)) / (1 - lambda^2 sum R(T_i)), guarded by
// lambda^2 sum R(T_i) < 1.
RecursionReport check_R_recursion(const RootedGraph& tree, double lambda);
// S/(1+lambda S) <= R.
RecursionReport check_S_vs_R(const RootedGraph& tree, double lambda);
// S(T) <= (1 + lambda sum S(T_i)) / (1 - lambda - 2 lambda^2 sum S(T_i)),
// guarded by lambda + 2 lambda^2 sum S(T_i) < 1.
RecursionReport check_combined_typical(const RootedGraph& tree, double lambda);
// M^l(T) <= lambda sum_i M^{l-1}(T_i) prod_{j != i} (1 + lambda S(T_j)).
RecursionReport check_M_product(const RootedGraph& tree, double lambda, int l);
// Mbar^l(T) <= lambda sum Mbar^{l-1}(T_i) / (1 - lambda^2 sum R(T_i)), guarded.
RecursionReport check_Mbar_recursion(const RootedGraph& tree, double lambda, int l);
// M^l(T) <= (1 + lambda S(T)) Mbar^l(T).
RecursionReport check_M_vs_Mbar(const RootedGraph& tree, double lambda, int l);
// The two end-infection recursions for a line graph F^{m+1,l}: the guarded
// quotient form and the product form.
std::pair<RecursionReport, RecursionReport> check_B_recursions(const RootedGraph& line_f,
                                                               double lambda);

// Certified upper bound on S(T) by bottom-up recursion alone (no chain
// solve): at each vertex the product bound, improved by the guarded
// quotient bound whenever its guard holds for the child bounds.
double recursive_bound_calculator(const RootedGraph& tree, double lambda);

// Reproducible panel of small trees (mixed two-point offspring laws,
// rejection-capped size).
std::vector<RootedGraph> make_tree_panel(int count, std::uint64_t seed, int max_vertices);
// Line-F panel assembled from small sampled trees.
std::vector<RootedGraph> make_line_panel(int count, std::uint64_t seed, int m, int depth);

struct SweepSummary {
  std::vector<RecursionReport> rows;
  int violations = 0;
  int guarded_rows = 0;      // rows of guarded inequalities
  int guard_active = 0;      // among them, guard held
};

SweepSummary run_recursion_sweep(const std::vector<RootedGraph>& trees,
                                 const std::vector<RootedGraph>& lines,
                                 const std::vector<double>& lambdas);

std::string sweep_to_csv(const SweepSummary& s);

}  // namespace contagion
