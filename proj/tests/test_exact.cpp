#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "contagion/exact.hpp"
#include "contagion/graph.hpp"
#include "contagion/recursion.hpp"
#include "doctest.h"

using namespace contagion;

namespace {

RootedGraph single_vertex() {
  RootedGraph g;
  g.adj = {{}};
  g.root = 0;
  g.kind = GraphKind::GwTree;
  g.compute_depths();
  return g;
}

RootedGraph edge_graph() {
  RootedGraph g;
  g.adj = {{1}, {0}};
  g.root = 0;
  g.kind = GraphKind::GwTree;
  g.compute_depths();
  return g;
}

RootedGraph path3() {
  RootedGraph g;
  g.adj = {{1}, {0, 2}, {1}};
  g.root = 0;
  g.kind = GraphKind::GwTree;
  g.compute_depths();
  return g;
}

RootedGraph star2() {
  RootedGraph g;
  g.adj = {{1, 2}, {0}, {0}};
  g.root = 0;
  g.kind = GraphKind::GwTree;
  g.compute_depths();
  return g;
}

// tiny dense Gauss elimination for the hand-built micro systems
std::vector<double> gauss(std::vector<std::vector<double>> a, std::vector<double> b) {
  int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// excursion on the edge: (1+lam) s - lam b = 1; 2 b - s - c = 1;
// (1+2lam) c - 2lam b = 1; unknowns s = root-only, b = both, c = child-only
double edge_S_oracle(double lam) {
  auto x = gauss({{1.0 + lam, -lam, 0.0},
                  {-1.0, 2.0, -1.0},
                  {0.0, -2.0 * lam, 1.0 + 2.0 * lam}},
                 {1, 1, 1});
  return x[0];
}

// star with two leaves, states keyed by (root bit, infected-leaf count)
double star2_R_oracle(double lam) {
  auto x = gauss({{1.0 + 2.0 * lam, -2.0 * lam, 0, 0, 0},
                  {-1.0, 2.0 + lam, -lam, -1.0, 0},
                  {0, -2.0, 3.0, 0, -1.0},
                  {0, -lam, 0, 1.0 + lam, 0},
                  {0, 0, -2.0 * lam, -2.0, 2.0 + 2.0 * lam}},
                 {1, 1, 1, 1, 1});
  return x[0];
}

double star2_S_oracle(double lam) {
  // the permanent parent feeds the healthy root at rate lam on top of its
  // infected leaves
  auto x = gauss({{1.0 + 2.0 * lam, -2.0 * lam, 0, 0, 0},
                  {-1.0, 2.0 + lam, -lam, -1.0, 0},
                  {0, -2.0, 3.0, 0, -1.0},
                  {0, -2.0 * lam, 0, 1.0 + 2.0 * lam, 0},
                  {0, 0, -3.0 * lam, -2.0, 2.0 + 3.0 * lam}},
                 {1, 1, 1, 1, 1});
  return x[0];
}

// path r-a-b rooted at the end; states 100,110,111,011,010,101,001
double path3_R_oracle(double lam) {
  std::vector<std::vector<double>> m(7, std::vector<double>(7, 0.0));
  m[0] = {1 + lam, -lam, 0, 0, 0, 0, 0};
  m[1] = {-1, 2 + lam, -lam, 0, -1, 0, 0};
  m[2] = {0, -1, 3, -1, 0, -1, 0};
  m[3] = {0, 0, -lam, 2 + lam, -1, 0, -1};
  m[4] = {0, -lam, 0, -lam, 1 + 2 * lam, 0, 0};
  m[5] = {-1, 0, -2 * lam, 0, 0, 2 + 2 * lam, -1};
  m[6] = {0, 0, 0, -lam, 0, 0, 1 + lam};
  auto x = gauss(m, {1, 1, 1, 1, 1, 1, 1});
  return x[0];
}

}  // namespace

TEST_CASE("micro panel closed forms") {
  SolveDiag diag;
  SUBCASE("single vertex") {
    RootedGraph g = single_vertex();
    CHECK(expected_survival_time(g, 1.0, &diag) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(diag.residual < 1e-10);
    CHECK(expected_excursion_time(g, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stationary_at_zero(g, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(expected_excursion_time(g, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("edge survival matches 1 + lambda/2") {
    RootedGraph g = edge_graph();
    for (double lam : {0.1, 1.0, 2.0}) {
      CHECK(expected_survival_time(g, lam, &diag) ==
            doctest::Approx(1.0 + lam / 2.0).epsilon(1e-10));
      CHECK(diag.residual < 1e-10);
    }
  }
  SUBCASE("edge excursion matches the three-state solve") {
    RootedGraph g = edge_graph();
    CHECK(expected_excursion_time(g, 1.0) == doctest::Approx(1.6).epsilon(1e-10));
    for (double lam : {0.1, 0.5, 2.0})
      CHECK(expected_excursion_time(g, lam) ==
            doctest::Approx(edge_S_oracle(lam)).epsilon(1e-10));
  }
  SUBCASE("edge stationary mass follows the excursion identity") {
    CHECK(stationary_at_zero(edge_graph(), 1.0) == doctest::Approx(1.0 / 2.6).epsilon(1e-10));
  }
  SUBCASE("path-3 survival against the hand system") {
    for (double lam : {0.2, 1.0})
      CHECK(expected_survival_time(path3(), lam) ==
            doctest::Approx(path3_R_oracle(lam)).epsilon(1e-10));
  }
  SUBCASE("star-2 against the symmetry-reduced systems") {
    RootedGraph g = star2();
    for (double lam : {0.3, 1.0}) {
      CHECK(expected_survival_time(g, lam) ==
            doctest::Approx(star2_R_oracle(lam)).epsilon(1e-10));
      CHECK(expected_excursion_time(g, lam) ==
            doctest::Approx(star2_S_oracle(lam)).epsilon(1e-10));
    }
  }
}

TEST_CASE("stationary identity and R <= S on a random panel") {
  auto panel = make_tree_panel(50, 424242, 10);
  for (auto& tree : panel) {
    for (double lam : {0.2, 1.0}) {
      double S = expected_excursion_time(tree, lam);
      double R = expected_survival_time(tree, lam);
      double pi0 = stationary_at_zero(tree, lam);
      CHECK(R <= S + 1e-9);
      CHECK(std::abs(pi0 * (1.0 + lam * S) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("transition counts") {
  SUBCASE("lambda = 0 freezes all marked infections") {
    RootedGraph g = path3();
    CHECK(expected_transition_counts(g, 0.0, ChainMode::Plain, {1, 2}) == 0.0);
    CHECK(expected_transition_counts(g, 0.0, ChainMode::Plain, {0}) == 0.0);
  }
  SUBCASE("leaf conventions") {
    RootedGraph one = single_vertex();
    CHECK(expected_leaf_infections(one, 1.0, 0, LeafVariant::Excursion) == 1.0);
    CHECK(expected_leaf_infections(one, 1.0, 1, LeafVariant::Excursion) == 0.0);
    RootedGraph g = path3();
    CHECK(expected_leaf_infections(g, 1.0, 5, LeafVariant::Excursion) == 0.0);
    CHECK_THROWS(expected_leaf_infections(g, 1.0, 0, LeafVariant::Excursion));
    CHECK(expected_leaf_infections(g, 0.5, 2, LeafVariant::Excursion) > 0.0);
    // plain counts are dominated by excursion counts
    CHECK(expected_leaf_infections(g, 0.5, 2, LeafVariant::Plain) <=
          expected_leaf_infections(g, 0.5, 2, LeafVariant::Excursion));
  }
  SUBCASE("end infections on line graphs") {
    RootedGraph f1 = line_f_from_trees({}, 1);
    CHECK(expected_end_infections(f1, 0.7) == doctest::Approx(1.0));  // the root is the end
    RootedGraph f2 = line_f_from_trees({single_vertex()}, 2);
    CHECK(expected_end_infections(f2, 0.0) == 0.0);
    CHECK(expected_end_infections(f2, 1.0) > 0.0);
  }
}

TEST_CASE("product chain identity") {
  SUBCASE("one tree reduces to its own excursion") {
    auto r = product_chain_excursion({edge_graph()}, 0.8);
    CHECK(r.S_i.size() == 1);
    CHECK(r.S_mean ==
          doctest::Approx(expected_excursion_time(edge_graph(), 0.8)).epsilon(1e-9));
    CHECK(r.identity_residual < 1e-8);
  }
  SUBCASE("two single vertices at lambda = 1") {
    auto r = product_chain_excursion({single_vertex(), single_vertex()}, 1.0);
    // 1 + 2 S = (1+1)^2 = 4
    CHECK(r.S_mean == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(r.identity_residual < 1e-8);
  }
  SUBCASE("three single vertices at lambda = 0.5") {
    auto r = product_chain_excursion({single_vertex(), single_vertex(), single_vertex()}, 0.5);
    double rhs = 1.5 * 1.5 * 1.5;
    CHECK(r.S_mean == doctest::Approx((rhs - 1.0) / (0.5 * 3.0)).epsilon(1e-10));
    CHECK(r.identity_residual < 1e-8);
  }
  SUBCASE("mixed collection keeps the identity") {
    auto r = product_chain_excursion({edge_graph(), path3(), single_vertex()}, 0.4);
    CHECK(r.identity_residual < 1e-8);
  }
}

TEST_CASE("vertex cap is enforced") {
  RootedGraph big;
  big.adj.resize(23);
  for (int v = 1; v < 23; ++v) {
    big.adj[0].push_back(v);
    big.adj[v].push_back(0);
  }
  big.root = 0;
  big.kind = GraphKind::GwTree;
  big.compute_depths();
  CHECK_THROWS(expected_survival_time(big, 0.5));
}

TEST_CASE("a 13-vertex path solves through the sparse path") {
  RootedGraph g;
  g.adj.resize(13);
  for (int v = 0; v + 1 < 13; ++v) {
    g.adj[v].push_back(v + 1);
    g.adj[v + 1].push_back(v);
  }
  g.root = 0;
  g.kind = GraphKind::GwTree;
  g.compute_depths();
  SolveDiag diag;
  double S = expected_excursion_time(g, 0.3, &diag);
  CHECK(diag.method == "bicgstab");
  CHECK(diag.residual < 1e-10);
  CHECK(S > 1.0);
  CHECK(S <= recursive_bound_calculator(g, 0.3) + 1e-9);
}
