#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "contagion/exact.hpp"
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

}  // namespace

TEST_CASE("excursion product recursion") {
  SUBCASE("single vertex is the equality case") {
    auto r = check_S_product(single_vertex(), 1.0);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.rhs == doctest::Approx(1.0));
    CHECK(r.satisfied);
  }
  SUBCASE("edge at lambda 1") {
    auto r = check_S_product(edge_graph(), 1.0);
    CHECK(r.lhs == doctest::Approx(1.6).epsilon(1e-9));
    CHECK(r.rhs == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.satisfied);
  }
}

TEST_CASE("survival-time recursion with its guard") {
  SUBCASE("single vertex") {
    auto r = check_R_recursion(single_vertex(), 1.0);
    CHECK(r.precondition_held);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.rhs == doctest::Approx(1.0));
  }
  SUBCASE("edge at lambda 1 is vacuous: lambda^2 sum R = 1") {
    auto r = check_R_recursion(edge_graph(), 1.0);
    CHECK(!r.precondition_held);
    CHECK(r.satisfied);  // vacuous rows count as satisfied
  }
  SUBCASE("edge at lambda 1/2") {
    auto r = check_R_recursion(edge_graph(), 0.5);
    CHECK(r.precondition_held);
    CHECK(r.lhs == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(r.rhs == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.satisfied);
  }
}

TEST_CASE("S against R") {
  auto r1 = check_S_vs_R(single_vertex(), 1.0);
  CHECK(r1.lhs == doctest::Approx(0.5));
  CHECK(r1.rhs == doctest::Approx(1.0));
  auto r2 = check_S_vs_R(edge_graph(), 1.0);
  CHECK(r2.lhs == doctest::Approx(1.6 / 2.6).epsilon(1e-9));
  CHECK(r2.rhs == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(r2.satisfied);
}

TEST_CASE("combined quotient recursion") {
  SUBCASE("single vertex at lambda 1/2") {
    auto r = check_combined_typical(single_vertex(), 0.5);
    CHECK(r.precondition_held);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.rhs == doctest::Approx(2.0));
  }
  SUBCASE("edge at lambda 0.2") {
    auto r = check_combined_typical(edge_graph(), 0.2);
    CHECK(r.precondition_held);
    CHECK(r.satisfied);
    CHECK(r.lhs < r.rhs);
  }
}

TEST_CASE("leaf-count recursions") {
  SUBCASE("l = 0 is rejected") { CHECK_THROWS(check_M_product(edge_graph(), 1.0, 0)); }
  SUBCASE("edge at l = 1") {
    auto r = check_M_product(edge_graph(), 1.0, 1);
    CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.lhs <= r.rhs + 1e-9);
  }
  SUBCASE("lambda 0 zeroes both sides") {
    auto r = check_Mbar_recursion(edge_graph(), 0.0, 1);
    CHECK(r.precondition_held);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
    CHECK(r.satisfied);
    auto q = check_M_vs_Mbar(edge_graph(), 0.0, 1);
    CHECK(q.lhs == 0.0);
    CHECK(q.satisfied);
  }
  SUBCASE("edge at lambda 1/2") {
    CHECK(check_Mbar_recursion(edge_graph(), 0.5, 1).satisfied);
    CHECK(check_M_vs_Mbar(edge_graph(), 0.5, 1).satisfied);
  }
}

TEST_CASE("end-count recursions on line graphs") {
  SUBCASE("bare two-line at lambda 1/2") {
    RootedGraph f = line_f_from_trees({single_vertex()}, 2);
    auto [typ, atyp] = check_B_recursions(f, 0.5);
    CHECK(typ.satisfied);
    CHECK(atyp.satisfied);
    // the tail is a single vertex: the product form reads B <= lambda * 1
    CHECK(atyp.rhs == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("sampled lines stay satisfied") {
    auto lines = make_line_panel(6, 99, 3, 1);
    for (auto& f : lines)
      for (double lam : {0.2, 0.5}) {
        auto [typ, atyp] = check_B_recursions(f, lam);
        CHECK(typ.satisfied);
        CHECK(atyp.satisfied);
      }
  }
}

TEST_CASE("certified excursion bound") {
  SUBCASE("base cases") {
    CHECK(recursive_bound_calculator(single_vertex(), 1.0) == doctest::Approx(1.0));
    // guard fails on the edge at lambda 1, leaving the product bound
    CHECK(recursive_bound_calculator(edge_graph(), 1.0) == doctest::Approx(2.0));
  }
  SUBCASE("bound dominates the exact excursion time") {
    auto panel = make_tree_panel(100, 777, 12);
    for (auto& t : panel)
      for (double lam : {0.1, 0.5, 1.0}) {
        double bound = recursive_bound_calculator(t, lam);
        double exact = expected_excursion_time(t, lam);
        CHECK(exact <= bound + 1e-9);
      }
  }
  SUBCASE("bound is monotone in lambda") {
    auto panel = make_tree_panel(20, 778, 12);
    for (auto& t : panel) {
      double prev = 0.0;
      for (double lam : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
        double b = recursive_bound_calculator(t, lam);
        CHECK(b >= prev - 1e-12);
        prev = b;
      }
    }
  }
}

TEST_CASE("sweep bookkeeping") {
  auto trees = make_tree_panel(20, 4242, 12);
  auto lines = make_line_panel(4, 4243, 3, 1);
  SweepSummary s = run_recursion_sweep(trees, lines, {0.1, 0.5, 1.0, 2.0});
  CHECK(s.violations == 0);
  CHECK(s.guarded_rows > 0);
  // the mixed lambda grid must keep a healthy share of guards active
  CHECK(s.guard_active * 10 >= s.guarded_rows * 3);
  std::string csv = sweep_to_csv(s);
  CHECK(csv.find("instance,inequality") == 0);
  CHECK(csv.find("S_product") != std::string::npos);
}
