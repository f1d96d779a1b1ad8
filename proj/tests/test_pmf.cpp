#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "contagion/pmf.hpp"
#include "doctest.h"

using namespace contagion;

namespace {

// Independent Poisson tail: long-double term recursion, no Pmf machinery.
long double poisson_tail_geq(double d, double x) {
  long double term = std::exp((long double)-d);
  long double acc = 0.0L;
  for (int k = 0; k < 600; ++k) {
    if ((double)k >= x) acc += term;
    term *= d / (k + 1);
  }
  return acc;
}

double sup_diff(const Pmf& a, const Pmf& b) {
  double m = 0.0;
  int top = std::max(a.max_support(), b.max_support());
  for (int k = 0; k <= top; ++k) m = std::max(m, std::abs(a(k) - b(k)));
  return m;
}

}  // namespace

TEST_CASE("pmf basics and validation") {
  Pmf p = Pmf::poisson(3.0);
  p.validate();
  CHECK(std::abs(p.mean() - 3.0) < 1e-9);
  double total = 0.0;
  for (int k = 0; k <= p.max_support(); ++k) total += p(k);
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK_THROWS(Pmf::from_map({{0, 0.5}, {1, 0.4}}));  // mass 0.9
  CHECK_THROWS(Pmf::from_map({{0, -0.1}, {1, 1.1}}));
}

TEST_CASE("size-biased law") {
  SUBCASE("poisson is a fixed point") {
    Pmf p = Pmf::poisson(3.0);
    CHECK(sup_diff(size_biased(p), p) <= 1e-12);
    Pmf q = Pmf::poisson(20.0);
    CHECK(sup_diff(size_biased(q), q) <= 1e-12);
  }
  SUBCASE("point mass shifts down") {
    CHECK(sup_diff(size_biased(Pmf::point_mass(5)), Pmf::point_mass(4)) == 0.0);
    // iterating twice lands on d-2
    CHECK(sup_diff(size_biased(size_biased(Pmf::point_mass(5))), Pmf::point_mass(3)) == 0.0);
  }
  SUBCASE("two-point example") {
    Pmf p = Pmf::two_point(1, 0.5, 2, 0.5);
    Pmf sb = size_biased(p);
    CHECK(sb(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(sb(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("zero mean rejected") { CHECK_THROWS(size_biased(Pmf::point_mass(0))); }
}

TEST_CASE("concentration check") {
  SUBCASE("poisson(20) against the quadratic profile") {
    ConcentrationProfile prof;
    for (double d : {0.25, 0.5, 1.0}) prof.c_delta[d] = d * d / 4.0;
    auto rep = check_concentration(Pmf::poisson(20.0), prof, {0.25, 0.5, 1.0}, {1, 2, 4});
    CHECK(rep.all_pass);
    // cross-check each verdict against an independent tail evaluation
    double d = 20.0;
    for (auto& pt : rep.points) {
      double tail = (double)poisson_tail_geq(d, (1.0 + pt.x) * d);
      double bound = pt.is_a ? std::exp(-prof.c_delta.at(1.0) * pt.x * d)
                             : std::exp(-prof.c_delta.at(pt.x) * d);
      CHECK(pt.pass == (tail <= bound + 1e-15));
      CHECK(pt.tail == doctest::Approx(tail).epsilon(1e-9));
    }
  }
  SUBCASE("point mass always passes") {
    auto rep = check_concentration(Pmf::point_mass(7), ConcentrationProfile::quadratic_default());
    CHECK(rep.all_pass);
    for (auto& pt : rep.points) CHECK(pt.tail == 0.0);
  }
  SUBCASE("heavy two-point fails at delta = 0.5") {
    ConcentrationProfile prof;
    prof.c_delta[1.0] = 1.0;
    auto rep = check_concentration(Pmf::two_point(0, 0.5, 10, 0.5), prof, {0.5}, {});
    CHECK(!rep.all_pass);
    // P(X >= 7.5) = 0.5 > e^{-5}
    CHECK(rep.points[0].tail == doctest::Approx(0.5));
  }
  SUBCASE("default poisson profile passes for d >= 10") {
    for (double d : {10.0, 20.0, 50.0}) {
      auto rep = check_concentration(Pmf::poisson(d), ConcentrationProfile::quadratic_default());
      CHECK(rep.all_pass);
    }
  }
}

TEST_CASE("augmented distribution") {
  SUBCASE("point mass is untouched") {
    for (int d : {1, 4, 9})
      CHECK(sup_diff(augmented(Pmf::point_mass(d), 0.3), Pmf::point_mass(d)) <= 1e-12);
  }
  SUBCASE("two-point example against direct arithmetic") {
    Pmf p = Pmf::two_point(1, 0.81, 2, 0.19);
    double eps = 0.5;
    // k0: sum_{j>=2} j sqrt(p_j) = 2 sqrt(0.19) > eps/10, so k0 = kmax = 2
    double z = (1.0 - eps / 10.0) * 0.81 + std::sqrt(0.19);
    Pmf aug = augmented(p, eps);
    CHECK(aug(1) == doctest::Approx((1.0 - eps / 10.0) * 0.81 / z).epsilon(1e-12));
    CHECK(aug(2) == doctest::Approx(std::sqrt(0.19) / z).epsilon(1e-12));
  }
  SUBCASE("interior cut exercises the first case") {
    Pmf p = Pmf::from_map({{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}}, "uniform4");
    double eps = 0.5;  // k0 = 3 would need sum_{j>=3} j sqrt(p_j) = 1.5 >= 0.05: k0 = 3 = kmax
    Pmf aug = augmented(p, eps);
    double total = 0.0;
    for (int k = 0; k <= aug.max_support(); ++k) total += aug(k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("mean inflation stays below (1 + eps/9)") {
    for (double d : {20.0, 50.0}) {
      double eps = 0.3;
      Pmf aug = augmented(Pmf::poisson(d), eps);
      CHECK(aug.mean() <= (1.0 + eps / 9.0) * d);
    }
  }
}

TEST_CASE("giant component condition") {
  CHECK(giant_condition(Pmf::point_mass(3)));
  CHECK(!giant_condition(Pmf::point_mass(2)));  // E D(D-2) = 0, not strict
  CHECK(!giant_condition(Pmf::poisson(1.0)));   // d^2 + d - 2d = 0
  CHECK(giant_condition(Pmf::poisson(1.5)));
}

TEST_CASE("surgery distribution") {
  SUBCASE("finite case on a point mass") {
    PreprocessParams pp{0.01, 6, 6, true};
    Pmf out = surgery_distribution(Pmf::point_mass(6), pp);
    CHECK(out(0) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(out(6) == doctest::Approx(0.96).epsilon(1e-12));
  }
  SUBCASE("output is stochastically dominated by the input") {
    Pmf mu = Pmf::poisson(10.0);
    PreprocessParams pp = choose_preprocess_params(mu);
    Pmf out = surgery_distribution(mu, pp);
    // cdf of the output >= cdf of the input everywhere on [0, j0]
    for (int l = 0; l <= pp.j0; ++l) CHECK(out.cdf(l) >= mu.cdf(l) - 1e-12);
  }
  SUBCASE("infinite case places exactly 4 eta0 plus rescaled mass at zero") {
    Pmf mu = Pmf::poisson(10.0);
    PreprocessParams pp = choose_preprocess_params(mu);
    REQUIRE(!pp.finite_support);
    Pmf out = surgery_distribution(mu, pp);
    double head = mu.cdf(pp.j0);
    CHECK(out(0) ==
          doctest::Approx((1.0 - 4.0 * pp.eta0) * mu(0) / head + 4.0 * pp.eta0).epsilon(1e-12));
    double total = 0.0;
    for (int k = 0; k <= out.max_support(); ++k) total += out(k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("preprocessing parameter choice") {
  SUBCASE("finite support") {
    PreprocessParams pp = choose_preprocess_params(Pmf::point_mass(8));
    CHECK(pp.j0 == 8);
    CHECK(pp.j1 == 8);
    CHECK(pp.eta0 == doctest::Approx(0.05));
  }
  SUBCASE("poisson admits a triple verified by exact tail sums") {
    for (double d : {5.0, 10.0}) {
      PreprocessParams pp = choose_preprocess_params(Pmf::poisson(d));
      CHECK(pp.j0 <= pp.j1);
      CHECK((double)pp.j1 < std::exp(pp.j0 / 10.0));
      CHECK(pp.eta0 > 0.0);
      // independent check of the defining inequality on long-double tails
      long double tail = 0.0L, weighted = 0.0L;
      long double term = std::exp((long double)-d);
      for (int k = 0; k < 600; ++k) {
        if (k > pp.j0) tail += term;
        if (k > pp.j1) weighted += (long double)k * term;
        term *= d / (k + 1);
      }
      CHECK((double)tail >= 10.0 * (double)weighted * (1.0 - 1e-9));
      CHECK(pp.eta0 == doctest::Approx((double)weighted).epsilon(1e-6));
    }
  }
  SUBCASE("degenerate law rejected") {
    CHECK_THROWS(choose_preprocess_params(Pmf::point_mass(0)));
  }
}

TEST_CASE("json round trip keeps probabilities exactly") {
  Pmf p = Pmf::from_map({{0, 0.125}, {3, 0.5}, {7, 0.375}}, "witness");
  Pmf q = pmf_from_json(pmf_to_json(p));
  CHECK(sup_diff(p, q) == 0.0);
  CHECK(q.label() == "witness");
  Pmf r = pmf_from_json(pmf_to_json(Pmf::poisson(4.0)));
  CHECK(sup_diff(r, Pmf::poisson(4.0)) <= 1e-17);
}

TEST_CASE("dist spec parsing") {
  CHECK(parse_dist_spec("poisson:8").mean() == doctest::Approx(8.0));
  CHECK(parse_dist_spec("point:3").mean() == doctest::Approx(3.0));
  CHECK(parse_dist_spec("pmf:0=0.5,10=0.5").mean() == doctest::Approx(5.0));
  CHECK_THROWS(parse_dist_spec("cauchy:1"));
}

TEST_CASE("augmented distribution with an interior cut") {
  // top mass is too light to carry eps/10 on its own, so k0 < kmax and the
  // square-root replacement applies strictly above the cut
  Pmf p = Pmf::from_map({{0, 0.5}, {1, 0.49}, {2, 0.0099999}, {3, 1e-7}}, "lighttail");
  double eps = 0.5;
  // sum_{j>=3} j sqrt(p_j) ~ 9.5e-4 < 0.05 <= sum_{j>=2} -> k0 = 2
  Pmf aug = augmented(p, eps);
  double z = 0.95 * (0.5 + 0.49 + 0.0099999) + std::sqrt(1e-7);
  CHECK(aug(0) == doctest::Approx(0.95 * 0.5 / z).epsilon(1e-12));
  CHECK(aug(1) == doctest::Approx(0.95 * 0.49 / z).epsilon(1e-12));
  CHECK(aug(2) == doctest::Approx(0.95 * 0.0099999 / z).epsilon(1e-12));
  CHECK(aug(3) == doctest::Approx(std::sqrt(1e-7) / z).epsilon(1e-12));
}

TEST_CASE("inverse-cdf sampling matches the law") {
  Pmf p = Pmf::from_map({{0, 0.2}, {2, 0.5}, {5, 0.3}}, "sampletest");
  Stream s(derive_key(31, "samp"));
  std::map<int, long> counts;
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[p.sample(s)]++;
  for (int k : {0, 2, 5}) {
    double frac = static_cast<double>(counts[k]) / n;
    CHECK(std::abs(frac - p(k)) < 0.005);
  }
  CHECK(counts.size() == 3);
}
