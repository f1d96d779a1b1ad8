#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

enum class PmfFamily { General, Poisson, PointMass };

// A probability mass function on {0,1,...} with finite support. Analytic
// families (Poisson) are truncated where the remaining tail drops below
// kTailCut and renormalized; all moments are taken on the stored vector.
class Pmf {
 public:
  static constexpr double kTailCut = 1e-15;

  Pmf() = default;
  static Pmf from_map(const std::map<int, double>& pk, std::string label = "pmf");
  static Pmf poisson(double d);
  static Pmf point_mass(int d);
  static Pmf two_point(int a, double pa, int b, double pb);

  double operator()(int k) const {
    return (k >= 0 && k < static_cast<int>(p_.size())) ? p_[k] : 0.0;
  }
  int max_support() const { return static_cast<int>(p_.size()) - 1; }
  const std::vector<double>& probs() const { return p_; }
  double mean() const { return mean_; }
  const std::string& label() const { return label_; }
  PmfFamily family() const { return family_; }
  // True for analytic families whose untruncated support is infinite.
  bool infinite_support() const { return family_ == PmfFamily::Poisson; }
  double family_param() const { return family_param_; }

  // P(X > x) and P(X >= x) for real thresholds.
  double tail_gt(double x) const;
  double tail_geq(double x) const;
  // E[X 1{X > j}]
  double mean_above(int j) const;
  double cdf(int k) const;
  double second_moment() const;

  // Inverse-CDF sample from a uniform in (0,1).
  int sample(double u) const;
  int sample(Stream& s) const { return sample(s.next_unit()); }

  void validate() const;  // throws if mass or mean are inconsistent

 private:
  std::vector<double> p_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  std::string label_;
  PmfFamily family_ = PmfFamily::General;
  double family_param_ = 0.0;

  void finalize();
};

// -- distribution-level transforms ------------------------------------

// Size-biased law: out(k-1) = k*in(k) / E[in].
Pmf size_biased(const Pmf& dist);

// E[D(D-2)] > 0, the supercriticality / giant-component test.
bool giant_condition(const Pmf& dist);

// Augmented law: mass above the cut k0 = max{k : sum_{j>=k} j*sqrt(p_j) >= eps/10}
// is replaced by sqrt(p_k); below the cut the law is scaled by (1 - eps/10);
// the whole is renormalized. Two cases depending on whether k0 is interior
// to the support or sits at its top.
Pmf augmented(const Pmf& dist, double eps);

struct ConcentrationProfile {
  std::map<double, double> c_delta;  // delta in (0,1] -> c_delta, must cover 1
  void validate() const;
  static ConcentrationProfile quadratic_default();  // c_delta = delta^2/4, c_1 = 1/4
};

struct ConcentrationPoint {
  double x;        // delta or a
  bool is_a;       // false: delta row, true: a row
  double tail;     // P(X >= (1+x) d)
  double bound;    // exp(-c d) per the profile
  bool pass;
};

struct ConcentrationReport {
  std::vector<ConcentrationPoint> points;
  bool all_pass;
  double worst_margin;  // min over points of (bound - tail)
};

ConcentrationReport check_concentration(
    const Pmf& dist, const ConcentrationProfile& profile,
    const std::vector<double>& delta_grid = {0.1, 0.25, 0.5, 0.75, 1.0},
    const std::vector<double>& a_grid = {1, 2, 4, 8});

struct PreprocessParams {
  double eta0;
  int j0;
  int j1;
  bool finite_support;
  void validate(const Pmf& dist) const;
};

// Degree-surgery law: condition on [0,j0] and move 4*eta0 of mass to the
// atom at 0 (infinite-support case), or shave 4*eta0 off the top atom
// (finite case).
Pmf surgery_distribution(const Pmf& dist, const PreprocessParams& params);

// Smallest admissible (j0, j1, eta0). Finite support: j0 = j1 = top of
// support and eta0 = mu(j0)/20. Infinite support: scan j0 upward, j1 in
// [j0, e^{j0/10}), requiring mu(j0) > 0 and
// P(D > j0) >= 10 E[D 1{D > j1}] =: 10 eta0 > 0. The scan evaluates tails
// on a deep truncation of the analytic family since the inequality lives
// far below the standard cutoff.
PreprocessParams choose_preprocess_params(const Pmf& dist);

// JSON round-trip; probabilities are written as decimal strings.
std::string pmf_to_json(const Pmf& dist);
Pmf pmf_from_json(const std::string& text);

// Parse CLI-style distribution specs: "poisson:8", "point:3",
// "pmf:0=0.5,10=0.5", "twopoint:0=0.3,3=0.7".
Pmf parse_dist_spec(const std::string& spec);

}  // namespace contagion
