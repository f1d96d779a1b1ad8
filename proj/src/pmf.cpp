#include "contagion/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace contagion {

void Pmf::finalize() {
  while (!p_.empty() && p_.back() == 0.0) p_.pop_back();
  if (p_.empty()) throw std::invalid_argument("pmf: empty support");
  double total = 0.0;
  for (double x : p_) {
    if (x < 0.0) throw std::invalid_argument("pmf: negative probability");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("pmf: mass " + std::to_string(total) + " not near 1");
  for (double& x : p_) x /= total;
  cdf_.resize(p_.size());
  double acc = 0.0;
  mean_ = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    acc += p_[k];
    cdf_[k] = acc;
    mean_ += static_cast<double>(k) * p_[k];
  }
  cdf_.back() = 1.0;
}

void Pmf::validate() const {
  double total = 0.0, m = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    if (p_[k] < 0.0) throw std::logic_error("pmf: negative probability");
    total += p_[k];
    m += static_cast<double>(k) * p_[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::logic_error("pmf: mass not 1");
  if (std::abs(m - mean_) > 1e-9) throw std::logic_error("pmf: stale mean");
}

Pmf Pmf::from_map(const std::map<int, double>& pk, std::string label) {
  Pmf out;
  int top = 0;
  for (auto& [k, p] : pk) {
    if (k < 0) throw std::invalid_argument("pmf: negative support point");
    top = std::max(top, k);
    (void)p;
  }
  out.p_.assign(top + 1, 0.0);
  for (auto& [k, p] : pk) out.p_[k] = p;
  out.label_ = std::move(label);
  out.finalize();
  return out;
}

Pmf Pmf::poisson(double d) {
  if (d <= 0) throw std::invalid_argument("poisson: rate must be positive");
  Pmf out;
  out.family_ = PmfFamily::Poisson;
  out.family_param_ = d;
  out.label_ = "poisson(" + std::to_string(d) + ")";
  double term = std::exp(-d);
  double acc = term;
  out.p_.push_back(term);
  for (int k = 1; 1.0 - acc >= kTailCut; ++k) {
    term *= d / k;
    acc += term;
    out.p_.push_back(term);
    if (k > 10000) throw std::runtime_error("poisson: truncation failed");
  }
  out.finalize();
  return out;
}

Pmf Pmf::point_mass(int d) {
  if (d < 0) throw std::invalid_argument("point_mass: negative atom");
  Pmf out;
  out.family_ = PmfFamily::PointMass;
  out.family_param_ = d;
  out.label_ = "point(" + std::to_string(d) + ")";
  out.p_.assign(d + 1, 0.0);
  out.p_[d] = 1.0;
  out.finalize();
  return out;
}

Pmf Pmf::two_point(int a, double pa, int b, double pb) {
  return from_map({{a, pa}, {b, pb}},
                  "twopoint(" + std::to_string(a) + "," + std::to_string(b) + ")");
}

double Pmf::tail_gt(double x) const {
  double s = 0.0;
  for (int k = static_cast<int>(p_.size()) - 1; k >= 0 && static_cast<double>(k) > x; --k)
    s += p_[k];
  return s;
}

double Pmf::tail_geq(double x) const {
  double s = 0.0;
  for (int k = static_cast<int>(p_.size()) - 1; k >= 0 && static_cast<double>(k) >= x; --k)
    s += p_[k];
  return s;
}

double Pmf::mean_above(int j) const {
  double s = 0.0;
  for (int k = static_cast<int>(p_.size()) - 1; k > j; --k)
    s += static_cast<double>(k) * p_[k];
  return s;
}

double Pmf::cdf(int k) const {
  if (k < 0) return 0.0;
  if (k >= static_cast<int>(p_.size())) return 1.0;
  return cdf_[k];
}

double Pmf::second_moment() const {
  double s = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k)
    s += static_cast<double>(k) * static_cast<double>(k) * p_[k];
  return s;
}

int Pmf::sample(double u) const {
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return static_cast<int>(p_.size()) - 1;
  return static_cast<int>(it - cdf_.begin());
}

Pmf size_biased(const Pmf& dist) {
  if (dist.mean() <= 0.0)
    throw std::invalid_argument("size_biased: undefined for zero-mean law");
  if (dist.family() == PmfFamily::PointMass) {
    int d = static_cast<int>(dist.family_param());
    return Pmf::point_mass(d - 1);
  }
  std::map<int, double> out;
  for (int k = 1; k <= dist.max_support(); ++k)
    if (dist(k) > 0.0) out[k - 1] = k * dist(k) / dist.mean();
  Pmf result = Pmf::from_map(out, "size_biased(" + dist.label() + ")");
  return result;
}

bool giant_condition(const Pmf& dist) {
  return dist.second_moment() - 2.0 * dist.mean() > 0.0;
}

Pmf augmented(const Pmf& dist, double eps) {
  if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("augmented: eps outside (0,1)");
  const int kmax = dist.max_support();
  // k0 = max{k : sum_{j>=k} j sqrt(p_j) >= eps/10}, scanned downward on the
  // truncated support with exact partial sums.
  double run = 0.0;
  int k0 = -1;
  for (int k = kmax; k >= 0; --k) {
    run += k * std::sqrt(dist(k));
    if (run >= eps / 10.0) {
      k0 = k;
      break;
    }
  }
  if (k0 < 0)
    throw std::invalid_argument("augmented: sum k*sqrt(p_k) below eps/10 everywhere");
  std::map<int, double> raw;
  if (k0 < kmax) {
    for (int k = 0; k <= kmax; ++k) {
      double v = (k <= k0) ? (1.0 - eps / 10.0) * dist(k) : std::sqrt(dist(k));
      if (v > 0.0) raw[k] = v;
    }
  } else {
    for (int k = 0; k < k0; ++k)
      if (dist(k) > 0.0) raw[k] = (1.0 - eps / 10.0) * dist(k);
    raw[k0] = std::sqrt(dist(k0));
  }
  double z = 0.0;
  for (auto& [k, v] : raw) z += v;
  for (auto& [k, v] : raw) v /= z;
  return Pmf::from_map(raw, "augmented(" + dist.label() + ")");
}

void ConcentrationProfile::validate() const {
  if (!c_delta.count(1.0))
    throw std::invalid_argument("concentration profile: missing c_1");
  for (auto& [d, c] : c_delta) {
    if (d <= 0.0 || d > 1.0) throw std::invalid_argument("concentration profile: delta outside (0,1]");
    if (c <= 0.0) throw std::invalid_argument("concentration profile: c must be positive");
  }
}

ConcentrationProfile ConcentrationProfile::quadratic_default() {
  ConcentrationProfile p;
  for (double d : {0.1, 0.25, 0.5, 0.75, 1.0}) p.c_delta[d] = d * d / 4.0;
  return p;
}

ConcentrationReport check_concentration(const Pmf& dist,
                                        const ConcentrationProfile& profile,
                                        const std::vector<double>& delta_grid,
                                        const std::vector<double>& a_grid) {
  profile.validate();
  const double d = dist.mean();
  ConcentrationReport rep;
  rep.all_pass = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  auto add = [&](double x, bool is_a, double c) {
    ConcentrationPoint pt;
    pt.x = x;
    pt.is_a = is_a;
    pt.tail = dist.tail_geq((1.0 + x) * d);
    pt.bound = std::exp(-c * d * (is_a ? x : 1.0));
    pt.pass = pt.tail <= pt.bound;
    rep.all_pass = rep.all_pass && pt.pass;
    rep.worst_margin = std::min(rep.worst_margin, pt.bound - pt.tail);
    rep.points.push_back(pt);
  };
  for (double delta : delta_grid) {
    // nearest profile constant at or below delta; the grid covers delta=1
    auto it = profile.c_delta.find(delta);
    double c = (it != profile.c_delta.end()) ? it->second
                                             : profile.c_delta.lower_bound(delta)->second;
    add(delta, false, c);
  }
  double c1 = profile.c_delta.at(1.0);
  for (double a : a_grid) add(a, true, c1);
  return rep;
}

void PreprocessParams::validate(const Pmf& dist) const {
  if (eta0 <= 0.0 || eta0 >= 1.0) throw std::invalid_argument("preprocess: eta0 outside (0,1)");
  if (finite_support) {
    if (j0 != j1) throw std::invalid_argument("preprocess: finite case needs j0 == j1");
    if (dist(j0) < 10.0 * eta0)
      throw std::invalid_argument("preprocess: mu(j0) >= 10*eta0 fails");
  } else {
    if (!(j0 <= j1 && static_cast<double>(j1) < std::exp(j0 / 10.0)))
      throw std::invalid_argument("preprocess: need j0 <= j1 < e^{j0/10}");
    if (dist.tail_gt(j0) < 10.0 * eta0 - 1e-15)
      throw std::invalid_argument("preprocess: mu(j0,inf) >= 10*eta0 fails");
  }
}

Pmf surgery_distribution(const Pmf& dist, const PreprocessParams& params) {
  params.validate(dist);
  std::map<int, double> out;
  if (!params.finite_support) {
    double head = dist.cdf(params.j0);
    for (int k = 0; k <= params.j0; ++k)
      if (dist(k) > 0.0) out[k] = (1.0 - 4.0 * params.eta0) * dist(k) / head;
    out[0] += 4.0 * params.eta0;
  } else {
    for (int k = 0; k < params.j0; ++k)
      if (dist(k) > 0.0) out[k] = dist(k);
    out[params.j0] = dist(params.j0) - 4.0 * params.eta0;
    out[0] += 4.0 * params.eta0;
  }
  return Pmf::from_map(out, "surgery(" + dist.label() + ")");
}

namespace {

// The defining inequality for (j0, j1) sits far below the 1e-15 tail cut
// for Poisson laws, so the scan works on a deep expansion of the family.
std::vector<double> deep_poisson(double d) {
  std::vector<double> p;
  double log_term = -d;
  p.push_back(std::exp(log_term));
  for (int k = 1; k < 4000; ++k) {
    log_term += std::log(d) - std::log(static_cast<double>(k));
    if (k > d && log_term < -700.0) break;
    p.push_back(std::exp(log_term));
  }
  return p;
}

}  // namespace

PreprocessParams choose_preprocess_params(const Pmf& dist) {
  if (dist.mean() <= 0.0 || dist.max_support() == 0)
    throw std::invalid_argument("preprocess: no positive-degree support");
  PreprocessParams out;
  if (!dist.infinite_support()) {
    out.finite_support = true;
    out.j0 = out.j1 = dist.max_support();
    out.eta0 = dist(out.j0) / 20.0;
    out.validate(dist);
    return out;
  }
  out.finite_support = false;
  std::vector<double> p = deep_poisson(dist.family_param());
  const int top = static_cast<int>(p.size()) - 1;
  auto tail_gt = [&](int j) {
    double s = 0.0;
    for (int k = top; k > j; --k) s += p[k];
    return s;
  };
  auto mean_above = [&](int j) {
    double s = 0.0;
    for (int k = top; k > j; --k) s += static_cast<double>(k) * p[k];
    return s;
  };
  for (int j0 = 1; j0 < top; ++j0) {
    if (p[j0] <= 0.0) continue;
    double lhs = tail_gt(j0);
    if (lhs <= 0.0) break;
    int j1_top = static_cast<int>(std::ceil(std::exp(j0 / 10.0))) - 1;
    for (int j1 = j0; j1 <= std::min(j1_top, top - 1); ++j1) {
      double eta0 = mean_above(j1);
      if (eta0 > 0.0 && eta0 < 1.0 && lhs >= 10.0 * eta0) {
        out.j0 = j0;
        out.j1 = j1;
        out.eta0 = eta0;
        return out;
      }
    }
  }
  throw std::runtime_error("preprocess: no admissible (j0, j1) within truncation");
}

std::string pmf_to_json(const Pmf& dist) {
  nlohmann::json j;
  j["label"] = dist.label();
  auto arr = nlohmann::json::array();
  for (int k = 0; k <= dist.max_support(); ++k) {
    if (dist(k) <= 0.0) continue;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", dist(k));
    arr.push_back(nlohmann::json::array({k, std::string(buf)}));
  }
  j["pmf"] = arr;
  return j.dump(2);
}

Pmf pmf_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  std::map<int, double> pk;
  for (auto& row : j.at("pmf"))
    pk[row.at(0).get<int>()] = std::stod(row.at(1).get<std::string>());
  return Pmf::from_map(pk, j.value("label", "pmf"));
}

Pmf parse_dist_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("dist spec: expected family:args, got " + spec);
  std::string fam = spec.substr(0, colon);
  std::string args = spec.substr(colon + 1);
  if (fam == "poisson") return Pmf::poisson(std::stod(args));
  if (fam == "point") return Pmf::point_mass(std::stoi(args));
  if (fam == "pmf" || fam == "twopoint") {
    std::map<int, double> pk;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("dist spec: bad entry " + item);
      pk[std::stoi(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
    }
    return Pmf::from_map(pk, spec);
  }
  throw std::invalid_argument("dist spec: unknown family " + fam);
}

}  // namespace contagion
