#include "contagion/exact.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace contagion {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct ChainContext {
  const std::vector<std::vector<int>>* adj;
  int n;
  double lambda;
  bool root_added;
  std::vector<int> extra_targets;  // vertices fed by a permanent parent
};

void check_cap(int n) {
  if (n > kExactVertexCap)
    throw std::invalid_argument("exact: graph exceeds the " +
                                std::to_string(kExactVertexCap) + "-vertex cap");
}

// Rates out of configuration x: recoveries at rate 1 per infected vertex,
// infection of a healthy vertex at lambda per infected adjacency entry,
// plus lambda per permanent parent attached to it.
template <typename Fn>
void for_each_transition(const ChainContext& c, std::uint64_t x, Fn&& fn) {
  for (int v = 0; v < c.n; ++v) {
    std::uint64_t bit = 1ULL << v;
    if (x & bit) {
      fn(x ^ bit, 1.0, v, false);
    } else {
      int channels = 0;
      for (int w : (*c.adj)[v])
        if (w != v && (x & (1ULL << w))) ++channels;
      for (int t : c.extra_targets)
        if (t == v) ++channels;
      if (channels > 0) fn(x | bit, c.lambda * channels, v, true);
    }
  }
}

// Generator restricted to states != 0, column-compressed. States are
// shifted by one (state s -> index s-1).
SpMat transient_generator(const ChainContext& c) {
  const std::uint64_t states = 1ULL << c.n;
  std::vector<Triplet> trips;
  trips.reserve(states * (c.n + 1));
  for (std::uint64_t x = 1; x < states; ++x) {
    double total = 0.0;
    for_each_transition(c, x, [&](std::uint64_t y, double rate, int, bool) {
      total += rate;
      if (y != 0) trips.emplace_back(static_cast<int>(x) - 1, static_cast<int>(y) - 1, rate);
    });
    trips.emplace_back(static_cast<int>(x) - 1, static_cast<int>(x) - 1, -total);
  }
  SpMat q(states - 1, states - 1);
  q.setFromTriplets(trips.begin(), trips.end());
  return q;
}

// Direct elimination below 512 unknowns; above that the generators'
// hypercube sparsity makes LU fill-in explode, so an iterative solve with
// diagonal preconditioning carries the load (these systems are diagonally
// dominant M-matrices) with a sparse-LU fallback if it stalls.
Eigen::VectorXd solve_sparse(const SpMat& a, const Eigen::VectorXd& b, SolveDiag* diag) {
  Eigen::VectorXd x;
  std::string method;
  double rhs_scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (a.rows() <= 512) {
    Eigen::MatrixXd dense(a);
    x = dense.partialPivLu().solve(b);
    method = "dense-lu";
  } else {
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> it;
    it.setTolerance(1e-14);
    it.setMaxIterations(20000);
    it.compute(a);
    x = it.solve(b);
    method = "bicgstab";
    double res = (a * x - b).cwiseAbs().maxCoeff();
    if (it.info() != Eigen::Success || res > 1e-9 * rhs_scale) {
      Eigen::SparseLU<SpMat> lu;
      lu.compute(a);
      if (lu.info() != Eigen::Success) throw std::runtime_error("exact: factorization failed");
      x = lu.solve(b);
      method = "sparse-lu";
    }
  }
  double res = (a * x - b).cwiseAbs().maxCoeff();
  if (diag) {
    diag->residual = res;
    diag->method = method;
  }
  if (res > 1e-8 * rhs_scale)
    throw std::runtime_error("exact: solve residual " + std::to_string(res));
  return x;
}

// Expected hitting time of state 0 from each transient state: (-Q) h = 1.
Eigen::VectorXd hitting_times(const ChainContext& c, SolveDiag* diag) {
  SpMat q = transient_generator(c);
  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(q.rows(), -1.0);
  return solve_sparse(q, rhs, diag);
}

// Expected time spent in each transient state before hitting 0, started
// from `from`: solves (-Q)^T o = e_from.
Eigen::VectorXd occupation_times(const ChainContext& c, std::uint64_t from, SolveDiag* diag) {
  SpMat q = transient_generator(c);
  SpMat qt = q.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(qt.rows());
  rhs[static_cast<int>(from) - 1] = -1.0;
  return solve_sparse(qt, rhs, diag);
}

ChainContext make_context(const RootedGraph& g, double lambda, ChainMode mode) {
  check_cap(g.n());
  ChainContext c;
  c.adj = &g.adj;
  c.n = g.n();
  c.lambda = lambda;
  c.root_added = mode == ChainMode::RootAdded;
  if (c.root_added) c.extra_targets = {g.root};
  return c;
}

}  // namespace

double expected_survival_time(const RootedGraph& g, double lambda, SolveDiag* diag) {
  ChainContext c = make_context(g, lambda, ChainMode::Plain);
  Eigen::VectorXd h = hitting_times(c, diag);
  return h[(1ULL << g.root) - 1];
}

double expected_excursion_time(const RootedGraph& g, double lambda, SolveDiag* diag) {
  ChainContext c = make_context(g, lambda, ChainMode::RootAdded);
  Eigen::VectorXd h = hitting_times(c, diag);
  return h[(1ULL << g.root) - 1];
}

double stationary_at_zero(const RootedGraph& g, double lambda, SolveDiag* diag) {
  ChainContext c = make_context(g, lambda, ChainMode::RootAdded);
  const std::uint64_t states = 1ULL << c.n;
  std::vector<Triplet> trips;
  for (std::uint64_t x = 0; x < states; ++x) {
    double total = 0.0;
    for_each_transition(c, x, [&](std::uint64_t y, double rate, int, bool) {
      total += rate;
      trips.emplace_back(static_cast<int>(y), static_cast<int>(x), rate);  // Q^T
    });
    trips.emplace_back(static_cast<int>(x), static_cast<int>(x), -total);
  }
  // Replace the last balance equation with normalization.
  std::vector<Triplet> kept;
  for (auto& t : trips)
    if (t.row() != static_cast<int>(states) - 1) kept.push_back(t);
  for (std::uint64_t x = 0; x < states; ++x)
    kept.emplace_back(static_cast<int>(states) - 1, static_cast<int>(x), 1.0);
  SpMat a(states, states);
  a.setFromTriplets(kept.begin(), kept.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(states);
  rhs[states - 1] = 1.0;
  Eigen::VectorXd pi = solve_sparse(a, rhs, diag);
  return pi[0];
}

double expected_transition_counts(const RootedGraph& g, double lambda, ChainMode mode,
                                  const std::vector<int>& marked_vertices, SolveDiag* diag) {
  ChainContext c = make_context(g, lambda, mode);
  Eigen::VectorXd occ = occupation_times(c, 1ULL << g.root, diag);
  std::vector<char> marked(c.n, 0);
  for (int v : marked_vertices) marked[v] = 1;
  const std::uint64_t states = 1ULL << c.n;
  double total = 0.0;
  for (std::uint64_t x = 1; x < states; ++x) {
    double o = occ[static_cast<int>(x) - 1];
    if (o == 0.0) continue;
    for_each_transition(c, x, [&](std::uint64_t, double rate, int v, bool on) {
      if (on && marked[v]) total += o * rate;
    });
  }
  return total;
}

double expected_leaf_infections(const RootedGraph& tree, double lambda, int l,
                                LeafVariant variant, SolveDiag* diag) {
  int d = tree.tree_depth();
  if (d == 0) return l == 0 ? 1.0 : 0.0;
  if (l > d) return 0.0;
  if (l == 0) throw std::invalid_argument("expected_leaf_infections: l = 0 on a deep tree");
  std::vector<int> marks;
  for (int v = 0; v < tree.n(); ++v)
    if (tree.depth[v] == l) marks.push_back(v);
  ChainMode mode = variant == LeafVariant::Excursion ? ChainMode::RootAdded : ChainMode::Plain;
  return expected_transition_counts(tree, lambda, mode, marks, diag);
}

double expected_end_infections(const RootedGraph& line_graph, double lambda, SolveDiag* diag) {
  auto it = line_graph.leaf_sets.find("ends");
  if (it == line_graph.leaf_sets.end())
    throw std::invalid_argument("expected_end_infections: no recorded end set");
  double base = 0.0;
  for (int v : it->second)
    if (v == line_graph.root) base += 1.0;  // initial infection at the end
  return base + expected_transition_counts(line_graph, lambda, ChainMode::RootAdded,
                                           it->second, diag);
}

ProductChainResult product_chain_excursion(const std::vector<RootedGraph>& trees,
                                           double lambda) {
  int total = 0;
  for (auto& t : trees) total += t.n();
  check_cap(total);

  // Disjoint union with a permanent parent per factor root.
  std::vector<std::vector<int>> adj(total);
  std::vector<int> roots;
  int base = 0;
  for (auto& t : trees) {
    for (int v = 0; v < t.n(); ++v)
      for (int w : t.adj[v]) adj[base + v].push_back(base + w);
    roots.push_back(base + t.root);
    base += t.n();
  }
  ChainContext c;
  c.adj = &adj;
  c.n = total;
  c.lambda = lambda;
  c.root_added = true;
  c.extra_targets = roots;

  SolveDiag diag;
  Eigen::VectorXd h = hitting_times(c, &diag);
  ProductChainResult res;
  for (int r : roots) {
    res.S_i.push_back(h[(1ULL << r) - 1]);
    res.S_mean += res.S_i.back();
  }
  res.S_mean /= static_cast<double>(roots.size());

  double prod = 1.0;
  for (auto& t : trees) prod *= 1.0 + lambda * expected_excursion_time(t, lambda);
  double lhs = 1.0 + lambda * static_cast<double>(trees.size()) * res.S_mean;
  res.identity_residual = std::abs(lhs - prod);
  return res;
}

ExactResult exact_observables(const RootedGraph& g, double lambda) {
  ExactResult out;
  SolveDiag d1, d2, d3;
  out.R = expected_survival_time(g, lambda, &d1);
  out.S = expected_excursion_time(g, lambda, &d2);
  out.pi0 = stationary_at_zero(g, lambda, &d3);
  out.identity_gap = std::abs(out.pi0 * (1.0 + lambda * out.S) - 1.0);
  out.max_residual = std::max({d1.residual, d2.residual, d3.residual});
  bool tree_kind = g.kind == GraphKind::GwTree || g.kind == GraphKind::LineF ||
                   g.kind == GraphKind::LineA;
  if (tree_kind) {
    int depth = g.tree_depth();
    if (depth == 0) {
      out.M[0] = out.Mbar[0] = 1.0;
    } else {
      SolveDiag dm;
      out.M[depth] = expected_leaf_infections(g, lambda, depth, LeafVariant::Excursion, &dm);
      out.max_residual = std::max(out.max_residual, dm.residual);
      out.Mbar[depth] = expected_leaf_infections(g, lambda, depth, LeafVariant::Plain, &dm);
      out.max_residual = std::max(out.max_residual, dm.residual);
    }
  }
  if (g.leaf_sets.count("ends")) {
    SolveDiag db;
    out.B = expected_end_infections(g, lambda, &db);
    out.max_residual = std::max(out.max_residual, db.residual);
  }
  return out;
}

}  // namespace contagion
