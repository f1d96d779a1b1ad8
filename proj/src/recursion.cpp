#include "contagion/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace contagion {

namespace {

RecursionReport finish(std::string id, double lhs, double rhs, bool guard_held) {
  RecursionReport r;
  r.inequality_id = std::move(id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.precondition_held = guard_held;
  r.margin = rhs - lhs;
  r.satisfied = !guard_held || lhs <= rhs + kIneqTol;
  return r;
}

std::vector<RootedGraph> root_subtrees(const RootedGraph& tree) {
  std::vector<RootedGraph> subs;
  for (int c : tree.children_of(tree.root)) subs.push_back(tree.subtree(c));
  return subs;
}

}  // namespace

RecursionReport check_S_product(const RootedGraph& tree, double lambda) {
  double lhs = expected_excursion_time(tree, lambda);
  double rhs = 1.0;
  for (auto& sub : root_subtrees(tree))
    rhs *= 1.0 + lambda * expected_excursion_time(sub, lambda);
  return finish("S_product", lhs, rhs, true);
}

RecursionReport check_R_recursion(const RootedGraph& tree, double lambda) {
  double sumR = 0.0;
  for (auto& sub : root_subtrees(tree)) sumR += expected_survival_time(sub, lambda);
  bool guard = lambda * lambda * sumR < 1.0;
  double lhs = expected_survival_time(tree, lambda);
  double rhs = guard ? (1.0 + lambda * sumR) / (1.0 - lambda * lambda * sumR) : 0.0;
  return finish("R_recursion", lhs, rhs, guard);
}

RecursionReport check_S_vs_R(const RootedGraph& tree, double lambda) {
  double S = expected_excursion_time(tree, lambda);
  double R = expected_survival_time(tree, lambda);
  return finish("S_vs_R", S / (1.0 + lambda * S), R, true);
}

RecursionReport check_combined_typical(const RootedGraph& tree, double lambda) {
  double sumS = 0.0;
  for (auto& sub : root_subtrees(tree)) sumS += expected_excursion_time(sub, lambda);
  double denom = 1.0 - lambda - 2.0 * lambda * lambda * sumS;
  bool guard = lambda + 2.0 * lambda * lambda * sumS < 1.0;
  double lhs = expected_excursion_time(tree, lambda);
  double rhs = guard ? (1.0 + lambda * sumS) / denom : 0.0;
  return finish("combined_typical", lhs, rhs, guard);
}

namespace {

double leaf_count_or_convention(const RootedGraph& t, double lambda, int l, LeafVariant v) {
  if (l > t.tree_depth()) return 0.0;
  if (t.tree_depth() == 0) return l == 0 ? 1.0 : 0.0;
  return expected_leaf_infections(t, lambda, l, v);
}

}  // namespace

RecursionReport check_M_product(const RootedGraph& tree, double lambda, int l) {
  if (l < 1) throw std::invalid_argument("check_M_product: recursion starts at l >= 1");
  auto subs = root_subtrees(tree);
  std::vector<double> S(subs.size()), M(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    S[i] = expected_excursion_time(subs[i], lambda);
    M[i] = leaf_count_or_convention(subs[i], lambda, l - 1, LeafVariant::Excursion);
  }
  double rhs = 0.0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < subs.size(); ++j)
      if (j != i) prod *= 1.0 + lambda * S[j];
    rhs += M[i] * prod;
  }
  rhs *= lambda;
  double lhs = leaf_count_or_convention(tree, lambda, l, LeafVariant::Excursion);
  return finish("M_product", lhs, rhs, true);
}

RecursionReport check_Mbar_recursion(const RootedGraph& tree, double lambda, int l) {
  if (l < 1) throw std::invalid_argument("check_Mbar_recursion: l >= 1 required");
  auto subs = root_subtrees(tree);
  double sumR = 0.0, sumM = 0.0;
  for (auto& sub : subs) {
    sumR += expected_survival_time(sub, lambda);
    sumM += leaf_count_or_convention(sub, lambda, l - 1, LeafVariant::Plain);
  }
  bool guard = lambda * lambda * sumR < 1.0;
  double lhs = leaf_count_or_convention(tree, lambda, l, LeafVariant::Plain);
  double rhs = guard ? lambda * sumM / (1.0 - lambda * lambda * sumR) : 0.0;
  return finish("Mbar_recursion", lhs, rhs, guard);
}

RecursionReport check_M_vs_Mbar(const RootedGraph& tree, double lambda, int l) {
  double S = expected_excursion_time(tree, lambda);
  double M = leaf_count_or_convention(tree, lambda, l, LeafVariant::Excursion);
  double Mbar = leaf_count_or_convention(tree, lambda, l, LeafVariant::Plain);
  return finish("M_vs_Mbar", M, (1.0 + lambda * S) * Mbar, true);
}

std::pair<RecursionReport, RecursionReport> check_B_recursions(const RootedGraph& line_f,
                                                               double lambda) {
  if (line_f.kind != GraphKind::LineF || line_f.line.size() < 2)
    throw std::invalid_argument("check_B_recursions: need a line-F graph with m >= 2");
  double lhs = expected_end_infections(line_f, lambda);

  // Split at the root: tree children of v_1 on one side, the tail line F
  // rooted at v_2 on the other.
  int v1 = line_f.line[0], v2 = line_f.line[1];
  std::vector<RootedGraph> tree_subs;
  for (int c : line_f.children_of(v1))
    if (c != v2) tree_subs.push_back(line_f.subtree(c));

  // Tail = the line v_2 ... v_m with its hanging trees, rebuilt as a
  // line-F graph so its spine and end set stay intact.
  RootedGraph tail;
  {
    std::vector<RootedGraph> tail_trees;
    int m = static_cast<int>(line_f.line.size());
    for (int j = 1; j + 1 < m; ++j) {
      std::vector<RootedGraph> pieces;
      for (int c : line_f.children_of(line_f.line[j]))
        if (std::find(line_f.line.begin(), line_f.line.end(), c) == line_f.line.end())
          pieces.push_back(line_f.subtree(c));
      RootedGraph t;
      int total = 1;
      for (auto& p : pieces) total += p.n();
      t.adj.resize(total);
      int base = 1;
      for (auto& p : pieces) {
        for (int v = 0; v < p.n(); ++v)
          for (int w : p.adj[v])
            if (v < w) {
              t.adj[base + v].push_back(base + w);
              t.adj[base + w].push_back(base + v);
            }
        t.adj[0].push_back(base + p.root);
        t.adj[base + p.root].push_back(0);
        base += p.n();
      }
      t.root = 0;
      t.kind = GraphKind::GwTree;
      t.sort_adjacency();
      t.compute_depths();
      tail_trees.push_back(std::move(t));
    }
    tail = line_f_from_trees(tail_trees, m - 1);
  }

  double B_tail = expected_end_infections(tail, lambda);
  double S_tail = expected_excursion_time(tail, lambda);
  double sumS = 0.0;
  double prod = 1.0;
  for (auto& sub : tree_subs) {
    double s = expected_excursion_time(sub, lambda);
    sumS += s;
    prod *= 1.0 + lambda * s;
  }
  bool guard = lambda + 2.0 * lambda * lambda * (S_tail + sumS) < 1.0;
  double rhs_typ =
      guard ? lambda * B_tail / (1.0 - lambda - 2.0 * lambda * lambda * (S_tail + sumS)) : 0.0;
  RecursionReport typical = finish("B_typical", lhs, rhs_typ, guard);
  RecursionReport atypical = finish("B_product", lhs, lambda * B_tail * prod, true);
  return {typical, atypical};
}

double recursive_bound_calculator(const RootedGraph& tree, double lambda) {
  // Bottom-up over the tree; S(leaf) = 1 is the base.
  std::vector<double> bound(tree.n(), 1.0);
  std::vector<int> order(tree.n());
  for (int v = 0; v < tree.n(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return tree.depth[a] > tree.depth[b]; });
  for (int v : order) {
    auto kids = tree.children_of(v);
    if (kids.empty()) continue;
    double prod = 1.0, sum = 0.0;
    for (int c : kids) {
      prod *= 1.0 + lambda * bound[c];
      sum += bound[c];
    }
    double b = prod;
    double guard = lambda + 2.0 * lambda * lambda * sum;
    if (guard < 1.0) b = std::min(b, (1.0 + lambda * sum) / (1.0 - guard));
    bound[v] = b;
  }
  return bound[tree.root];
}

std::vector<RootedGraph> make_tree_panel(int count, std::uint64_t seed, int max_vertices) {
  // Mixed two-point offspring laws give stars, paths, and bushy shapes.
  std::vector<Pmf> laws = {
      Pmf::two_point(0, 0.5, 3, 0.5),
      Pmf::two_point(0, 0.7, 3, 0.3),
      Pmf::two_point(0, 0.4, 2, 0.6),
      Pmf::from_map({{0, 0.5}, {1, 0.3}, {3, 0.2}}, "mix013"),
  };
  std::vector<RootedGraph> panel;
  std::uint64_t attempt = 0;
  while (static_cast<int>(panel.size()) < count) {
    const Pmf& law = laws[attempt % laws.size()];
    RootedGraph t = sample_gw(law, 4, derive_key(seed, "panel", attempt));
    ++attempt;
    if (t.n() > max_vertices) continue;
    panel.push_back(std::move(t));
  }
  return panel;
}

std::vector<RootedGraph> make_line_panel(int count, std::uint64_t seed, int m, int depth) {
  Pmf law = Pmf::two_point(0, 0.6, 2, 0.4);
  std::vector<RootedGraph> panel;
  for (int i = 0; i < count; ++i) {
    std::uint64_t s = derive_key(seed, "line-panel", static_cast<std::uint64_t>(i));
    std::vector<RootedGraph> trees;
    for (int j = 0; j + 1 < m; ++j)
      trees.push_back(sample_gw(law, depth, derive_key(s, static_cast<std::uint64_t>(j))));
    panel.push_back(line_f_from_trees(trees, m));
  }
  return panel;
}

SweepSummary run_recursion_sweep(const std::vector<RootedGraph>& trees,
                                 const std::vector<RootedGraph>& lines,
                                 const std::vector<double>& lambdas) {
  SweepSummary out;
  auto push = [&](RecursionReport r, const std::string& inst, bool guarded) {
    r.instance_id = inst;
    if (guarded) {
      ++out.guarded_rows;
      if (r.precondition_held) ++out.guard_active;
    }
    if (!r.satisfied) ++out.violations;
    out.rows.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const RootedGraph& t = trees[i];
    for (double lam : lambdas) {
      std::ostringstream id;
      id << "tree" << i << "@" << lam;
      push(check_S_product(t, lam), id.str(), false);
      push(check_R_recursion(t, lam), id.str(), true);
      push(check_S_vs_R(t, lam), id.str(), false);
      push(check_combined_typical(t, lam), id.str(), true);
      // the leaf-count recursions live at l = depth, where every child
      // subtree quantity they reference is defined
      int depth = t.tree_depth();
      if (depth >= 1) {
        push(check_M_product(t, lam, depth), id.str(), false);
        push(check_Mbar_recursion(t, lam, depth), id.str(), true);
        push(check_M_vs_Mbar(t, lam, depth), id.str(), false);
      }
    }
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (double lam : lambdas) {
      std::ostringstream id;
      id << "lineF" << i << "@" << lam;
      auto [typ, atyp] = check_B_recursions(lines[i], lam);
      push(typ, id.str(), true);
      push(atyp, id.str(), false);
    }
  }
  return out;
}

std::string sweep_to_csv(const SweepSummary& s) {
  std::ostringstream os;
  os << "instance,inequality,lhs,rhs,margin,guard_held,satisfied\n";
  os.precision(12);
  for (auto& r : s.rows)
    os << r.instance_id << "," << r.inequality_id << "," << r.lhs << "," << r.rhs << ","
       << r.margin << "," << (r.precondition_held ? 1 : 0) << "," << (r.satisfied ? 1 : 0)
       << "\n";
  return os.str();
}

}  // namespace contagion
