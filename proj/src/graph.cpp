#include "contagion/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace contagion {

std::string kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::GwTree: return "gw-tree";
    case GraphKind::Gwc1: return "gwc1";
    case GraphKind::Gwc2: return "gwc2";
    case GraphKind::Egw: return "egw";
    case GraphKind::LineF: return "line-F";
    case GraphKind::LineA: return "line-A";
    case GraphKind::General: return "general";
  }
  return "general";
}

GraphKind kind_from_name(const std::string& s) {
  if (s == "gw-tree") return GraphKind::GwTree;
  if (s == "gwc1") return GraphKind::Gwc1;
  if (s == "gwc2") return GraphKind::Gwc2;
  if (s == "egw") return GraphKind::Egw;
  if (s == "line-F") return GraphKind::LineF;
  if (s == "line-A") return GraphKind::LineA;
  if (s == "general") return GraphKind::General;
  throw std::invalid_argument("unknown graph kind: " + s);
}

int RootedGraph::edge_count() const {
  std::size_t twice = 0;
  for (auto& nb : adj) twice += nb.size();
  return static_cast<int>(twice / 2);
}

int RootedGraph::tree_depth() const {
  int d = 0;
  for (int x : depth) d = std::max(d, x);
  return d;
}

void RootedGraph::compute_depths() {
  depth.assign(n(), -1);
  std::deque<int> q{root};
  depth[root] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (depth[w] < 0) {
        depth[w] = depth[v] + 1;
        q.push_back(w);
      }
  }
}

void RootedGraph::sort_adjacency() {
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
}

namespace {

std::vector<int> bfs_dist(const std::vector<std::vector<int>>& adj,
                          const std::vector<int>& sources) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> q;
  for (int s : sources) {
    dist[s] = 0;
    q.push_back(s);
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
  }
  return dist;
}

}  // namespace

void RootedGraph::validate() const {
  if (n() == 0) throw std::logic_error("graph: empty");
  for (int v = 0; v < n(); ++v)
    for (int w : adj[v])
      if (w < 0 || w >= n()) throw std::logic_error("graph: neighbor out of range");
  auto dist = bfs_dist(adj, {root});
  for (int v = 0; v < n(); ++v)
    if (dist[v] < 0) throw std::logic_error("graph: disconnected");
  if (static_cast<int>(depth.size()) != n()) throw std::logic_error("graph: missing depths");
  for (int v = 0; v < n(); ++v)
    if (depth[v] != dist[v]) throw std::logic_error("graph: stale depth labels");

  bool tree_kind = kind == GraphKind::GwTree || kind == GraphKind::LineF ||
                   kind == GraphKind::LineA;
  int e = edge_count();
  if (tree_kind) {
    if (e != n() - 1 || !cycles.empty()) throw std::logic_error("graph: tree kind with cycles");
  } else if (kind == GraphKind::Gwc1 || kind == GraphKind::Gwc2) {
    if (e != n() || cycles.size() != 1)
      throw std::logic_error("graph: unicyclic kind needs exactly one cycle");
  } else if (kind == GraphKind::Egw) {
    if (e != n() - 1 + static_cast<int>(cycles.size()))
      throw std::logic_error("graph: egw edge count mismatch");
  }
  for (auto& c : cycles) {
    if (c.size() < 2) throw std::logic_error("graph: degenerate cycle record");
    for (std::size_t i = 0; i < c.size(); ++i) {
      int u = c[i], w = c[(i + 1) % c.size()];
      if (!std::count(adj[u].begin(), adj[u].end(), w))
        throw std::logic_error("graph: recorded cycle edge missing");
    }
  }
  if (kind == GraphKind::Gwc2) {
    // the root sits on the cycle and carries no attached tree
    if (cycles.empty() || std::find(cycles[0].begin(), cycles[0].end(), root) == cycles[0].end())
      throw std::logic_error("graph: gwc2 root must lie on the cycle");
    if (adj[root].size() != 2)  // exactly its two cycle edges
      throw std::logic_error("graph: gwc2 root carries a tree");
  }
}

int RootedGraph::parent_of(int v) const {
  if (v == root) return -1;
  for (int w : adj[v])
    if (depth[w] == depth[v] - 1) return w;
  throw std::logic_error("graph: no parent found (not a tree?)");
}

std::vector<int> RootedGraph::children_of(int v) const {
  std::vector<int> out;
  for (int w : adj[v])
    if (depth[w] == depth[v] + 1) out.push_back(w);
  return out;
}

RootedGraph RootedGraph::subtree(int child) const {
  std::vector<int> keep;
  std::vector<int> local(n(), -1);
  std::deque<int> q{child};
  local[child] = 0;
  keep.push_back(child);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (depth[w] == depth[v] + 1 && local[w] < 0) {
        local[w] = static_cast<int>(keep.size());
        keep.push_back(w);
        q.push_back(w);
      }
  }
  RootedGraph out;
  out.adj.resize(keep.size());
  for (int v : keep)
    for (int w : adj[v])
      if (local[w] >= 0 && depth[w] == depth[v] + 1) {
        out.adj[local[v]].push_back(local[w]);
        out.adj[local[w]].push_back(local[v]);
      }
  out.root = 0;
  out.kind = GraphKind::GwTree;
  out.sort_adjacency();
  out.compute_depths();
  return out;
}

namespace {

// Grows one GW layer cake: returns adjacency as parent links.
struct TreeBuilder {
  std::vector<std::vector<int>> adj;
  std::vector<int> depth_of;

  int add_vertex(int parent, int depth) {
    int id = static_cast<int>(adj.size());
    adj.emplace_back();
    depth_of.push_back(depth);
    if (parent >= 0) {
      adj[parent].push_back(id);
      adj[id].push_back(parent);
    }
    return id;
  }
};

void check_expected_size(const Pmf& dist, int depth, const GwOptions& opt) {
  double expect = 1.0, layer = 1.0;
  for (int h = 1; h <= depth; ++h) {
    layer *= dist.mean();
    expect += layer;
    if (expect > static_cast<double>(opt.size_cap))
      throw std::runtime_error("sample_gw: expected size " + std::to_string(expect) +
                               " exceeds cap " + std::to_string(opt.size_cap));
  }
}

// Breadth-first GW growth below an existing frontier.
void grow_gw(TreeBuilder& tb, std::deque<std::pair<int, int>>& frontier,
             const Pmf& dist, int max_depth, Stream& s, const GwOptions& opt) {
  while (!frontier.empty()) {
    auto [v, d] = frontier.front();
    frontier.pop_front();
    if (d >= max_depth) continue;
    int k = dist.sample(s);
    for (int i = 0; i < k; ++i) {
      int c = tb.add_vertex(v, d + 1);
      frontier.emplace_back(c, d + 1);
      if (static_cast<std::int64_t>(tb.adj.size()) > opt.size_cap)
        throw std::runtime_error("sample_gw: realized size exceeds cap");
    }
  }
}

RootedGraph finish_tree(TreeBuilder&& tb, GraphKind kind) {
  RootedGraph g;
  g.adj = std::move(tb.adj);
  g.root = 0;
  g.kind = kind;
  g.sort_adjacency();
  g.compute_depths();
  return g;
}

}  // namespace

RootedGraph sample_gw(const Pmf& dist, int depth, std::uint64_t seed, const GwOptions& opt) {
  return sample_gw_mixed(dist, dist, depth, seed, opt);
}

RootedGraph sample_gw_mixed(const Pmf& root_dist, const Pmf& other_dist, int depth,
                            std::uint64_t seed, const GwOptions& opt) {
  if (depth < 0) throw std::invalid_argument("sample_gw: negative depth");
  check_expected_size(root_dist.mean() > other_dist.mean() ? root_dist : other_dist,
                      depth, opt);
  Stream s(derive_key(seed, "gw"));
  TreeBuilder tb;
  tb.add_vertex(-1, 0);
  std::deque<std::pair<int, int>> frontier;
  if (depth > 0) {
    int k = root_dist.sample(s);
    for (int i = 0; i < k; ++i) frontier.emplace_back(tb.add_vertex(0, 1), 1);
  }
  grow_gw(tb, frontier, other_dist, depth, s, opt);
  return finish_tree(std::move(tb), GraphKind::GwTree);
}

namespace {

// Shared cycle-plus-trees construction; `skip_root_tree` gives GWC^2.
RootedGraph sample_gwc(const Pmf& dist, int m, int depth, std::uint64_t seed,
                       const GwOptions& opt, bool skip_root_tree) {
  Stream s(derive_key(seed, "gwc"));
  TreeBuilder tb;
  std::vector<int> cyc(m);
  for (int j = 0; j < m; ++j) cyc[j] = tb.add_vertex(-1, 0);
  for (int j = 0; j < m; ++j) {
    int u = cyc[j], w = cyc[(j + 1) % m];
    tb.adj[u].push_back(w);
    tb.adj[w].push_back(u);
  }
  std::deque<std::pair<int, int>> frontier;
  for (int j = 0; j < m; ++j) {
    if (skip_root_tree && j == 0) continue;
    frontier.emplace_back(cyc[j], 0);
  }
  grow_gw(tb, frontier, dist, depth, s, opt);
  RootedGraph g;
  g.adj = std::move(tb.adj);
  g.root = cyc[0];
  g.kind = skip_root_tree ? GraphKind::Gwc2 : GraphKind::Gwc1;
  g.cycles.push_back(cyc);
  g.sort_adjacency();
  g.compute_depths();
  return g;
}

}  // namespace

RootedGraph sample_gwc1(const Pmf& dist, int m, int depth, std::uint64_t seed,
                        const GwOptions& opt) {
  if (m < 1) throw std::invalid_argument("gwc1: m >= 1 required");
  if (m == 1) return sample_gw(dist, depth, seed, opt);  // degenerates to a GW tree
  check_expected_size(dist, depth, opt);
  return sample_gwc(dist, m, depth, seed, opt, false);
}

RootedGraph sample_gwc2(const Pmf& dist, int m, int depth, std::uint64_t seed,
                        const GwOptions& opt) {
  if (m < 2) throw std::invalid_argument("gwc2: m >= 2 required");
  check_expected_size(dist, depth, opt);
  return sample_gwc(dist, m, depth, seed, opt, true);
}

RootedGraph sample_egw(const Pmf& root_dist, const Pmf& other_dist, int h, int m,
                       int depth, std::uint64_t seed, const GwOptions& opt) {
  if (m < 2) throw std::invalid_argument("egw: m >= 2 required");
  if (depth < h + 1) throw std::invalid_argument("egw: depth >= h+1 required");
  check_expected_size(root_dist.mean() > other_dist.mean() ? root_dist : other_dist,
                      depth, opt);

  // Step 1: tree conditioned to survive to `depth`, by rejection.
  constexpr int kRetryCap = 1'000'000;
  RootedGraph tree;
  int tries = 0;
  for (;; ++tries) {
    if (tries >= kRetryCap)
      throw std::runtime_error(
          "egw: rejection cap hit; acceptance rate below " +
          std::to_string(1.0 / kRetryCap) + " (subcritical conditioning?)");
    tree = sample_gw_mixed(root_dist, other_dist, depth,
                           derive_key(seed, "egw-try", static_cast<std::uint64_t>(tries)),
                           opt);
    if (tree.tree_depth() == depth) break;
  }

  // Step 2: graft an independent cycle process at every depth-h vertex.
  TreeBuilder tb;
  tb.adj = tree.adj;
  for (int v = 0; v < tree.n(); ++v) tb.depth_of.push_back(tree.depth[v]);
  RootedGraph g;
  std::vector<std::vector<int>> cycles;
  Stream s(derive_key(seed, "egw-cyc"));
  std::deque<std::pair<int, int>> frontier;
  for (int v = 0; v < tree.n(); ++v) {
    if (tree.depth[v] != h) continue;
    std::vector<int> cyc{v};
    for (int j = 1; j < m; ++j) cyc.push_back(tb.add_vertex(-1, 0));
    for (int j = 0; j < m; ++j) {
      int a = cyc[j], b = cyc[(j + 1) % m];
      tb.adj[a].push_back(b);
      tb.adj[b].push_back(a);
    }
    for (int j = 1; j < m; ++j) frontier.emplace_back(cyc[j], 0);
    cycles.push_back(std::move(cyc));
  }
  grow_gw(tb, frontier, other_dist, depth - h, s, opt);
  g.adj = std::move(tb.adj);
  g.root = tree.root;
  g.kind = GraphKind::Egw;
  g.cycles = std::move(cycles);
  g.sort_adjacency();
  g.compute_depths();

  // Bottom leaves: deep in the tree and far from every cycle.
  std::vector<int> cyc_sources;
  for (auto& c : g.cycles) cyc_sources.insert(cyc_sources.end(), c.begin(), c.end());
  auto dc = bfs_dist(g.adj, cyc_sources);
  for (int v = 0; v < g.n(); ++v)
    if (g.depth[v] >= depth && dc[v] >= depth - h) g.leaf_sets["bottom"].push_back(v);
  return g;
}

RootedGraph build_line_f(const Pmf& dist, int m, int depth, std::uint64_t seed,
                         const GwOptions& opt) {
  if (m < 1) throw std::invalid_argument("line F: m >= 1 required");
  std::vector<RootedGraph> trees;
  for (int j = 0; j + 1 < m; ++j)
    trees.push_back(sample_gw(dist, depth, derive_key(seed, "lf", static_cast<std::uint64_t>(j)), opt));
  return line_f_from_trees(trees, m);
}

RootedGraph line_f_from_trees(const std::vector<RootedGraph>& trees, int m) {
  if (static_cast<int>(trees.size()) != m - 1)
    throw std::invalid_argument("line F: need m-1 trees");
  TreeBuilder tb;
  std::vector<int> spine;
  for (int j = 0; j < m; ++j) spine.push_back(tb.add_vertex(-1, 0));
  for (int j = 0; j + 1 < m; ++j) {
    tb.adj[spine[j]].push_back(spine[j + 1]);
    tb.adj[spine[j + 1]].push_back(spine[j]);
  }
  for (int j = 0; j + 1 < m; ++j) {
    const RootedGraph& t = trees[j];
    std::vector<int> local(t.n(), -1);
    local[t.root] = spine[j];
    for (int v = 0; v < t.n(); ++v)
      if (v != t.root) local[v] = tb.add_vertex(-1, 0);
    for (int v = 0; v < t.n(); ++v)
      for (int w : t.adj[v])
        if (v < w) {
          tb.adj[local[v]].push_back(local[w]);
          tb.adj[local[w]].push_back(local[v]);
        }
  }
  RootedGraph g;
  g.adj = std::move(tb.adj);
  g.root = spine[0];
  g.kind = GraphKind::LineF;
  g.line = spine;
  g.leaf_sets["ends"] = {spine[m - 1]};
  g.sort_adjacency();
  g.compute_depths();
  return g;
}

RootedGraph build_line_a(const Pmf& dist, int m1, int m2, int depth, std::uint64_t seed,
                         const GwOptions& opt) {
  if (m1 < 1 || m2 < 1) throw std::invalid_argument("line A: m1, m2 >= 1 required");
  TreeBuilder tb;
  int len = m1 + m2 + 1;
  std::vector<int> spine;
  for (int j = 0; j < len; ++j) spine.push_back(tb.add_vertex(-1, 0));
  for (int j = 0; j + 1 < len; ++j) {
    tb.adj[spine[j]].push_back(spine[j + 1]);
    tb.adj[spine[j + 1]].push_back(spine[j]);
  }
  Stream s(derive_key(seed, "la"));
  std::deque<std::pair<int, int>> frontier;
  for (int j = 1; j + 1 < len; ++j) frontier.emplace_back(spine[j], 0);
  grow_gw(tb, frontier, dist, depth, s, opt);
  RootedGraph g;
  g.adj = std::move(tb.adj);
  g.root = spine[m1];  // v_0
  g.kind = GraphKind::LineA;
  g.line = spine;
  g.leaf_sets["ends"] = {spine[0], spine[len - 1]};
  g.sort_adjacency();
  g.compute_depths();
  return g;
}

namespace {

// Components hanging off cycle vertex c when cycle edges are removed.
RootedGraph hanging_tree(const RootedGraph& h, int c, const std::vector<bool>& on_cycle) {
  std::vector<int> keep{c};
  std::vector<int> local(h.n(), -1);
  local[c] = 0;
  std::deque<int> q{c};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : h.adj[v]) {
      if (on_cycle[w] || local[w] >= 0) continue;
      local[w] = static_cast<int>(keep.size());
      keep.push_back(w);
      q.push_back(w);
    }
  }
  RootedGraph t;
  t.adj.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    int v = keep[i];
    for (int w : h.adj[v])
      if (local[w] >= 0 && !(on_cycle[v] && on_cycle[w]))
        t.adj[i].push_back(local[w]);
  }
  t.root = 0;
  t.kind = GraphKind::GwTree;
  t.sort_adjacency();
  t.compute_depths();
  return t;
}

}  // namespace

std::pair<RootedGraph, RootedGraph> cover_of_unicyclic(const RootedGraph& h) {
  if (h.kind != GraphKind::Gwc1 || h.cycles.size() != 1)
    throw std::invalid_argument("cover: input must be a gwc1 graph");
  const std::vector<int>& cyc = h.cycles[0];
  const int m = static_cast<int>(cyc.size());
  if (m < 2) throw std::invalid_argument("cover: cycle length >= 2 required");
  std::vector<bool> on_cycle(h.n(), false);
  for (int v : cyc) on_cycle[v] = true;

  // cyc[0] is v_1; trees[j] hangs at v_{j+1}.
  std::vector<RootedGraph> trees;
  for (int j = 0; j < m; ++j) trees.push_back(hanging_tree(h, cyc[j], on_cycle));

  const int mp = (m + 2) / 2;  // m' = ceil((m+1)/2)

  auto assemble = [&](const std::vector<int>& order, int root_pos) {
    // order holds 1-based cycle indices for the line; 0 marks a bare endpoint
    // duplicate that carries no tree.
    TreeBuilder tb;
    std::vector<int> spine;
    for (std::size_t i = 0; i < order.size(); ++i) spine.push_back(tb.add_vertex(-1, 0));
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      tb.adj[spine[i]].push_back(spine[i + 1]);
      tb.adj[spine[i + 1]].push_back(spine[i]);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i == 0 || i + 1 == order.size()) continue;  // endpoints carry no trees
      const RootedGraph& t = trees[order[i] - 1];
      std::vector<int> local(t.n(), -1);
      local[t.root] = spine[i];
      for (int v = 0; v < t.n(); ++v)
        if (v != t.root) local[v] = tb.add_vertex(-1, 0);
      for (int v = 0; v < t.n(); ++v)
        for (int w : t.adj[v])
          if (v < w) {
            tb.adj[local[v]].push_back(local[w]);
            tb.adj[local[w]].push_back(local[v]);
          }
    }
    RootedGraph g;
    g.adj = std::move(tb.adj);
    g.root = spine[root_pos];
    g.kind = GraphKind::LineA;
    g.line = spine;
    g.leaf_sets["ends"] = {spine.front(), spine.back()};
    g.sort_adjacency();
    g.compute_depths();
    return g;
  };

  // A1: v_{m'} ... v_m v_1 v_2 ... v_{m'-1} v~_{m'}, rooted at v_1.
  std::vector<int> order1;
  for (int j = mp; j <= m; ++j) order1.push_back(j);
  for (int j = 1; j <= mp - 1; ++j) order1.push_back(j);
  order1.push_back(mp);
  int root1 = m - mp + 1;  // position of v_1

  // A2: v_1 v_2 ... v_m v~_1, rooted at v_{m'}.
  std::vector<int> order2;
  for (int j = 1; j <= m; ++j) order2.push_back(j);
  order2.push_back(1);
  int root2 = mp - 1;  // position of v_{m'}

  return {assemble(order1, root1), assemble(order2, root2)};
}

// -- configuration model ------------------------------------------------

int HalfEdgeGraph::vertex_of(int he) const {
  auto it = std::upper_bound(offset.begin(), offset.end(), he);
  return static_cast<int>(it - offset.begin()) - 1;
}

std::vector<std::vector<int>> HalfEdgeGraph::adjacency() const {
  std::vector<std::vector<int>> adj(n);
  for (auto& [a, b] : matching) {
    int u = vertex_of(a), v = vertex_of(b);
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

void HalfEdgeGraph::validate() const {
  int total = half_edge_count();
  if (total % 2 != 0) throw std::logic_error("half-edge graph: odd half-edge count");
  std::vector<bool> seen(total, false);
  for (auto& [a, b] : matching) {
    if (a == b || a < 0 || b < 0 || a >= total || b >= total || seen[a] || seen[b])
      throw std::logic_error("half-edge graph: invalid matching");
    seen[a] = seen[b] = true;
  }
  if (static_cast<int>(matching.size()) * 2 != total)
    throw std::logic_error("half-edge graph: matching not perfect");
}

namespace {

void build_offsets(HalfEdgeGraph& g) {
  g.offset.assign(g.n + 1, 0);
  for (int v = 0; v < g.n; ++v) g.offset[v + 1] = g.offset[v] + g.degrees[v];
}

}  // namespace

HalfEdgeGraph sample_config_model(int n, const Pmf& dist, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("config model: n >= 2 required");
  constexpr int kRetryCap = 1'000'000;
  Stream deg_stream(derive_key(seed, "deg"));
  HalfEdgeGraph g;
  g.n = n;
  int tries = 0;
  for (;; ++tries) {
    if (tries >= kRetryCap)
      throw std::runtime_error("config model: no even degree sequence in 1e6 tries");
    g.degrees.assign(n, 0);
    long total = 0;
    for (int i = 0; i < n; ++i) {
      g.degrees[i] = dist.sample(deg_stream);
      total += g.degrees[i];
    }
    if (total % 2 == 0) break;
  }
  build_offsets(g);
  int total = g.half_edge_count();
  std::vector<int> ids(total);
  std::iota(ids.begin(), ids.end(), 0);
  Stream pair_stream(derive_key(seed, "pair"));
  for (int i = 0; i + 1 < total; i += 2) {
    int span = total - i - 1;
    int r = i + 1 + static_cast<int>(pair_stream.next_u64() % span);
    std::swap(ids[i + 1], ids[r]);
    g.matching.emplace_back(ids[i], ids[i + 1]);
  }
  return g;
}

HalfEdgeGraph cutoff_line_match(const std::vector<int>& degrees, std::uint64_t seed) {
  long total = std::accumulate(degrees.begin(), degrees.end(), 0L);
  if (total % 2 != 0) throw std::invalid_argument("cutoff: sum of degrees must be even");
  HalfEdgeGraph g;
  g.n = static_cast<int>(degrees.size());
  g.degrees = degrees;
  build_offsets(g);
  Stream s(derive_key(seed, "heights"));
  g.heights.resize(total);
  for (double& h : g.heights) h = s.next_unit();
  std::vector<bool> matched(total, false);
  int lowest = 0;
  for (long step = 0; step < total / 2; ++step) {
    while (lowest < total && matched[lowest]) ++lowest;
    int pick = lowest;
    matched[pick] = true;
    int best = -1;
    for (int j = 0; j < total; ++j)
      if (!matched[j] && (best < 0 || g.heights[j] > g.heights[best])) best = j;
    matched[best] = true;
    g.matching.emplace_back(pick, best);
  }
  return g;
}

std::vector<double> cutoff_line_trace(const HalfEdgeGraph& g) {
  std::vector<double> trace;
  trace.reserve(g.matching.size());
  for (auto& [a, b] : g.matching) trace.push_back(g.heights[b]);
  return trace;
}

Neighborhood neighborhood(const HalfEdgeGraph& g, int v, int radius) {
  auto adj = g.adjacency();
  std::vector<int> dist(g.n, -1);
  std::vector<int> members;
  std::deque<int> q{v};
  dist[v] = 0;
  members.push_back(v);
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    if (dist[x] >= radius) continue;
    for (int w : adj[x])
      if (dist[w] < 0) {
        dist[w] = dist[x] + 1;
        members.push_back(w);
        q.push_back(w);
      }
  }
  std::sort(members.begin(), members.end());
  std::vector<int> local(g.n, -1);
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<int>(i);

  Neighborhood out;
  out.global_ids = members;
  out.g.adj.resize(members.size());
  out.edge_origin.resize(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    int gv = members[i];
    for (std::size_t slot = 0; slot < adj[gv].size(); ++slot) {
      int gw = adj[gv][slot];
      if (local[gw] < 0) continue;
      out.g.adj[i].push_back(local[gw]);
      out.edge_origin[i].emplace_back(gv, static_cast<int>(slot));
    }
  }
  out.g.root = local[v];
  out.g.kind = GraphKind::General;
  out.g.compute_depths();
  return out;
}

int count_cycles_in_ball(const HalfEdgeGraph& g, int v, int radius) {
  Neighborhood nb = neighborhood(g, v, radius);
  return nb.g.edge_count() - nb.g.n() + 1;
}

namespace {

// Any cycle in a connected graph with e = n: walk the 2-core.
std::vector<int> find_cycle(const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<int> deg(n);
  for (int v = 0; v < n; ++v) deg[v] = static_cast<int>(adj[v].size());
  std::deque<int> q;
  std::vector<bool> removed(n, false);
  for (int v = 0; v < n; ++v)
    if (deg[v] <= 1) q.push_back(v);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    if (removed[v]) continue;
    removed[v] = true;
    for (int w : adj[v]) {
      if (removed[w]) continue;
      if (--deg[w] == 1) q.push_back(w);
    }
  }
  int start = -1;
  for (int v = 0; v < n; ++v)
    if (!removed[v]) {
      start = v;
      break;
    }
  if (start < 0) return {};
  // Multi-edge pair: the 2-core is exactly two vertices.
  std::vector<int> core;
  for (int v = 0; v < n; ++v)
    if (!removed[v]) core.push_back(v);
  if (core.size() == 2) return core;
  std::vector<int> cyc{start};
  int prev = -1, cur = start;
  for (;;) {
    int nxt = -1;
    for (int w : adj[cur])
      if (!removed[w] && w != prev) {
        nxt = w;
        break;
      }
    if (nxt == start || nxt < 0) break;
    cyc.push_back(nxt);
    prev = cur;
    cur = nxt;
  }
  return cyc;
}

}  // namespace

Block build_block(const HalfEdgeGraph& g, int v, int radius) {
  Neighborhood ball = neighborhood(g, v, radius);
  int cyc_count = ball.g.edge_count() - ball.g.n() + 1;
  if (cyc_count >= 2)
    throw std::runtime_error("build_block: ball holds " + std::to_string(cyc_count) +
                             " independent cycles");
  Block b;
  b.center = v;
  b.radius = radius;
  if (cyc_count == 0) {
    b.view = std::move(ball);
    for (int i = 0; i < b.view.g.n(); ++i)
      if (b.view.g.depth[i] >= radius) b.bottom_leaves.push_back(i);
    return b;
  }

  std::vector<int> cyc_local = find_cycle(ball.g.adj);
  std::vector<int> cyc_global;
  for (int c : cyc_local) cyc_global.push_back(ball.global_ids[c]);
  int h = radius;
  for (int c : cyc_local) h = std::min(h, ball.g.depth[c]);
  b.cycle_distance = h;

  // Union of the center ball with balls of radius l_n - h around the cycle.
  auto adj = g.adjacency();
  auto dv = bfs_dist(adj, {v});
  auto dc = bfs_dist(adj, cyc_global);
  std::vector<int> members;
  for (int x = 0; x < g.n; ++x)
    if ((dv[x] >= 0 && dv[x] <= radius) || (dc[x] >= 0 && dc[x] <= radius - h))
      members.push_back(x);
  std::vector<int> local(g.n, -1);
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<int>(i);

  Neighborhood out;
  out.global_ids = members;
  out.g.adj.resize(members.size());
  out.edge_origin.resize(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    int gv = members[i];
    for (std::size_t slot = 0; slot < adj[gv].size(); ++slot) {
      int gw = adj[gv][slot];
      if (local[gw] < 0) continue;
      out.g.adj[i].push_back(local[gw]);
      out.edge_origin[i].emplace_back(gv, static_cast<int>(slot));
    }
  }
  out.g.root = local[v];
  out.g.kind = GraphKind::General;
  out.g.compute_depths();
  int total_cycles = out.g.edge_count() - out.g.n() + 1;
  if (total_cycles >= 2)
    throw std::runtime_error("build_block: extended block holds multiple cycles");

  b.view = std::move(out);
  std::vector<int> cyc_in_block;
  for (int c : cyc_global) cyc_in_block.push_back(local[c]);
  b.cycle = cyc_in_block;
  for (std::size_t i = 0; i < members.size(); ++i) {
    int x = members[i];
    if (dv[x] >= 0 && dv[x] >= radius && (dc[x] < 0 || dc[x] >= radius - h))
      b.bottom_leaves.push_back(static_cast<int>(i));
  }
  return b;
}

PreprocessReport preprocess_graph(const HalfEdgeGraph& g, const PreprocessParams& params) {
  PreprocessReport rep;
  std::vector<bool> keep(g.n, true);
  for (int v = 0; v < g.n; ++v)
    if (g.degrees[v] > params.j1) keep[v] = false;
  std::vector<int> new_id(g.n, -1);
  for (int v = 0; v < g.n; ++v)
    if (keep[v]) {
      new_id[v] = static_cast<int>(rep.kept_global.size());
      rep.kept_global.push_back(v);
    }
  rep.removed = g.n - static_cast<int>(rep.kept_global.size());
  rep.removal_fraction = g.n ? static_cast<double>(rep.removed) / g.n : 0.0;

  // Surviving pairs keep their relative order; degrees are recounted from them.
  HalfEdgeGraph out;
  out.n = static_cast<int>(rep.kept_global.size());
  std::vector<int> new_deg(out.n, 0);
  std::vector<std::pair<int, int>> kept_pairs;
  for (auto& [a, b] : g.matching) {
    int u = g.vertex_of(a), w = g.vertex_of(b);
    if (keep[u] && keep[w]) {
      kept_pairs.emplace_back(a, b);
      ++new_deg[new_id[u]];
      ++new_deg[new_id[w]];
    }
  }
  out.degrees = new_deg;
  build_offsets(out);
  // Reassign half-edge ids per surviving vertex in pair order.
  std::vector<int> cursor(out.n, 0);
  auto assign = [&](int old_he) {
    int v = new_id[g.vertex_of(old_he)];
    return out.offset[v] + cursor[v]++;
  };
  for (auto& [a, b] : kept_pairs) out.matching.emplace_back(assign(a), assign(b));
  rep.graph = std::move(out);

  double total = std::max(1, rep.graph.n);
  for (int v = 0; v < rep.graph.n; ++v) rep.degree_measure[rep.graph.degrees[v]] += 1.0 / total;
  rep.within_3eta0 = rep.removal_fraction <= 3.0 * params.eta0;
  return rep;
}

}  // namespace contagion
