#include "contagion/sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace contagion {

namespace {

enum EvKind : int { kRecovery = 0, kEdge = 1, kParent = 2 };

struct Event {
  double t;
  int copy;  // engine index for decomposed runs, 0 otherwise
  int kind;
  int a;  // vertex
  int b;  // slot
  friend bool operator>(const Event& x, const Event& y) {
    return std::tie(x.t, x.kind, x.copy, x.a, x.b) > std::tie(y.t, y.kind, y.copy, y.a, y.b);
  }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, std::greater<Event>>;

// One contact-process state over a vertex set with global stream identity.
struct Engine {
  const std::vector<std::vector<int>>* adj = nullptr;
  const std::vector<int>* vertex_ids = nullptr;  // local -> global
  const std::vector<std::vector<std::pair<int, int>>>* edge_origin = nullptr;  // optional
  int root = 0;
  bool root_added = false;

  std::vector<char> infected;
  std::vector<ArrivalCursor> rec;
  std::vector<std::vector<ArrivalCursor>> out;
  ArrivalCursor parent;
  int infected_count = 0;

  double lambda_keep = 1.0;
  double recovery_keep = 1.0;

  void init_streams(const TimelineSpec& tl, const SimParams& p) {
    int n = static_cast<int>(adj->size());
    infected.assign(n, 0);
    rec.resize(n);
    out.resize(n);
    lambda_keep = tl.lambda_base > 0.0 ? p.lambda / tl.lambda_base : 0.0;
    recovery_keep = p.recovery / tl.recovery_base;
    if (lambda_keep > 1.0 + 1e-12 || recovery_keep > 1.0 + 1e-12)
      throw std::invalid_argument("simulate: effective rate above timeline base");
    for (int v = 0; v < n; ++v) {
      int gv = vertex_ids ? (*vertex_ids)[v] : v;
      rec[v] = ArrivalCursor(tl.recovery_key(gv), tl.recovery_base);
      out[v].resize((*adj)[v].size());
      for (std::size_t s = 0; s < (*adj)[v].size(); ++s) {
        auto [ev, es] = edge_origin ? (*edge_origin)[v][s]
                                    : std::make_pair(gv, static_cast<int>(s));
        out[v][s] = ArrivalCursor(tl.edge_key(ev, es), tl.lambda_base);
      }
    }
    if (root_added) parent = ArrivalCursor(tl.root_added_key(), tl.lambda_base);
  }

  void infect(int v, double t, int copy, EventQueue& pq, Trajectory* tr, bool count,
              const SimOptions& opt) {
    infected[v] = 1;
    ++infected_count;
    if (count && tr) {
      ++tr->on_flips[v];
      if (opt.record_flips) tr->flips.push_back({t, v, true});
    }
    rec[v].advance_past(t);
    pq.push({rec[v].time(), copy, kRecovery, v, 0});
    for (std::size_t s = 0; s < out[v].size(); ++s) {
      out[v][s].advance_past(t);
      pq.push({out[v][s].time(), copy, kEdge, v, static_cast<int>(s)});
    }
  }
};

}  // namespace

Trajectory simulate_mapped(const std::vector<std::vector<int>>& adj,
                           const std::vector<int>& vertex_ids,
                           const std::vector<std::vector<std::pair<int, int>>>& edge_origin,
                           int root, const TimelineSpec& tl, const SimParams& p,
                           const std::vector<int>& init, SimMode mode, double start_time,
                           const SimOptions& opt) {
  Engine eng;
  eng.adj = &adj;
  eng.vertex_ids = vertex_ids.empty() ? nullptr : &vertex_ids;
  eng.edge_origin = edge_origin.empty() ? nullptr : &edge_origin;
  eng.root = root;
  eng.root_added = mode == SimMode::RootAdded;
  eng.init_streams(tl, p);

  Trajectory tr;
  tr.on_flips.assign(adj.size(), 0);
  EventQueue pq;
  auto finish = [&](double t, Terminal st) {
    tr.end_time = t;
    tr.status = st;
    tr.final_state = eng.infected;
    return tr;
  };
  for (int v : init) {
    if (eng.infected[v]) continue;  // duplicates in init are harmless
    eng.infect(v, start_time, 0, pq, &tr, /*count=*/false, opt);
  }
  if (eng.root_added) {
    eng.parent.advance_past(start_time);
    pq.push({eng.parent.time(), 0, kParent, 0, 0});
  }
  if (eng.infected_count == 0 && !eng.root_added) return finish(start_time, Terminal::Extinct);

  while (!pq.empty()) {
    Event ev = pq.top();
    pq.pop();
    if (ev.t > p.horizon) return finish(p.horizon, Terminal::HorizonCensored);
    if (++tr.events > p.event_cap) return finish(ev.t, Terminal::EventCapCensored);
    if (ev.kind == kRecovery) {
      int v = ev.a;
      if (!eng.infected[v] || eng.rec[v].time() != ev.t) continue;
      bool keep = eng.rec[v].coin() < eng.recovery_keep;
      eng.rec[v].consume();
      if (!keep) {
        pq.push({eng.rec[v].time(), 0, kRecovery, v, 0});
        continue;
      }
      eng.infected[v] = 0;
      --eng.infected_count;
      if (opt.record_flips) tr.flips.push_back({ev.t, v, false});
      if (eng.infected_count == 0) return finish(ev.t, Terminal::Extinct);
    } else if (ev.kind == kEdge) {
      int u = ev.a, s = ev.b;
      ArrivalCursor& c = eng.out[u][s];
      if (c.time() != ev.t) continue;      // superseded entry
      if (!eng.infected[u]) continue;      // left pending for reinfection
      bool keep = c.coin() < eng.lambda_keep;
      int w = adj[u][s];
      c.consume();
      pq.push({c.time(), 0, kEdge, u, s});
      if (keep && w != u && !eng.infected[w])
        eng.infect(w, ev.t, 0, pq, &tr, /*count=*/true, opt);
    } else {  // permanently infected parent
      if (eng.parent.time() != ev.t) continue;
      bool keep = eng.parent.coin() < eng.lambda_keep;
      eng.parent.consume();
      pq.push({eng.parent.time(), 0, kParent, 0, 0});
      if (keep && !eng.infected[root])
        eng.infect(root, ev.t, 0, pq, &tr, /*count=*/true, opt);
    }
  }
  // Unreachable for nonempty systems: recovery streams never run dry.
  return finish(start_time, Terminal::Extinct);
}

Trajectory simulate(const RootedGraph& g, const TimelineSpec& tl, const SimParams& p,
                    const std::vector<int>& init, SimMode mode, const SimOptions& opt) {
  static const std::vector<int> no_ids;
  static const std::vector<std::vector<std::pair<int, int>>> no_origin;
  return simulate_mapped(g.adj, no_ids, no_origin, g.root, tl, p, init, mode, 0.0, opt);
}

double excursion_time(const RootedGraph& tree, const TimelineSpec& tl, const SimParams& p,
                      Terminal* status) {
  Trajectory tr = simulate(tree, tl, p, {tree.root}, SimMode::RootAdded);
  if (status) *status = tr.status;
  return tr.end_time;
}

double survival_time(const RootedGraph& g, const TimelineSpec& tl, const SimParams& p,
                     const std::vector<int>& init, Terminal* status) {
  Trajectory tr = simulate(g, tl, p, init, SimMode::Plain);
  if (status) *status = tr.status;
  return tr.end_time;
}

int leaf_infection_count(const RootedGraph& tree, const TimelineSpec& tl, const SimParams& p,
                         int l, LeafCountVariant variant, Terminal* status) {
  int d = tree.tree_depth();
  if (d == 0) {
    if (status) *status = Terminal::Extinct;
    return l == 0 ? 1 : 0;
  }
  if (l > d) {
    if (status) *status = Terminal::Extinct;
    return 0;
  }
  if (l == 0) throw std::invalid_argument("leaf_infection_count: l = 0 on a deep tree");
  SimMode mode = variant == LeafCountVariant::Excursion ? SimMode::RootAdded : SimMode::Plain;
  Trajectory tr = simulate(tree, tl, p, {tree.root}, mode);
  if (status) *status = tr.status;
  int count = 0;
  for (int v = 0; v < tree.n(); ++v)
    if (tree.depth[v] == l) count += tr.on_flips[v];
  return count;
}

int end_infection_count(const RootedGraph& line_graph, const TimelineSpec& tl,
                        const SimParams& p, Terminal* status) {
  auto it = line_graph.leaf_sets.find("ends");
  if (it == line_graph.leaf_sets.end())
    throw std::invalid_argument("end_infection_count: graph has no recorded end set");
  Trajectory tr = simulate(line_graph, tl, p, {line_graph.root}, SimMode::RootAdded);
  if (status) *status = tr.status;
  int count = 0;
  for (int v : it->second) {
    count += tr.on_flips[v];
    if (v == line_graph.root) ++count;  // initial infection counts at the end vertex
  }
  return count;
}

Trajectory reparametrized_simulate(const RootedGraph& g, const TimelineSpec& tl,
                                   double lambda_prime, double recovery,
                                   const std::vector<int>& init, SimMode mode,
                                   const SimOptions& opt) {
  if (recovery <= 0.0 || recovery > tl.recovery_base)
    throw std::invalid_argument("reparametrized_simulate: recovery outside (0, base]");
  SimParams p;
  p.lambda = lambda_prime;
  p.recovery = recovery;
  return simulate(g, tl, p, init, mode, opt);
}

DecomposedResult decomposed_simulate(const HalfEdgeGraph& g, const std::vector<Block>& blocks,
                                     const TimelineSpec& tl, const SimParams& p,
                                     int init_vertex) {
  if (static_cast<int>(blocks.size()) != g.n)
    throw std::invalid_argument("decomposed_simulate: need one block per vertex");

  struct Copy {
    Engine eng;
    const Block* block;
    std::vector<char> is_bottom;
  };
  std::vector<Copy> copies;
  EventQueue pq;
  DecomposedResult res;
  std::uint64_t events = 0;
  long global_infected = 0;

  auto spawn = [&](int center, double t) {
    const Block& b = blocks[center];
    copies.emplace_back();
    Copy& c = copies.back();
    c.block = &b;
    c.eng.adj = &b.view.g.adj;
    c.eng.vertex_ids = &b.view.global_ids;
    c.eng.edge_origin = &b.view.edge_origin;
    c.eng.root = b.view.g.root;
    c.eng.root_added = false;
    SimParams local = p;
    c.eng.init_streams(tl, local);
    c.is_bottom.assign(b.view.g.n(), 0);
    for (int v : b.bottom_leaves) c.is_bottom[v] = 1;
    int id = static_cast<int>(copies.size()) - 1;
    c.eng.infect(b.view.g.root, t, id, pq, nullptr, false, {});
    ++global_infected;
    res.copies.push_back(center);
  };

  spawn(init_vertex, 0.0);

  double end_time = 0.0;
  Terminal status = Terminal::Extinct;
  while (!pq.empty()) {
    Event ev = pq.top();
    pq.pop();
    if (ev.t > p.horizon) {
      end_time = p.horizon;
      status = Terminal::HorizonCensored;
      break;
    }
    if (++events > p.event_cap) {
      end_time = ev.t;
      status = Terminal::EventCapCensored;
      break;
    }
    // copies may be appended mid-loop; re-resolve the reference each event
    Engine& eng = copies[ev.copy].eng;
    if (ev.kind == kRecovery) {
      int v = ev.a;
      if (!eng.infected[v] || eng.rec[v].time() != ev.t) continue;
      bool keep = eng.rec[v].coin() < eng.recovery_keep;
      eng.rec[v].consume();
      if (!keep) {
        pq.push({eng.rec[v].time(), ev.copy, kRecovery, v, 0});
        continue;
      }
      eng.infected[v] = 0;
      --eng.infected_count;
      --global_infected;
      if (global_infected == 0) {
        end_time = ev.t;
        status = Terminal::Extinct;
        break;
      }
    } else if (ev.kind == kEdge) {
      int u = ev.a, s = ev.b;
      ArrivalCursor& c = eng.out[u][s];
      if (c.time() != ev.t) continue;
      if (!eng.infected[u]) continue;
      bool keep = c.coin() < eng.lambda_keep;
      int w = (*eng.adj)[u][s];
      c.consume();
      pq.push({c.time(), ev.copy, kEdge, u, s});
      if (keep && w != u && !eng.infected[w]) {
        eng.infect(w, ev.t, ev.copy, pq, nullptr, false, {});
        ++global_infected;
        if (copies[ev.copy].is_bottom[w])
          spawn(copies[ev.copy].block->view.global_ids[w], ev.t);
      }
    }
  }
  res.termination_time = end_time;
  res.status = status;

  // The decomposition reads the same event streams as the direct process,
  // so the two must empty at the same instant.
  if (status == Terminal::Extinct) {
    auto adj = g.adjacency();
    RootedGraph direct;
    direct.adj = adj;
    direct.root = init_vertex;
    direct.kind = GraphKind::General;
    direct.compute_depths();
    Trajectory tr = simulate(direct, tl, p, {init_vertex}, SimMode::Plain);
    if (tr.status != Terminal::Extinct || tr.end_time != end_time)
      throw std::logic_error("decomposed_simulate: termination time mismatch vs direct run");
  }
  return res;
}

void validate_trajectory(const RootedGraph& g, const TimelineSpec& tl, const SimParams& p,
                         const std::vector<int>& init, SimMode mode, const Trajectory& tr) {
  int n = g.n();
  std::vector<char> state(n, 0);
  for (int v : init) state[v] = 1;
  double lambda_keep = p.lambda / tl.lambda_base;
  double recovery_keep = p.recovery / tl.recovery_base;

  auto stream_has_arrival = [&](std::uint64_t key, double rate, double t, double keep) {
    ArrivalCursor c(key, rate);
    while (c.time() < t) c.consume();
    return c.time() == t && c.coin() < keep;
  };

  for (const Flip& f : tr.flips) {
    if (f.on) {
      if (state[f.vertex]) throw std::logic_error("trajectory: on-flip of infected vertex");
      bool fed = false;
      if (mode == SimMode::RootAdded && f.vertex == g.root &&
          stream_has_arrival(tl.root_added_key(), tl.lambda_base, f.time, lambda_keep))
        fed = true;
      for (int u = 0; u < n && !fed; ++u) {
        if (!state[u]) continue;
        for (std::size_t s = 0; s < g.adj[u].size() && !fed; ++s)
          if (g.adj[u][s] == f.vertex &&
              stream_has_arrival(tl.edge_key(u, static_cast<int>(s)), tl.lambda_base,
                                 f.time, lambda_keep))
            fed = true;
      }
      if (!fed) throw std::logic_error("trajectory: on-flip without infectious arrow");
      state[f.vertex] = 1;
    } else {
      if (!state[f.vertex]) throw std::logic_error("trajectory: off-flip of healthy vertex");
      if (!stream_has_arrival(tl.recovery_key(f.vertex), tl.recovery_base, f.time,
                              recovery_keep))
        throw std::logic_error("trajectory: off-flip without recovery arrival");
      state[f.vertex] = 0;
    }
  }
}

}  // namespace contagion
