#include "contagion/lazy_tree.hpp"

#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace contagion {

namespace {

struct Vertex {
  std::uint64_t key;
  int depth;
  int parent;            // -1 for the root
  int first_child = -1;  // -1 until revealed
  int child_count = 0;
  bool infected = false;
  ArrivalCursor rec;
  ArrivalCursor up;                 // edge toward the parent
  std::vector<ArrivalCursor> down;  // edges toward the children
};

enum EvKind : int { kRec = 0, kDown = 1, kUp = 2 };

struct Event {
  double t;
  int kind;
  int v;
  int slot;
  friend bool operator>(const Event& a, const Event& b) {
    return std::tie(a.t, a.kind, a.v, a.slot) > std::tie(b.t, b.kind, b.v, b.slot);
  }
};

}  // namespace

LazyRunResult run_lazy_tree(const LazyTreeParams& p, std::uint64_t seed, int stop_depth) {
  if (p.lambda > p.lambda_base + 1e-12)
    throw std::invalid_argument("lazy tree: lambda above stream base rate");
  const double lambda_keep = p.lambda_base > 0.0 ? p.lambda / p.lambda_base : 0.0;

  std::vector<Vertex> vs;
  vs.reserve(1024);
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> pq;
  LazyRunResult res;
  long infected_count = 0;

  auto reveal_children = [&](int v) {
    Vertex& x = vs[v];
    if (x.first_child >= 0 || x.depth >= p.max_depth) return;
    const Pmf& law = x.depth == 0 ? p.root_dist : p.other_dist;
    int k = law.sample(stream_unit(derive_key(x.key, "off"), 0));
    x.first_child = static_cast<int>(vs.size());
    x.child_count = k;
    x.down.reserve(k);
    for (int i = 0; i < k; ++i)
      x.down.emplace_back(derive_key(x.key, "dn", static_cast<std::uint64_t>(i)),
                          p.lambda_base);
    for (int i = 0; i < k; ++i) {
      Vertex c;
      c.key = derive_key(x.key, "child", static_cast<std::uint64_t>(i));
      c.depth = x.depth + 1;
      c.parent = v;
      c.rec = ArrivalCursor(derive_key(c.key, "rec"), p.recovery);
      c.up = ArrivalCursor(derive_key(c.key, "up"), p.lambda_base);
      vs.push_back(std::move(c));
    }
    res.revealed_vertices += k;
  };

  auto infect = [&](int v, double t) {
    // reveal_children may reallocate vs; take references afterwards
    reveal_children(v);
    Vertex& x = vs[v];
    x.infected = true;
    ++infected_count;
    res.deepest_infected = std::max(res.deepest_infected, x.depth);
    x.rec.advance_past(t);
    pq.push({x.rec.time(), kRec, v, 0});
    for (int i = 0; i < x.child_count; ++i) {
      x.down[i].advance_past(t);
      pq.push({x.down[i].time(), kDown, v, i});
    }
    if (x.parent >= 0) {
      x.up.advance_past(t);
      pq.push({x.up.time(), kUp, v, 0});
    }
  };

  {
    Vertex root;
    root.key = derive_key(seed, "v");
    root.depth = 0;
    root.parent = -1;
    root.rec = ArrivalCursor(derive_key(root.key, "rec"), p.recovery);
    vs.push_back(std::move(root));
  }
  infect(0, 0.0);
  if (stop_depth == 0) {
    res.outcome = LazyOutcome::ReachedDepth;
    return res;
  }

  while (!pq.empty()) {
    Event ev = pq.top();
    pq.pop();
    if (ev.t > p.horizon) {
      res.outcome = LazyOutcome::HorizonCensored;
      res.time = p.horizon;
      return res;
    }
    if (++res.events > p.event_cap) {
      res.outcome = LazyOutcome::EventCapCensored;
      res.time = ev.t;
      return res;
    }
    Vertex& x = vs[ev.v];
    if (ev.kind == kRec) {
      if (!x.infected || x.rec.time() != ev.t) continue;
      x.rec.consume();
      x.infected = false;
      --infected_count;
      if (infected_count == 0) {
        res.outcome = LazyOutcome::Extinct;
        res.time = ev.t;
        return res;
      }
      continue;
    }
    ArrivalCursor& c = ev.kind == kDown ? x.down[ev.slot] : x.up;
    if (c.time() != ev.t) continue;
    if (!x.infected) continue;  // pending until reinfection
    bool keep = c.coin() < lambda_keep;
    c.consume();
    pq.push({c.time(), ev.kind, ev.v, ev.slot});
    int target = ev.kind == kDown ? x.first_child + ev.slot : x.parent;
    if (!keep || vs[target].infected) continue;
    infect(target, ev.t);
    if (stop_depth >= 0 && vs[target].depth >= stop_depth) {
      res.outcome = LazyOutcome::ReachedDepth;
      res.time = ev.t;
      return res;
    }
  }
  res.outcome = LazyOutcome::Extinct;
  return res;
}

}  // namespace contagion
